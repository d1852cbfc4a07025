//! Two-column numeric extraction from delimited text.

use std::path::{Path, PathBuf};

use critsurf::Sample;

use crate::CliError;

/// A column given by header name or zero-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        match self {
            ColumnSelector::Name(n) => write!(f, "`{n}`"),
            ColumnSelector::Index(i) => write!(f, "#{i}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub x: ColumnSelector,
    pub y: ColumnSelector,
    /// rows where any of these columns is zero are dropped before testing
    pub require_nonzero: Vec<ColumnSelector>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl DatasetFile {
    pub fn new(path: impl Into<PathBuf>, x: ColumnSelector, y: ColumnSelector) -> Self {
        DatasetFile {
            path: path.into(),
            x,
            y,
            require_nonzero: Vec::new(),
            delimiter: b',',
            has_header: true,
        }
    }
}

fn resolve(sel: &ColumnSelector, headers: Option<&csv::StringRecord>, width: usize, path: &Path) -> Result<usize, CliError> {
    let idx = match sel {
        ColumnSelector::Index(i) => Some(*i),
        ColumnSelector::Name(name) => headers.and_then(|h| h.iter().position(|c| c.trim() == name)),
    };
    match idx {
        Some(i) if i < width => Ok(i),
        _ => Err(CliError::Data(format!(
            "{}: column {sel} not found (file has {width} columns{})",
            path.display(),
            headers.map_or(String::new(), |h| format!(": {}", h.iter().collect::<Vec<_>>().join(", ")))
        ))),
    }
}

fn parse_cell(field: Option<&str>) -> Option<f64> {
    let v: f64 = field?.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Reads the selected columns into a sample. Any row with a missing or
/// non-numeric value in a used column is an error listing the offending
/// line numbers.
pub fn read_dataset(spec: &DatasetFile) -> Result<Sample, CliError> {
    let path = &spec.path;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = if spec.has_header {
        Some(
            reader
                .headers()
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
                .clone(),
        )
    } else {
        None
    };
    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?);
    }
    let width = headers
        .as_ref()
        .map(|h| h.len())
        .or_else(|| records.first().map(|r| r.len()))
        .unwrap_or(0);
    let xi = resolve(&spec.x, headers.as_ref(), width, path)?;
    let yi = resolve(&spec.y, headers.as_ref(), width, path)?;
    let filters = spec
        .require_nonzero
        .iter()
        .map(|s| resolve(s, headers.as_ref(), width, path))
        .collect::<Result<Vec<_>, _>>()?;

    let mut pairs = Vec::new();
    let mut bad_lines = Vec::new();
    for rec in &records {
        let line = rec.position().map_or(0, |p| p.line());
        let (x, y) = (parse_cell(rec.get(xi)), parse_cell(rec.get(yi)));
        let filter_values: Option<Vec<f64>> = filters.iter().map(|&i| parse_cell(rec.get(i))).collect();
        match (x, y, filter_values) {
            (Some(x), Some(y), Some(f)) => {
                if f.iter().all(|&v| v != 0.0) {
                    pairs.push((x, y));
                }
            }
            _ => bad_lines.push(line),
        }
    }
    if !bad_lines.is_empty() {
        let shown: Vec<String> = bad_lines.iter().take(20).map(u64::to_string).collect();
        return Err(CliError::Data(format!(
            "{}: {} row(s) with missing or non-numeric values at line(s) {}{}",
            path.display(),
            bad_lines.len(),
            shown.join(", "),
            if bad_lines.len() > 20 { ", ..." } else { "" }
        )));
    }
    Sample::new(pairs).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes a sample as `x,y` CSV with shortest round-trip number formatting.
pub fn write_sample_csv(sample: &Sample, path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(["x", "y"]).map_err(io)?;
    for &(x, y) in sample.pairs() {
        w.write_record([x.to_string(), y.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn selects_by_name_and_index() {
        let f = file("a,b,c\n1,2,3\n4,5,6\n");
        let s = read_dataset(&DatasetFile::new(f.path(), "c".parse().unwrap(), "0".parse().unwrap())).unwrap();
        assert_eq!(s.pairs(), &[(3.0, 1.0), (6.0, 4.0)]);
    }

    #[test]
    fn headerless_and_semicolon() {
        let f = file("1;2\n3;4\n5;6\n");
        let mut spec = DatasetFile::new(f.path(), ColumnSelector::Index(1), ColumnSelector::Index(0));
        spec.delimiter = b';';
        spec.has_header = false;
        assert_eq!(read_dataset(&spec).unwrap().pairs(), &[(2.0, 1.0), (4.0, 3.0), (6.0, 5.0)]);
    }

    #[test]
    fn missing_values_report_lines() {
        let f = file("x,y\n1,2\n,3\n4,NA\n5,6\n");
        let err = read_dataset(&DatasetFile::new(f.path(), "x".parse().unwrap(), "y".parse().unwrap()))
            .unwrap_err()
            .to_string();
        assert!(err.contains("2 row(s)") && err.contains("3, 4"), "{err}");
    }

    #[test]
    fn nonzero_filter_uses_extra_columns() {
        let f = file("building,contents,profits\n1,2,0\n3,4,5\n0,6,7\n8,9,1\n");
        let mut spec = DatasetFile::new(f.path(), "building".parse().unwrap(), "contents".parse().unwrap());
        spec.require_nonzero = ["building", "contents", "profits"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(read_dataset(&spec).unwrap().pairs(), &[(3.0, 4.0), (8.0, 9.0)]);
    }

    #[test]
    fn unknown_column() {
        let f = file("x,y\n1,2\n3,4\n");
        let err = read_dataset(&DatasetFile::new(f.path(), "x".parse().unwrap(), "z".parse().unwrap())).unwrap_err();
        assert!(err.to_string().contains("`z`"));
        assert_eq!(err.exit_code(), crate::ExitCode::Data);
    }
}
