//! Deterministic SVG rendering of k×k cell matrices and rank scatter plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use critsurf::Grid;

use crate::CliError;

const CELL: f64 = 24.0;
const MARGIN: f64 = 40.0;
const LEGEND_W: f64 = 70.0;
const NEGATIVE: (f64, f64, f64) = (33.0, 102.0, 172.0);
const POSITIVE: (f64, f64, f64) = (178.0, 24.0, 43.0);
pub const NEUTRAL: &str = "#ffffff";
const BLANK: &str = "#eeeeee";

/// A k×k matrix to draw. Entry `(s, t)` sits in column `s` (x axis) and row
/// `t` counted from the bottom; `None` cells are drawn blank.
#[derive(Debug, Clone)]
pub struct HeatmapSpec {
    pub values: Grid<Option<f64>>,
    /// Half-width of the colour scale; `None` takes the largest |value|.
    pub scale: Option<f64>,
    pub annotate: bool,
    pub title: String,
    pub path: PathBuf,
}

impl HeatmapSpec {
    pub fn new(values: &Grid<f64>, path: impl Into<PathBuf>) -> Self {
        HeatmapSpec {
            values: values.map(|&v| Some(v)),
            scale: None,
            annotate: false,
            title: String::new(),
            path: path.into(),
        }
    }

    /// Symmetric half-width actually used; zero means every cell is neutral.
    pub fn effective_scale(&self) -> f64 {
        self.scale.unwrap_or_else(|| {
            self.values
                .as_slice()
                .iter()
                .flatten()
                .fold(0.0_f64, |m, v| m.max(v.abs()))
        })
    }
}

fn hex(c: (f64, f64, f64)) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0.round() as u8, c.1.round() as u8, c.2.round() as u8)
}

/// Maps `value` to the blue–white–red scale on `[-scale, scale]`.
pub fn color_for(value: f64, scale: f64) -> String {
    if !(scale > 0.0) || value == 0.0 {
        return NEUTRAL.to_string();
    }
    let t = (value / scale).clamp(-1.0, 1.0);
    let end = if t > 0.0 { POSITIVE } else { NEGATIVE };
    let a = t.abs();
    let lerp = |e: f64| 255.0 + (e - 255.0) * a;
    hex((lerp(end.0), lerp(end.1), lerp(end.2)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_heatmap(spec: &HeatmapSpec) -> Result<String, CliError> {
    let k = spec.values.rows();
    if spec.values.cols() != k || k == 0 {
        return Err(CliError::Data("heatmap matrix must be square and non-empty".into()));
    }
    if spec.values.as_slice().iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::Data("heatmap matrix contains non-finite values".into()));
    }
    let scale = spec.effective_scale();
    let side = k as f64 * CELL;
    let width = 2.0 * MARGIN + side + LEGEND_W;
    let height = 2.0 * MARGIN + side;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"##
    );
    let _ = writeln!(svg, r##"<title>{}</title>"##, escape(&spec.title));
    let _ = writeln!(svg, r##"<text x="{MARGIN}" y="{}" font-size="12">{}</text>"##, MARGIN - 12.0, escape(&spec.title));
    let _ = writeln!(svg, r##"<g id="cells">"##);
    for s in 0..k {
        for t in 0..k {
            let x = MARGIN + s as f64 * CELL;
            let y = MARGIN + (k - 1 - t) as f64 * CELL;
            let (fill, label) = match spec.values[(s, t)] {
                Some(v) => (color_for(v, scale), Some(v)),
                None => (BLANK.to_string(), None),
            };
            let _ = writeln!(
                svg,
                r##"<rect id="cell-{}-{}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#999999" stroke-width="0.5"/>"##,
                s + 1,
                t + 1
            );
            if let (true, Some(v)) = (spec.annotate, label) {
                let _ = writeln!(
                    svg,
                    r##"<text x="{}" y="{}" text-anchor="middle" font-size="7">{v:.2}</text>"##,
                    x + CELL / 2.0,
                    y + CELL / 2.0 + 2.5
                );
            }
        }
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" text-anchor="middle">u</text><text x="{}" y="{}" text-anchor="middle">v</text>"##,
        MARGIN + side / 2.0,
        MARGIN + side + 20.0,
        MARGIN - 20.0,
        MARGIN + side / 2.0
    );
    legend(&mut svg, MARGIN + side + 20.0, scale, side);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn legend(svg: &mut String, x: f64, scale: f64, side: f64) {
    const STEPS: usize = 21;
    let h = side / STEPS as f64;
    let _ = writeln!(svg, r##"<g id="legend">"##);
    for i in 0..STEPS {
        let t = 1.0 - 2.0 * i as f64 / (STEPS - 1) as f64;
        let _ = writeln!(
            svg,
            r##"<rect x="{x}" y="{}" width="12" height="{h}" fill="{}"/>"##,
            MARGIN + i as f64 * h,
            color_for(t, 1.0)
        );
    }
    for (frac, v) in [(0.0, scale), (0.5, 0.0), (1.0, -scale)] {
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}">{v:.3}</text>"##,
            x + 16.0,
            MARGIN + frac * (side - h) + h / 2.0 + 3.0
        );
    }
    let _ = writeln!(svg, "</g>");
}

pub fn emit_heatmap(spec: &HeatmapSpec) -> Result<(), CliError> {
    write_file(&spec.path, &render_heatmap(spec)?)
}

/// Scatter plot of points already mapped into the unit square.
pub fn render_scatter(points: &[(f64, f64)], title: &str) -> String {
    let side = 300.0;
    let size = side + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="10">"##
    );
    let _ = writeln!(svg, r##"<title>{}</title>"##, escape(title));
    let _ = writeln!(svg, r##"<text x="{MARGIN}" y="{}" font-size="12">{}</text>"##, MARGIN - 12.0, escape(title));
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{side}" height="{side}" fill="none" stroke="#333333"/>"##
    );
    let _ = writeln!(svg, r##"<g id="points" fill="#1f4e79" fill-opacity="0.6">"##);
    for &(u, v) in points {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="1.8"/>"##,
            MARGIN + u * side,
            MARGIN + (1.0 - v) * side
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fills(svg: &str) -> Vec<&str> {
        svg.lines()
            .filter(|l| l.contains("id=\"cell-"))
            .map(|l| l.split("fill=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect()
    }

    #[test]
    fn zero_matrix_is_neutral() {
        let spec = HeatmapSpec::new(&Grid::filled(4, 4, 0.0), "unused.svg");
        let svg = render_heatmap(&spec).unwrap();
        let f = fills(&svg);
        assert_eq!(f.len(), 16);
        assert!(f.iter().all(|&c| c == NEUTRAL));
    }

    #[test]
    fn one_positive_cell_is_the_only_warm_one() {
        let mut g = Grid::filled(5, 5, 0.0);
        g[(3, 1)] = 0.7;
        let svg = render_heatmap(&HeatmapSpec::new(&g, "unused.svg")).unwrap();
        let warm: Vec<_> = fills(&svg).into_iter().filter(|&c| c != NEUTRAL).collect();
        assert_eq!(warm, vec![hex(POSITIVE).as_str()]);
        assert!(svg.contains(&format!("id=\"cell-4-2\" x=\"{}\" y=\"{}\"", MARGIN + 3.0 * CELL, MARGIN + 3.0 * CELL)));
    }

    #[test]
    fn scale_is_symmetric() {
        let (neg, pos) = (color_for(-0.5, 1.0), color_for(0.5, 1.0));
        assert!(neg != NEUTRAL && pos != NEUTRAL && neg != pos);
        let channels = |c: &str| (1..7).step_by(2).map(|i| u8::from_str_radix(&c[i..i + 2], 16).unwrap()).collect::<Vec<_>>();
        // equal distance from white on both sides
        let dist = |c: &str| channels(c).iter().map(|&x| 255 - i32::from(x)).sum::<i32>() as f64;
        let full = |c: (f64, f64, f64)| 3.0 * 255.0 - c.0 - c.1 - c.2;
        assert!((dist(&neg) / full(NEGATIVE) - dist(&pos) / full(POSITIVE)).abs() < 0.02);
        let spec = HeatmapSpec::new(&Grid::from_vec(2, 2, vec![-3.0, 1.0, 0.5, 2.0]), "x.svg");
        assert_eq!(spec.effective_scale(), 3.0);
        assert_eq!(color_for(-3.0, 3.0), hex(NEGATIVE));
        assert_eq!(color_for(3.0, 3.0), hex(POSITIVE));
    }

    #[test]
    fn deterministic_and_well_formed() {
        let g = Grid::from_vec(3, 3, (0..9).map(|i| i as f64 - 4.0).collect());
        let mut spec = HeatmapSpec::new(&g, "x.svg");
        spec.annotate = true;
        spec.title = "a < b".into();
        let a = render_heatmap(&spec).unwrap();
        assert_eq!(a, render_heatmap(&spec).unwrap());
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert!(a.contains("a &lt; b"));
        assert!(a.contains("id=\"legend\""));
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::from_vec(1, 1, vec![f64::NAN]);
        assert!(render_heatmap(&HeatmapSpec::new(&g, "x.svg")).is_err());
    }
}
