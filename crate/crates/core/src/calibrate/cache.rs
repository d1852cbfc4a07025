//! Versioned JSON cache for calibrated surfaces.
//!
//! Reals are written with shortest round-trip formatting and read back with
//! correctly rounded parsing, so a save/load cycle is bit-exact. The ±∞
//! sentinels used by degenerate levels are written as the strings `"inf"`
//! and `"-inf"`.

use std::fs;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::CalibrationConfig;
use super::surfaces::CriticalSurfaces;
use crate::grid::Grid;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            v if v.is_finite() => s.serialize_f64(v),
            v if v == f64::INFINITY => s.serialize_str("inf"),
            v if v == f64::NEG_INFINITY => s.serialize_str("-inf"),
            _ => Err(serde::ser::Error::custom("NaN cannot be stored")),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(RealVisitor)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CacheFile {
    version: u32,
    n: usize,
    k: usize,
    alpha: f64,
    eta: f64,
    replicates: usize,
    master_seed: u64,
    achieved_global_size: f64,
    lower: Vec<Vec<Real>>,
    upper: Vec<Vec<Real>>,
}

fn to_rows(g: &Grid<f64>) -> Vec<Vec<Real>> {
    g.iter_rows().map(|r| r.iter().copied().map(Real).collect()).collect()
}

fn from_rows(rows: &[Vec<Real>], name: &str) -> std::result::Result<Grid<f64>, String> {
    let plain: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v.0).collect()).collect();
    Grid::from_nested(&plain).ok_or_else(|| format!("field `{name}` has rows of unequal length"))
}

pub fn surfaces_to_json(cs: &CriticalSurfaces) -> Result<String> {
    let file = CacheFile {
        version: FORMAT_VERSION,
        n: cs.config.n,
        k: cs.config.k,
        alpha: cs.config.alpha,
        eta: cs.eta,
        replicates: cs.config.replicates,
        master_seed: cs.config.master_seed,
        achieved_global_size: cs.achieved_global_size,
        lower: to_rows(&cs.lower),
        upper: to_rows(&cs.upper),
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| Error::arg(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses and validates cache text. Errors are plain messages; the file-level
/// wrappers attach the path.
pub fn surfaces_from_json(text: &str) -> std::result::Result<CriticalSurfaces, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
    match value.get("version") {
        None => return Err("missing field `version`".into()),
        Some(v) if v.as_u64() != Some(u64::from(FORMAT_VERSION)) => {
            return Err(format!("unsupported format version {v}; this build reads version {FORMAT_VERSION}"));
        }
        Some(_) => {}
    }
    let file: CacheFile = serde_json::from_value(value).map_err(|e| format!("schema violation: {e}"))?;
    let cs = CriticalSurfaces {
        lower: from_rows(&file.lower, "lower")?,
        upper: from_rows(&file.upper, "upper")?,
        eta: file.eta,
        config: CalibrationConfig {
            n: file.n,
            k: file.k,
            alpha: file.alpha,
            replicates: file.replicates,
            master_seed: file.master_seed,
        },
        achieved_global_size: file.achieved_global_size,
    };
    cs.validate().map_err(|e| format!("invariant violation: {e}"))?;
    Ok(cs)
}

pub fn save_surfaces(cs: &CriticalSurfaces, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = surfaces_to_json(cs)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_surfaces(path: impl AsRef<Path>) -> Result<CriticalSurfaces> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    surfaces_from_json(&text).map_err(|message| Error::Cache {
        path: path.to_path_buf(),
        message,
    })
}
