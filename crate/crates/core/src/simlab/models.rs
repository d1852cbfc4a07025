//! Bivariate model families, registered by name.
//!
//! Each family draws one `(x, y)` pair at a time from a handful of named real
//! parameters with documented defaults and ranges. The shipped families are
//! generic shapes (regression curves with additive noise, heteroscedastic
//! scale models, latent random-effect models, a centred cluster); new ones can
//! be registered on a [`ModelRegistry`] by implementing [`ModelFamily`].

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::depcore::Sample;
use crate::rng::rng_from_seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDef {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

const fn real(name: &'static str, default: f64, min: f64, max: f64) -> ParamDef {
    ParamDef {
        name,
        default,
        min,
        max,
        integer: false,
    }
}

/// Parameter values after defaults have been filled in and ranges checked.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamValues(BTreeMap<String, f64>);

impl ParamValues {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

pub trait ModelFamily: Send + Sync {
    fn name(&self) -> &str;

    fn description(&self) -> &str;

    fn params(&self) -> &[ParamDef];

    fn draw(&self, params: &ParamValues, rng: &mut dyn RngCore) -> (f64, f64);
}

/// A named model: a family plus parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, family: impl Into<String>) -> Self {
        ModelSpec {
            name: name.into(),
            family: family.into(),
            params: BTreeMap::new(),
            seed: None,
        }
    }

    /// Shorthand for a spec named after its family.
    pub fn family(family: &str) -> Self {
        ModelSpec::new(family, family)
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }
}

/// A spec bound to its family with validated parameters.
#[derive(Clone)]
pub struct ResolvedModel {
    pub spec: ModelSpec,
    family: Arc<dyn ModelFamily>,
    values: ParamValues,
}

impl ResolvedModel {
    pub fn values(&self) -> &ParamValues {
        &self.values
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        let mut rng = rng_from_seed(seed);
        let pairs = (0..n).map(|_| self.family.draw(&self.values, &mut rng)).collect();
        Sample::new(pairs)
    }
}

#[derive(Clone)]
pub struct ModelRegistry {
    families: BTreeMap<String, Arc<dyn ModelFamily>>,
}

impl ModelRegistry {
    pub fn empty() -> Self {
        ModelRegistry {
            families: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, family: Arc<dyn ModelFamily>) {
        self.families.insert(family.name().to_string(), family);
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.keys().map(String::as_str).collect()
    }

    pub fn family(&self, name: &str) -> Result<&Arc<dyn ModelFamily>> {
        self.families.get(name).ok_or_else(|| Error::Unknown {
            kind: "model family",
            name: name.to_string(),
            options: self.names().join(", "),
        })
    }

    pub fn resolve(&self, spec: &ModelSpec) -> Result<ResolvedModel> {
        let family = self.family(&spec.family)?.clone();
        let defs = family.params();
        if let Some(bad) = spec.params.keys().find(|k| !defs.iter().any(|d| d.name == k.as_str())) {
            let valid: Vec<&str> = defs.iter().map(|d| d.name).collect();
            return Err(Error::Unknown {
                kind: "parameter",
                name: format!("{bad} (model `{}`)", spec.name),
                options: if valid.is_empty() { "none".into() } else { valid.join(", ") },
            });
        }
        let mut values = BTreeMap::new();
        for d in defs {
            let v = spec.params.get(d.name).copied().unwrap_or(d.default);
            if !v.is_finite() || v < d.min || v > d.max || (d.integer && v.fract() != 0.0) {
                return Err(Error::arg(format!(
                    "parameter `{}` of model `{}` = {v} outside [{}, {}]{}",
                    d.name,
                    spec.name,
                    d.min,
                    d.max,
                    if d.integer { " (integer)" } else { "" }
                )));
            }
            values.insert(d.name.to_string(), v);
        }
        Ok(ResolvedModel {
            spec: spec.clone(),
            family,
            values: ParamValues(values),
        })
    }

    pub fn generate(&self, spec: &ModelSpec, n: usize, seed: u64) -> Result<Sample> {
        self.resolve(spec)?.sample(n, seed)
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        let mut reg = ModelRegistry::empty();
        for family in builtin_families() {
            reg.register(family);
        }
        reg
    }
}

/// `n` pairs from `model` using the built-in registry.
pub fn generate(model: &ModelSpec, n: usize, seed: u64) -> Result<Sample> {
    ModelRegistry::default().generate(model, n, seed)
}

fn normal(rng: &mut dyn RngCore) -> f64 {
    StandardNormal.sample(rng)
}

type DrawFn = fn(&ParamValues, &mut dyn RngCore) -> (f64, f64);

struct Builtin {
    name: &'static str,
    description: &'static str,
    params: Vec<ParamDef>,
    draw: DrawFn,
}

impl ModelFamily for Builtin {
    fn name(&self) -> &str {
        self.name
    }

    fn description(&self) -> &str {
        self.description
    }

    fn params(&self) -> &[ParamDef] {
        &self.params
    }

    fn draw(&self, params: &ParamValues, rng: &mut dyn RngCore) -> (f64, f64) {
        (self.draw)(params, rng)
    }
}

const NOISE_MAX: f64 = 1e6;

fn builtin_families() -> Vec<Arc<dyn ModelFamily>> {
    let families = [
        Builtin {
            name: "independent-uniform",
            description: "x, y independent U(0, 1)",
            params: vec![],
            draw: |_, rng| (rng.random(), rng.random()),
        },
        Builtin {
            name: "linear",
            description: "x ~ U(0, 1), y = x + noise·ε",
            params: vec![real("noise", 0.3, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let x: f64 = rng.random();
                (x, x + p.get("noise") * normal(rng))
            },
        },
        Builtin {
            name: "root",
            description: "x ~ U(0, 1), y = √x + noise·ε",
            params: vec![real("noise", 0.3, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let x: f64 = rng.random();
                (x, x.sqrt() + p.get("noise") * normal(rng))
            },
        },
        Builtin {
            name: "step",
            description: "x ~ U(0, 1), y = ⌊steps·x⌋/steps + noise·ε",
            params: vec![
                ParamDef {
                    name: "steps",
                    default: 4.0,
                    min: 1.0,
                    max: 1000.0,
                    integer: true,
                },
                real("noise", 0.3, 0.0, NOISE_MAX),
            ],
            draw: |p, rng| {
                let x: f64 = rng.random();
                let steps = p.get("steps");
                (x, (steps * x).floor() / steps + p.get("noise") * normal(rng))
            },
        },
        Builtin {
            name: "logarithmic",
            description: "x ~ U(0, 1), y = ln x + noise·ε",
            params: vec![real("noise", 1.0, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let x: f64 = Open01.sample(rng);
                (x, x.ln() + p.get("noise") * normal(rng))
            },
        },
        Builtin {
            name: "w-shaped",
            description: "x ~ U(-1, 1), y = ||x| - 1/2| + noise·ε (uncorrelated, dependent)",
            params: vec![real("noise", 0.1, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let x: f64 = rng.random_range(-1.0..1.0);
                (x, (x.abs() - 0.5).abs() + p.get("noise") * normal(rng))
            },
        },
        Builtin {
            name: "hetero-linear",
            description: "x ~ U(0, 1), y = slope·x + noise·x·ε",
            params: vec![real("slope", 1.0, -NOISE_MAX, NOISE_MAX), real("noise", 0.5, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let x: f64 = rng.random();
                (x, p.get("slope") * x + p.get("noise") * x * normal(rng))
            },
        },
        Builtin {
            name: "hetero-reciprocal",
            description: "x ~ U(0, 1), y = ε / (1 + scale·x)",
            params: vec![real("scale", 5.0, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let x: f64 = rng.random();
                (x, normal(rng) / (1.0 + p.get("scale") * x))
            },
        },
        Builtin {
            name: "re-linear",
            description: "latent Z ~ N(0, 1); x = Z + noise·ε₁, y = Z + noise·ε₂",
            params: vec![real("noise", 1.0, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let z = normal(rng);
                let s = p.get("noise");
                (z + s * normal(rng), z + s * normal(rng))
            },
        },
        Builtin {
            name: "re-quadratic",
            description: "latent Z ~ N(0, 1); x = Z + noise·ε₁, y = Z² + noise·ε₂",
            params: vec![real("noise", 0.5, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let z = normal(rng);
                let s = p.get("noise");
                (z + s * normal(rng), z * z + s * normal(rng))
            },
        },
        Builtin {
            name: "re-reciprocal",
            description: "latent Z ~ N(0, 1); x = Z + noise·ε₁, y = 1/(1 + Z²) + noise·ε₂",
            params: vec![real("noise", 0.2, 0.0, NOISE_MAX)],
            draw: |p, rng| {
                let z = normal(rng);
                let s = p.get("noise");
                (z + s * normal(rng), 1.0 / (1.0 + z * z) + s * normal(rng))
            },
        },
        Builtin {
            name: "center-cluster",
            description: "with probability weight a correlated cluster at (1/2, 1/2) of scale spread, else U(0, 1)²",
            params: vec![real("weight", 0.3, 0.0, 1.0), real("spread", 0.05, 1e-9, 10.0)],
            draw: |p, rng| {
                if rng.random::<f64>() < p.get("weight") {
                    let (z1, z2) = (normal(rng), normal(rng));
                    let s = p.get("spread");
                    (0.5 + s * z1, 0.5 + s * (0.8 * z1 + 0.6 * z2))
                } else {
                    (rng.random(), rng.random())
                }
            },
        },
    ];
    families.into_iter().map(|f| Arc::new(f) as Arc<dyn ModelFamily>).collect()
}
