//! Synthetic data models and the empirical power harness.

mod models;
mod power;

pub use models::{generate, ModelFamily, ModelRegistry, ModelSpec, ParamDef, ParamValues, ResolvedModel};
pub use power::{empirical_power, empirical_power_with, CriticalSurfaceTest, IndependenceTest, PowerResult};
