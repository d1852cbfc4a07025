//! TOML model lists for power studies.
//!
//! ```toml
//! [[model]]
//! name = "w"
//! family = "w-shaped"
//! params = { noise = 0.1 }
//! ```

use std::path::Path;

use critsurf::simlab::ModelRegistry;
use critsurf::ModelSpec;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Vec<ModelSpec>,
}

/// Parses and validates every model against `registry`.
pub fn parse_models(text: &str, registry: &ModelRegistry) -> Result<Vec<ModelSpec>, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Data(format!("model config: {}", e.to_string().trim_end())))?;
    if file.model.is_empty() {
        return Err(CliError::Data("model config: `model` has no entries".into()));
    }
    let mut names = std::collections::BTreeSet::new();
    for spec in &file.model {
        if !names.insert(spec.name.as_str()) {
            return Err(CliError::Data(format!("model config: duplicate model name `{}`", spec.name)));
        }
        registry
            .resolve(spec)
            .map_err(|e| CliError::Data(format!("model config: {e}")))?;
    }
    Ok(file.model)
}

pub fn load_models(path: &Path, registry: &ModelRegistry) -> Result<Vec<ModelSpec>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_models(&text, registry).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
