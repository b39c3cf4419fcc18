//! Command-line front end for `geotherm`: configuration parsing, sweeps with
//! CSV and JSON output, built-in presets and the verification suite.

pub mod config;
pub mod presets;
pub mod run;
pub mod show;
pub mod verify;

use std::fs;
use std::path::Path;

use geotherm::analysis::AnalysisError;
use geotherm::geometry::GeometryError;
use geotherm::models::ModelError;
use thiserror::Error;

pub use config::{parse_config, ConfigError, RunSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("verdict failed: {0}")]
    Verdict(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Verdict(_) | CliError::Verification(_) => 3,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InvalidSweep(m) => ConfigError { location: "sweep".into(), reason: m }.into(),
            AnalysisError::Model(ModelError::InvalidParameter(m)) => ConfigError { location: "model".into(), reason: m }.into(),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        AnalysisError::from(e).into()
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// A preset name or a path to a config file.
pub fn load_spec(arg: &str) -> Result<RunSpec, CliError> {
    if let Some(p) = presets::find(arg) {
        return Ok(parse_config(p.config)?);
    }
    let path = Path::new(arg);
    let text = fs::read_to_string(path).map_err(|e| ConfigError {
        location: arg.to_string(),
        reason: format!("not a preset and not a readable file ({e})"),
    })?;
    Ok(parse_config(&text)?)
}
