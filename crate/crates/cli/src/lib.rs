//! Command implementations behind the `qage` binary: scenario ingestion,
//! experiment execution, table/plot emission, and the `verify` invariant
//! suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod report;
pub mod scenario;
pub mod verify;

use std::path::PathBuf;

pub use commands::{cmd_age_spectrum, cmd_evolve, cmd_lyapunov};
pub use config::ScenarioConfig;
pub use report::RunReport;
pub use verify::run_verify;

/// Exit codes: 0 pass, 1 config/validation error, 2 numeric check failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] config::ConfigError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    /// Core-library rejections of already-validated inputs are config-level
    /// problems surfaced late (e.g. a time list the library refuses).
    pub fn numeric(e: qage::Error) -> Self {
        CliError::Config(config::ConfigError(e.to_string()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

/// Shared CLI flags and their merge into the scenario config.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<config::TableFormat>,
    pub plot: bool,
    pub seed: u64,
    pub tolerance_scale: f64,
}

impl Invocation {
    /// Loads the config file (or the built-in default scenario), applies
    /// flag overrides, and validates.
    pub fn resolve(&self) -> Result<(ScenarioConfig, PathBuf), CliError> {
        let mut config = match &self.config_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str::<ScenarioConfig>(&text)
                    .map_err(|e| config::ConfigError(format!("{}: {e}", path.display())))?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(dir) = &self.out_dir {
            config.outputs.dir = dir.display().to_string();
        }
        if let Some(format) = self.format {
            config.outputs.format = format;
        }
        if self.plot {
            config.outputs.plot = true;
        }
        if !(self.tolerance_scale.is_finite() && self.tolerance_scale > 0.0) {
            return Err(config::ConfigError(format!(
                "--tolerance-scale must be positive and finite, got {}",
                self.tolerance_scale
            ))
            .into());
        }
        config.validate()?;
        let dir = PathBuf::from(&config.outputs.dir);
        Ok((config, dir))
    }
}
