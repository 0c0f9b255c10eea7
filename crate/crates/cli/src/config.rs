//! Optional JSON config file. Any flag can come from the file instead;
//! explicit flags win on conflict, and unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// Flat bag of optional settings mirroring the command-line flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub trials: Option<usize>,
    pub block_len: Option<usize>,
    pub template_seed: Option<u64>,
    pub policy: Option<String>,
    pub threshold: Option<f64>,
    pub calib_samples: Option<usize>,
    pub calib_quantile: Option<f64>,
    pub shots: Option<usize>,
    pub n: Option<usize>,
    pub max_k: Option<usize>,
    pub entropy_k: Option<usize>,
    pub input: Option<PathBuf>,
    pub raw: Option<bool>,
    pub state: Option<String>,
    pub p: Option<f64>,
    pub family: Option<String>,
    pub axis: Option<String>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config file {}: {e}", path.display())))
    }
}

/// Flag value if given, else the config-file value.
pub fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

/// Like [`pick`] with a final default.
pub fn pick_or<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    pick(flag, file).unwrap_or(default)
}

/// The seed is mandatory everywhere: no subcommand runs with hidden
/// nondeterminism.
pub fn required_seed(flag: &Option<u64>, file: &FileConfig) -> Result<u64, CliError> {
    pick(flag, &file.seed).ok_or_else(|| {
        CliError::Usage("--seed is required (or provide \"seed\" in the config file)".into())
    })
}
