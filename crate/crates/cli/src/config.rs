//! Optional TOML configuration. Command-line flags (and their environment
//! variables) override file values, which override built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub block_size: Option<usize>,
    pub alpha: Option<f64>,
    pub shrinkage: Option<f64>,
    pub method: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub bandwidth: Option<f64>,
    pub output_bandwidth: Option<f64>,
    pub response: Option<Vec<String>>,
    pub ids: Option<Vec<String>>,
    pub classes: Option<usize>,
    pub scenarios: Option<Vec<String>>,
    pub methods: Option<Vec<String>>,
    pub sample_sizes: Option<Vec<usize>>,
    pub block_sizes: Option<Vec<usize>>,
    pub trials: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let c: FileConfig = toml::from_str("k = 5\nblock_size = 20\nmethod = \"split\"\n").unwrap();
        assert_eq!(c.k, Some(5));
        assert_eq!(c.block_size, Some(20));
        assert_eq!(c.method.as_deref(), Some("split"));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("kk = 5\n").is_err());
    }
}
