//! Config document loading and flag-over-file resolution.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::output::CliError;

/// One flat JSON document; every field is optional and every command-line
/// flag overrides the field of the same name. Unknown fields are rejected
/// so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub m: Option<u32>,
    pub q: Option<u32>,
    pub delta: Option<f64>,
    pub eavesdropper: Option<bool>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub noise_std: Option<f64>,
    pub p_grid: Option<Vec<f64>>,
    pub m_grid: Option<Vec<u64>>,
    pub message: Option<usize>,
    pub observer: Option<usize>,
    pub engine: Option<String>,
    pub oracle_budget: Option<u128>,
    pub decode_budget: Option<u128>,
    pub dmin_budget: Option<u128>,
    pub dmin_pairs: Option<u64>,
}

pub fn load_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::ConfigParse {
        path: path.display().to_string(),
        source,
    })
}

/// Flag beats environment beats working directory.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("SECDOF_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// A parameter that neither the flag nor the config document supplied.
pub fn require<T>(value: Option<T>, name: &'static str) -> Result<T, CliError> {
    value.ok_or(CliError::Missing(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn missing_config_flag_yields_defaults() {
        let cfg = load_file_config(None).unwrap();
        assert!(cfg.k.is_none() && cfg.seed.is_none());
    }

    #[test]
    fn config_document_round_trips() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"k": 3, "m": 2, "p_grid": [100.0, 1e3], "seed": 7}}"#).unwrap();
        let cfg = load_file_config(Some(f.path())).unwrap();
        assert_eq!(cfg.k, Some(3));
        assert_eq!(cfg.m, Some(2));
        assert_eq!(cfg.p_grid.as_deref(), Some(&[100.0, 1000.0][..]));
        assert_eq!(cfg.seed, Some(7));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"K": 3}}"#).unwrap();
        let err = load_file_config(Some(f.path())).unwrap_err();
        assert_eq!(err.kind(), "config-parse");
    }

    #[test]
    fn missing_file_is_reported() {
        let err = load_file_config(Some(Path::new("/nonexistent/config.json"))).unwrap_err();
        assert_eq!(err.kind(), "config-parse");
    }

    #[test]
    fn require_names_the_field() {
        let err = require(None::<u32>, "seed").unwrap_err();
        assert!(err.to_string().contains("seed"));
        assert_eq!(require(Some(4), "seed").unwrap(), 4);
    }
}
