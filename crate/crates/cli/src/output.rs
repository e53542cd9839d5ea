//! Report emission: JSON documents, RFC-4180 CSV, error envelope.

use std::collections::BTreeMap;
use std::path::Path;

use secdof_core::ChannelGains;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] secdof_core::Error),
    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    ConfigParse {
        path: String,
        source: serde_json::Error,
    },
    #[error("missing {0}; pass the flag or set the config field")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Stable machine-readable discriminator for the error envelope.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                secdof_core::Error::InvalidConfiguration(_) => "invalid-configuration",
                secdof_core::Error::InvalidArgument(_) => "invalid-argument",
                secdof_core::Error::CorruptedInput(_) => "corrupted-input",
                secdof_core::Error::BudgetExceeded { .. } => "budget-exceeded",
            },
            CliError::ConfigRead { .. } | CliError::ConfigParse { .. } => "config-parse",
            CliError::Missing(_) | CliError::Invalid(_) => "invalid-configuration",
            CliError::Write { .. } => "io",
        }
    }
}

/// Twelve significant digits, plain `.` decimal separator.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Serializes the report, writes it under `out_dir` and returns the exact
/// document text for stdout.
pub fn write_json<T: Serialize>(out_dir: &Path, name: &str, report: &T) -> Result<String, CliError> {
    let mut doc = serde_json::to_string_pretty(report).map_err(|e| CliError::Invalid(format!(
        "cannot serialize report: {e}"
    )))?;
    doc.push('\n');
    write_bytes(out_dir, name, doc.as_bytes())?;
    Ok(doc)
}

/// RFC-4180 CSV: CRLF line endings, header row first.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Invalid(format!("cannot format csv: {e}"));
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row).map_err(io_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Invalid(format!("cannot format csv: {e}")))?;
    write_bytes(out_dir, name, &bytes)
}

fn write_bytes(out_dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let as_write_err = |source: std::io::Error, path: &Path| CliError::Write {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| as_write_err(e, out_dir))?;
    let path = out_dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| as_write_err(e, &path))
}

/// Gain values keyed by their display names, for embedding in reports.
pub fn gains_map(gains: &ChannelGains) -> BTreeMap<String, f64> {
    gains
        .iter()
        .map(|(sym, value)| (sym.to_string(), *value))
        .collect()
}
