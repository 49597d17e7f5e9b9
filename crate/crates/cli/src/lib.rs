//! Batch front-end: runs the full analysis over an inequality file, writes
//! table-style reports, compares reports against reference values and
//! groups equivalent inequalities.

pub mod analyze;
pub mod canon;
pub mod compare;
pub mod report;

use std::path::{Path, PathBuf};

use bellcg::CgTable;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: bellcg::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Report { path: PathBuf, msg: String },
}

/// Reads and parses an inequality file.
pub fn read_tables(path: &Path) -> Result<Vec<CgTable>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    bellcg::format::parse_file(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}
