//! Provenance headers and file writing.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Provenance {
    pub command: String,
    pub config_json: String,
    pub config_hash: String,
    pub seed: u64,
    pub timestamp: u64,
}

impl Provenance {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        let config_json = serde_json::to_string(config).expect("config serializes");
        let config_hash = format!("{:x}", Sha256::digest(config_json.as_bytes()));
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Provenance {
            command: command.into(),
            config_json,
            config_hash,
            seed: config.seed,
            timestamp,
        }
    }

    /// `#`-prefixed header lines; the timestamp sits alone on the last line.
    pub fn header(&self) -> String {
        format!(
            "# nifs {VERSION}\n# command: {}\n# config-sha256: {}\n# seed: {}\n# config: {}\n# timestamp: {}\n",
            self.command, self.config_hash, self.seed, self.config_json, self.timestamp
        )
    }

    pub fn png_text(&self) -> Vec<(String, String)> {
        vec![
            ("nifs-version".into(), VERSION.into()),
            ("command".into(), self.command.clone()),
            ("config-sha256".into(), self.config_hash.clone()),
            ("seed".into(), self.seed.to_string()),
            ("config".into(), self.config_json.clone()),
            ("timestamp".into(), self.timestamp.to_string()),
        ]
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_document(
    dir: &Path,
    name: &str,
    provenance: &Provenance,
    body: &str,
) -> Result<PathBuf, CliError> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, format!("{}{}", provenance.header(), body))
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

