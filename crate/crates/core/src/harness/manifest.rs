use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::sha256_hex;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChecksum {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Provenance of one run directory. Only `timestamp_unix` differs between
/// two runs of the same command, config and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// SHA-256 of the canonical config JSON, stored next to the manifest as
    /// `config.json`.
    pub config_hash: String,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub library_version: String,
    pub files: Vec<FileChecksum>,
}

impl RunManifest {
    pub fn new(command: &str, config_hash: &str, seed: u64, files: &[(String, Vec<u8>)]) -> Self {
        let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            schema_version: 1,
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            seed,
            timestamp_unix,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            files: files
                .iter()
                .map(|(name, bytes)| FileChecksum {
                    name: name.clone(),
                    sha256: sha256_hex(bytes),
                    bytes: bytes.len() as u64,
                })
                .collect(),
        }
    }

    /// Names of files in `dir` whose checksum no longer matches.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.files {
            let bytes = std::fs::read(dir.join(&f.name))?;
            if sha256_hex(&bytes) != f.sha256 || bytes.len() as u64 != f.bytes {
                bad.push(f.name.clone());
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_match_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = vec![("a.txt".to_string(), b"abc".to_vec())];
        std::fs::write(dir.path().join("a.txt"), b"abc").unwrap();
        let m = RunManifest::new("simulate", "h", 1, &files);
        assert_eq!(
            m.files[0].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert!(m.verify(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("a.txt"), b"abd").unwrap();
        assert_eq!(m.verify(dir.path()).unwrap(), vec!["a.txt".to_string()]);
    }
}
