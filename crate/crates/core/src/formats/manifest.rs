//! Version manifest: version tag → archive files with download URL and an
//! optional SHA-256.
//!
//! ```json
//! {
//!   "latest": [
//!     {"file": "2_manifolds.json.gz", "url": "https://...", "sha256": "..."}
//!   ]
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::FormatError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub file: String,
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest {
    pub versions: BTreeMap<String, Vec<ArchiveEntry>>,
}

const BUILTIN: &str = r#"{
  "latest": [
    {"file": "2_manifolds.json.gz", "url": "https://github.com/aidos-lab/MANTRA/releases/latest/download/2_manifolds.json.gz"},
    {"file": "3_manifolds.json.gz", "url": "https://github.com/aidos-lab/MANTRA/releases/latest/download/3_manifolds.json.gz"}
  ]
}"#;

impl Manifest {
    /// The manifest shipped with the crate. It carries no checksums because
    /// the release assets behind `latest` change over time.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("builtin manifest parses")
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| FormatError::Manifest(e.to_string()))?;
        for (version, entries) in &m.versions {
            for e in entries {
                if e.file.is_empty() || e.file.contains(['/', '\\']) || e.file == ".." {
                    return Err(FormatError::Manifest(format!("{version}: bad file name {:?}", e.file)));
                }
                if let Some(h) = &e.sha256 {
                    if h.len() != 64 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
                        return Err(FormatError::Manifest(format!("{version}/{}: sha256 must be 64 hex digits", e.file)));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn entries(&self, version: &str) -> Result<&[ArchiveEntry], FormatError> {
        self.versions.get(version).map(Vec::as_slice).ok_or_else(|| {
            let known: Vec<&str> = self.versions.keys().map(String::as_str).collect();
            FormatError::Manifest(format!("unknown version {version:?}; known: {}", known.join(", ")))
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Checks `bytes` against the entry's checksum, if it has one.
pub fn verify_checksum(entry: &ArchiveEntry, bytes: &[u8]) -> Result<(), FormatError> {
    let Some(expected) = &entry.sha256 else { return Ok(()) };
    let actual = sha256_hex(bytes);
    if actual.eq_ignore_ascii_case(expected) {
        Ok(())
    } else {
        Err(FormatError::ChecksumMismatch { file: entry.file.clone(), expected: expected.clone(), actual })
    }
}
