//! Reading and writing the raw dataset files.

pub mod json;
pub mod lex;
pub mod manifest;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use json::{
    parse_dataset, read_dataset, to_json_string, validate_record, write_dataset, DatasetRecord, ValidationReport,
    SURFACE_NAMES, THREE_MANIFOLD_NAMES,
};
pub use lex::{parse_lexicographical, LexEntry, LexError};
pub use manifest::{ArchiveEntry, Manifest};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("gzip stream: {0}")]
    Gzip(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("record {index}, field `{field}`: {message}")]
    SchemaViolation { index: usize, field: String, message: String },
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("checksum mismatch for {file}: expected {expected}, got {actual}")]
    ChecksumMismatch { file: String, expected: String, actual: String },
}

impl FormatError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io { path: path.to_path_buf(), source }
    }
}

/// Converts lexicographic entries to records carrying only id and facets.
pub fn records_from_lex(entries: Vec<LexEntry>) -> Result<Vec<DatasetRecord>, FormatError> {
    entries
        .into_iter()
        .enumerate()
        .map(|(index, e)| {
            let mut facets = Vec::with_capacity(e.facets.len());
            for f in e.facets {
                if f.is_empty() {
                    return Err(FormatError::SchemaViolation {
                        index,
                        field: "triangulation".into(),
                        message: "empty facet".into(),
                    });
                }
                let f = f
                    .into_iter()
                    .map(|v| u32::try_from(v).ok().filter(|&v| v > 0))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| FormatError::SchemaViolation {
                        index,
                        field: "triangulation".into(),
                        message: "vertex ids must be positive 32-bit integers".into(),
                    })?;
                facets.push(f);
            }
            let mut r = DatasetRecord::new(e.id, facets);
            r.dimension = r.inferred_dimension();
            r.n_vertices = Some(r.distinct_vertices());
            Ok(r)
        })
        .collect()
}
