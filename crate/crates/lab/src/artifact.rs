//! Atomic artifact writes with SHA-256 checksums.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ArtifactKind {
    ClassificationJson,
    BoundsJson,
    TrajectoryCsv,
    DiagnosticsJson,
    RegionCsv,
    BoundaryCsv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunArtifact {
    pub kind: ArtifactKind,
    pub path: PathBuf,
    /// Hex SHA-256 of the file contents.
    pub checksum: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to a temp file beside `path`, then renames it into place.
pub fn write_atomic(kind: ArtifactKind, path: &Path, bytes: &[u8]) -> io::Result<RunArtifact> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(RunArtifact {
        kind,
        path: path.to_path_buf(),
        checksum: sha256_hex(bytes),
    })
}

/// Writes a batch of rendered artifacts. On failure the ones already
/// written in this batch are removed again.
pub fn write_all(items: Vec<(ArtifactKind, PathBuf, Vec<u8>)>) -> io::Result<Vec<RunArtifact>> {
    let mut done: Vec<RunArtifact> = Vec::new();
    for (kind, path, bytes) in items {
        match write_atomic(kind, &path, &bytes) {
            Ok(a) => done.push(a),
            Err(e) => {
                for a in &done {
                    let _ = fs::remove_file(&a.path);
                }
                return Err(e);
            }
        }
    }
    Ok(done)
}
