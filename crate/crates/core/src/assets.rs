//! Checksummed asset directory.
//!
//! Layout: `{root}/{doc}/{elem}.{ext}` with a `{file}.sha256` sidecar holding
//! the lowercase hex SHA-256 of the file. Writes go through a temporary file
//! and a rename so readers never see a partial asset.

use std::io::Write;
use std::path::{Component, Path, PathBuf};

use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum AssetError {
    #[error("invalid asset path '{0}'")]
    InvalidPath(String),
    #[error("asset '{0}' does not exist")]
    Missing(String),
    #[error("asset '{path}' has checksum {actual}, expected {expected}")]
    ChecksumMismatch {
        path: String,
        expected: String,
        actual: String,
    },
    #[error("asset i/o on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A single path segment: ASCII letters, digits, `_`, `-`, `.`, not
/// starting with a dot.
pub fn is_safe_segment(segment: &str) -> bool {
    !segment.is_empty()
        && !segment.starts_with('.')
        && segment
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

#[derive(Debug, Clone)]
pub struct AssetStore {
    root: PathBuf,
}

impl AssetStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        AssetStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// `{doc}/{elem}.{ext}`.
    pub fn relative_path(doc: &str, elem: &str, ext: &str) -> Result<String, AssetError> {
        let rel = format!("{doc}/{elem}.{ext}");
        if !is_safe_segment(doc) || !is_safe_segment(elem) || !is_safe_segment(ext) {
            return Err(AssetError::InvalidPath(rel));
        }
        Ok(rel)
    }

    /// Resolves a relative asset path, refusing anything that could leave
    /// the root.
    pub fn resolve(&self, rel: &str) -> Result<PathBuf, AssetError> {
        let path = Path::new(rel);
        let ok = !rel.is_empty()
            && path.components().all(|c| match c {
                Component::Normal(s) => s.to_str().is_some_and(is_safe_segment),
                _ => false,
            });
        if !ok {
            return Err(AssetError::InvalidPath(rel.to_owned()));
        }
        Ok(self.root.join(path))
    }

    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> AssetError + '_ {
        move |source| AssetError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Writes `bytes` atomically and records the sidecar; returns the
    /// checksum.
    pub fn write(&self, rel: &str, bytes: &[u8]) -> Result<String, AssetError> {
        let path = self.resolve(rel)?;
        let dir = path.parent().expect("resolved paths have a parent");
        std::fs::create_dir_all(dir).map_err(Self::io(dir))?;
        let checksum = sha256_hex(bytes);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(Self::io(dir))?;
        tmp.write_all(bytes).map_err(Self::io(&path))?;
        tmp.persist(&path).map_err(|e| AssetError::Io {
            path: path.display().to_string(),
            source: e.error,
        })?;
        let sidecar = sidecar_path(&path);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(Self::io(dir))?;
        tmp.write_all(checksum.as_bytes()).map_err(Self::io(&sidecar))?;
        tmp.persist(&sidecar).map_err(|e| AssetError::Io {
            path: sidecar.display().to_string(),
            source: e.error,
        })?;
        Ok(checksum)
    }

    pub fn exists(&self, rel: &str) -> bool {
        self.resolve(rel).is_ok_and(|p| p.is_file())
    }

    pub fn read(&self, rel: &str) -> Result<Vec<u8>, AssetError> {
        let path = self.resolve(rel)?;
        if !path.is_file() {
            return Err(AssetError::Missing(rel.to_owned()));
        }
        std::fs::read(&path).map_err(Self::io(&path))
    }

    /// Checksum recorded in the sidecar, if any.
    pub fn recorded_checksum(&self, rel: &str) -> Option<String> {
        let path = self.resolve(rel).ok()?;
        std::fs::read_to_string(sidecar_path(&path))
            .ok()
            .map(|s| s.trim().to_owned())
    }

    /// Checksum of the file content as it is on disk now.
    pub fn actual_checksum(&self, rel: &str) -> Result<String, AssetError> {
        self.read(rel).map(|b| sha256_hex(&b))
    }

    pub fn verify(&self, rel: &str, expected: &str) -> Result<(), AssetError> {
        let actual = self.actual_checksum(rel)?;
        if !actual.eq_ignore_ascii_case(expected) {
            return Err(AssetError::ChecksumMismatch {
                path: rel.to_owned(),
                expected: expected.to_owned(),
                actual,
            });
        }
        Ok(())
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().expect("asset file name").to_os_string();
    name.push(".sha256");
    path.with_file_name(name)
}
