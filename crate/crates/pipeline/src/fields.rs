//! Field files: 64-byte header (magic, Nx, Ny, Lx, δ, config hash prefix)
//! followed by Nx·Ny little-endian f64, row-major in the second index.
//! Every write goes to a temporary file in the target directory and is
//! renamed into place.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"VSPKFLD1";
pub const HEADER_LEN: usize = 64;
const HASH_BYTES: usize = 24;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}: not a field file")]
    Magic(String),
    #[error("{path}: expected {expected} bytes, found {found}")]
    Length { path: String, expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub nx: usize,
    pub ny: usize,
    /// Half-period of the x₁ axis in the field's own units.
    pub lx: f64,
    pub delta: f64,
    /// Leading hex digits of the config hash.
    pub hash: String,
    pub data: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ManifestEntry {
    pub file: String,
    /// "strip" (reference strip grid), "line" (surface line) or "mapped"
    /// (boundary-fitted physical grid).
    pub kind: String,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub description: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub config_hash: String,
    pub delta: f64,
    pub files: Vec<ManifestEntry>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FieldError + '_ {
    move |source| FieldError::Io { path: path.display().to_string(), source }
}

/// Write bytes to a temporary sibling, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FieldError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io_err(path))?;
    }
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| FieldError::Io { path: path.display().to_string(), source: e.error })?;
    Ok(())
}

impl FieldFile {
    pub fn new(nx: usize, ny: usize, lx: f64, delta: f64, hash: &str, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nx * ny, "field size");
        let hash: String = hash.chars().take(HASH_BYTES).collect();
        FieldFile { nx, ny, lx, delta, hash, data }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.nx as u64).to_le_bytes());
        out.extend_from_slice(&(self.ny as u64).to_le_bytes());
        out.extend_from_slice(&self.lx.to_le_bytes());
        out.extend_from_slice(&self.delta.to_le_bytes());
        let mut h = [b' '; HASH_BYTES];
        for (d, s) in h.iter_mut().zip(self.hash.bytes()) {
            *d = s;
        }
        out.extend_from_slice(&h);
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(name: &str, bytes: &[u8]) -> Result<Self, FieldError> {
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(FieldError::Magic(name.to_string()));
        }
        let word = |o: usize| <[u8; 8]>::try_from(&bytes[o..o + 8]).expect("8 bytes");
        let nx = u64::from_le_bytes(word(8)) as usize;
        let ny = u64::from_le_bytes(word(16)) as usize;
        let lx = f64::from_le_bytes(word(24));
        let delta = f64::from_le_bytes(word(32));
        let hash = String::from_utf8_lossy(&bytes[40..HEADER_LEN]).trim_end().to_string();
        let expected = HEADER_LEN + 8 * nx * ny;
        if bytes.len() != expected {
            return Err(FieldError::Length { path: name.to_string(), expected, found: bytes.len() });
        }
        let data = bytes[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Ok(FieldFile { nx, ny, lx, delta, hash, data })
    }

    pub fn write(&self, path: &Path) -> Result<(), FieldError> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn read(path: &Path) -> Result<Self, FieldError> {
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        Self::from_bytes(&path.display().to_string(), &bytes)
    }
}
