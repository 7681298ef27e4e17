//! Binary feature cache.
//!
//! Layout (little-endian): magic `SPD1`, `u16` version, `u16` relaxation,
//! 34 560 `f64` values of `u` in `(p_s/10, p_e/10, direction, bin)` order,
//! 120 `f64` values of `pd`, then 288 fallback bytes (0 or 1).

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::ingest::{GridConfig, BINS_PER_OCTAVE};
use crate::spd::{Relaxation, SpdTensor, CELLS, TENSOR_LEN};

pub const MAGIC: &[u8; 4] = b"SPD1";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 8;
pub const ENCODED_LEN: usize = HEADER_LEN + (TENSOR_LEN + BINS_PER_OCTAVE) * 8 + CELLS;

pub fn encode(spd: &SpdTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(ENCODED_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spd.r.get() as u16).to_le_bytes());
    for v in spd.u.iter().chain(spd.pd.iter()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend(spd.fallback.iter().map(|&f| f as u8));
    out
}

pub fn decode(bytes: &[u8]) -> Result<SpdTensor> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("not an SPD feature file (bad magic)".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported feature file version {version}")));
    }
    if bytes.len() != ENCODED_LEN {
        return Err(Error::Format(format!(
            "feature file has {} bytes, expected {ENCODED_LEN}",
            bytes.len()
        )));
    }
    let r = u16::from_le_bytes([bytes[6], bytes[7]]);
    let r = u8::try_from(r)
        .map_err(|_| Error::Format(format!("relaxation {r} out of range")))
        .and_then(|r| Relaxation::new(r).map_err(|e| Error::Format(e.to_string())))?;

    let floats_end = HEADER_LEN + (TENSOR_LEN + BINS_PER_OCTAVE) * 8;
    let mut values = bytes[HEADER_LEN..floats_end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));
    let u: Vec<f64> = values.by_ref().take(TENSOR_LEN).collect();
    let pd: Vec<f64> = values.collect();
    let fallback = bytes[floats_end..]
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Format(format!("fallback byte {other} is not 0 or 1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpdTensor { r, u, pd, fallback })
}

pub fn write_file(path: &Path, spd: &SpdTensor) -> Result<()> {
    write_atomic(path, &encode(spd))
}

pub fn read_file(path: &Path) -> Result<SpdTensor> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Content-addressed cache key over the pitch file, tonic file, relaxation and grid.
pub fn cache_key(pitch_text: &str, tonic_text: &str, r: Relaxation, grid: &GridConfig) -> String {
    let mut h = Sha256::new();
    for part in [pitch_text.as_bytes(), b"\0", tonic_text.as_bytes(), b"\0"] {
        h.update(part);
    }
    h.update([r.get()]);
    h.update(grid.ref_freq.to_le_bytes());
    h.update(grid.conf_threshold.to_le_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Directory of content-addressed feature files.
#[derive(Debug, Clone)]
pub struct FeatureCache {
    dir: PathBuf,
}

impl FeatureCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.spd"))
    }

    /// Returns the cached tensor, or `None` if absent or unreadable.
    pub fn load(&self, key: &str) -> Option<SpdTensor> {
        read_file(&self.path_for(key)).ok()
    }

    pub fn store(&self, key: &str, spd: &SpdTensor) -> Result<()> {
        write_file(&self.path_for(key), spd)
    }
}
