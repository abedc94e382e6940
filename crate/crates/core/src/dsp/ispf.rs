//! ISPF: little-endian binary container for per-frame float32 features.
//!
//! ```text
//! "ISPF" | u32 version | f64 hop_seconds | f64 start_time_s | u32 dim | u64 n_frames
//! n_frames * dim float32 values, row-major
//! ```

use std::fs;
use std::path::Path;

use super::FeatureSequence;
use crate::error::{Error, Result};

pub const ISPF_MAGIC: [u8; 4] = *b"ISPF";
pub const ISPF_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 4 + 8;

/// Decodes an ISPF byte buffer.
pub fn read_ispf(bytes: &[u8]) -> Result<FeatureSequence> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != ISPF_MAGIC {
            return Err(Error::BadMagic(bytes[..4].try_into().unwrap()));
        }
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != ISPF_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != ISPF_VERSION {
        return Err(Error::VersionMismatch {
            expected: ISPF_VERSION,
            found: version,
        });
    }
    let hop = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let start = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let dim = u32::from_le_bytes(bytes[24..28].try_into().unwrap()) as u64;
    let n_frames = u64::from_le_bytes(bytes[28..36].try_into().unwrap());

    let expected = n_frames
        .checked_mul(dim)
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_add(HEADER_LEN as u64))
        .ok_or_else(|| Error::InvalidArgument("ISPF header sizes overflow".into()))?;
    if expected != bytes.len() as u64 {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    FeatureSequence::new(hop, start, dim as usize, data)
}

/// Encodes features as ISPF (values narrowed to float32).
pub fn write_ispf(features: &FeatureSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + features.data().len() * 4);
    out.extend_from_slice(&ISPF_MAGIC);
    out.extend_from_slice(&ISPF_VERSION.to_le_bytes());
    out.extend_from_slice(&features.hop_seconds().to_le_bytes());
    out.extend_from_slice(&features.start_seconds().to_le_bytes());
    out.extend_from_slice(&(features.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(features.len() as u64).to_le_bytes());
    for &v in features.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn import_features(path: impl AsRef<Path>) -> Result<FeatureSequence> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_ispf(&bytes)
}

pub fn export_features(path: impl AsRef<Path>, features: &FeatureSequence) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_ispf(features)).map_err(|e| Error::io(path, e))
}
