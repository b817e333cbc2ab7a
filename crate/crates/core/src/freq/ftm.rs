//! `FTM1` tensor files: an 8-byte magic, `h`, `w`, `c` as little-endian
//! `u32`, then `h·w·c` little-endian `f32` values in channel-last order.

use std::path::Path;

use super::{FeatureTensor, FreqMask};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 8] = *b"FTM1\0\0\0\0";
const HEADER_LEN: usize = 8 + 3 * 4;

pub fn encode(t: &FeatureTensor) -> Vec<u8> {
    let (h, w, c) = t.shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * t.data().len());
    out.extend_from_slice(&MAGIC);
    for dim in [h, w, c] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<FeatureTensor> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "truncated header: {} bytes, need {HEADER_LEN}",
            bytes.len()
        )));
    }
    if bytes[..8] != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &bytes[..8])));
    }
    let dim = |k: usize| {
        let at = 8 + 4 * k;
        u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize
    };
    let (h, w, c) = (dim(0), dim(1), dim(2));
    let count = h
        .checked_mul(w)
        .and_then(|v| v.checked_mul(c))
        .ok_or_else(|| Error::Format(format!("dimensions {h}x{w}x{c} overflow")))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != count * 4 {
        return Err(Error::Format(format!(
            "{h}x{w}x{c} tensor needs {} data bytes, found {}",
            count * 4,
            body.len()
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    FeatureTensor::new(h, w, c, data).map_err(|e| Error::Format(e.to_string()))
}

pub fn read(path: impl AsRef<Path>) -> Result<FeatureTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write(path: impl AsRef<Path>, t: &FeatureTensor) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode(t)).map_err(|e| Error::io(path, e))
}

/// A mask as a single-channel tensor of zeros and ones.
pub fn mask_tensor(mask: &FreqMask) -> FeatureTensor {
    let (h, w) = mask.shape();
    FeatureTensor::from_fn(h, w, 1, |i, j, _| mask.get(i, j) as u8 as f32)
        .expect("mask dimensions are non-zero")
}
