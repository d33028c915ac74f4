//! FVT1 tensor files.
//!
//! Layout: the ASCII magic `FVT1`, a little-endian `u32` rank, `rank`
//! little-endian `u32` dimensions, then `product(dims)` little-endian `f32`
//! values. There is no padding. Values are `f64` in memory and narrowed to
//! `f32` on write.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"FVT1";

/// A dense tensor as read from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_shape(&dims, &values)?;
        Ok(Tensor { dims, values })
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }
}

fn check_shape(dims: &[usize], values: &[f64]) -> Result<()> {
    let expected: usize = dims.iter().product();
    if expected != values.len() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} hold {expected} values, got {}",
            values.len()
        )));
    }
    Ok(())
}

/// Serializes a tensor to its FVT1 byte representation.
pub fn encode(dims: &[usize], values: &[f64]) -> Result<Vec<u8>> {
    check_shape(dims, values)?;
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut out = Vec::with_capacity(8 + 4 * dims.len() + 4 * values.len());
    out.extend_from_slice(&MAGIC);
    let rank = u32::try_from(dims.len())
        .map_err(|_| Error::DimensionMismatch("rank exceeds u32".into()))?;
    out.extend_from_slice(&rank.to_le_bytes());
    for &d in dims {
        let d = u32::try_from(d)
            .map_err(|_| Error::DimensionMismatch(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    for &v in values {
        let narrowed = v as f32;
        if !narrowed.is_finite() {
            return Err(Error::DimensionMismatch(format!("value {v} overflows f32")));
        }
        out.extend_from_slice(&narrowed.to_le_bytes());
    }
    Ok(out)
}

/// Parses FVT1 bytes.
pub fn decode(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < 4 {
        return Err(Error::Truncated("missing magic".into()));
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let mut cursor = 4;
    let mut next_u32 = |what: &str| -> Result<u32> {
        let chunk = bytes
            .get(cursor..cursor + 4)
            .ok_or_else(|| Error::Truncated(format!("missing {what}")))?;
        cursor += 4;
        Ok(u32::from_le_bytes(chunk.try_into().unwrap()))
    };
    let rank = next_u32("rank")? as usize;
    let dims = (0..rank)
        .map(|_| next_u32("dimension").map(|d| d as usize))
        .collect::<Result<Vec<_>>>()?;
    let header = 8 + 4 * rank;
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Truncated("dimension product overflows".into()))?;
    let payload = &bytes[header..];
    if payload.len() < count * 4 {
        return Err(Error::Truncated(format!(
            "expected {} payload bytes, found {}",
            count * 4,
            payload.len()
        )));
    }
    if payload.len() > count * 4 {
        return Err(Error::DimensionMismatch(format!(
            "{} trailing bytes after payload",
            payload.len() - count * 4
        )));
    }
    let values = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(Tensor { dims, values })
}

pub fn write_tensor(path: impl AsRef<Path>, dims: &[usize], values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(dims, values)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}
