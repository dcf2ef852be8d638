use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;

use crate::space::{SemanticPoint, SpaceSpec};
use crate::{Error, Result};

/// Uniform fixed-point quantizer over each dimension's range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizerSpec {
    bits_per_dim: u32,
}

impl Default for QuantizerSpec {
    fn default() -> Self {
        Self { bits_per_dim: 8 }
    }
}

impl QuantizerSpec {
    pub fn new(bits_per_dim: u32) -> Result<Self> {
        if !(1..=16).contains(&bits_per_dim) {
            return Err(Error::InvalidConfig(format!(
                "bits_per_dim must be in 1..=16, got {bits_per_dim}"
            )));
        }
        Ok(Self { bits_per_dim })
    }

    pub fn bits_per_dim(&self) -> u32 {
        self.bits_per_dim
    }

    /// Largest code, `2^b - 1`.
    pub fn max_code(&self) -> u32 {
        (1u32 << self.bits_per_dim) - 1
    }

    /// Worst-case round-trip error on a unit-range dimension.
    pub fn max_error(&self) -> f64 {
        0.5 / self.max_code() as f64
    }

    #[inline]
    pub(crate) fn code(&self, v: f64, lo: f64, hi: f64) -> u32 {
        ((v - lo) / (hi - lo) * self.max_code() as f64).round() as u32
    }

    #[inline]
    pub(crate) fn value(&self, code: u32, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (code as f64 / self.max_code() as f64)
    }
}

/// Appends the codes of `z` to `bits`, one bit per byte, MSB first.
pub(crate) fn push_point_bits(space: &SpaceSpec, z: &[f64], q: &QuantizerSpec, bits: &mut Vec<u8>) -> Result<()> {
    if z.len() != space.dimension_count() {
        return Err(Error::PointMismatch(format!(
            "expected {} coordinates, got {}",
            space.dimension_count(),
            z.len()
        )));
    }
    for (dim, &v) in space.dimensions().zip(z) {
        if !dim.contains(v) {
            return Err(Error::OutOfRange {
                what: "quantizer input",
                value: v,
                lo: dim.lo,
                hi: dim.hi,
            });
        }
        let code = q.code(v, dim.lo, dim.hi);
        for k in (0..q.bits_per_dim).rev() {
            bits.push(((code >> k) & 1) as u8);
        }
    }
    Ok(())
}

/// Reads one point's worth of codes from `bits`.
pub(crate) fn read_point_bits(space: &SpaceSpec, bits: &[u8], q: &QuantizerSpec) -> SemanticPoint {
    let b = q.bits_per_dim as usize;
    let values = space
        .dimensions()
        .zip(bits.chunks_exact(b))
        .map(|(dim, chunk)| {
            let code = chunk.iter().fold(0u32, |acc, &bit| (acc << 1) | bit as u32);
            q.value(code, dim.lo, dim.hi)
        })
        .collect();
    SemanticPoint::from_vec(values)
}

fn pack(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << (7 - i))))
        .collect()
}

fn unpack(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1))
        .collect()
}

/// Codes of `z` as a big-endian bit stream, zero-padded to a whole byte.
/// With 8-bit quantization this is one byte per coordinate.
pub fn quantize(space: &SpaceSpec, z: &SemanticPoint, q: &QuantizerSpec) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(z.len() * q.bits_per_dim as usize);
    push_point_bits(space, z.as_slice(), q, &mut bits)?;
    Ok(pack(&bits))
}

/// Inverse of [`quantize`]: `code / (2^b - 1)` mapped onto each range.
pub fn dequantize(bytes: &[u8], q: &QuantizerSpec, space: &SpaceSpec) -> Result<SemanticPoint> {
    let needed = (space.dimension_count() * q.bits_per_dim as usize).div_ceil(8);
    if bytes.len() != needed {
        return Err(Error::LengthMismatch {
            expected: needed,
            got: bytes.len(),
        });
    }
    Ok(read_point_bits(space, &unpack(bytes), q))
}
