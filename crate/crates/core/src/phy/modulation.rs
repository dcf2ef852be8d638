//! Gray-mapped BPSK and square QAM with unit average symbol energy.
//!
//! BPSK maps bit 0 to +1 and bit 1 to -1. For square QAM the first half of
//! each symbol's bits selects the in-phase level and the second half the
//! quadrature level; along each axis the level index is the inverse Gray
//! code of its bits, so neighbouring levels differ in one bit.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Bpsk,
    Qam16,
    Qam256,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Self::Bpsk => 1,
            Self::Qam16 => 4,
            Self::Qam256 => 8,
        }
    }

    /// Bits per axis for QAM.
    fn axis_bits(self) -> usize {
        self.bits_per_symbol() / 2
    }

    /// Distance unit that normalizes the average symbol energy to 1.
    fn scale(self) -> f64 {
        match self {
            Self::Bpsk => 1.0,
            Self::Qam16 => 1.0 / 10f64.sqrt(),
            Self::Qam256 => 1.0 / 170f64.sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Qam16 => "qam16",
            Self::Qam256 => "qam256",
        }
    }

    /// Every constellation point, indexed by its bit label (MSB = first bit).
    pub fn constellation(self) -> Vec<Complex64> {
        let k = self.bits_per_symbol();
        (0..1usize << k)
            .map(|label| {
                let bits: Vec<u8> = (0..k).rev().map(|i| ((label >> i) & 1) as u8).collect();
                self.map(&bits)
            })
            .collect()
    }

    fn map(self, bits: &[u8]) -> Complex64 {
        match self {
            Self::Bpsk => Complex64::new(if bits[0] == 0 { 1.0 } else { -1.0 }, 0.0),
            _ => {
                let k = self.axis_bits();
                Complex64::new(self.axis_level(&bits[..k]), self.axis_level(&bits[k..]))
            }
        }
    }

    fn axis_level(self, bits: &[u8]) -> f64 {
        let gray = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let index = gray_inverse(gray);
        let m = (1usize << bits.len()) as f64;
        (2.0 * index as f64 - (m - 1.0)) * self.scale()
    }

    /// Nearest level index along one axis.
    fn axis_index(self, y: f64) -> usize {
        let m = 1usize << self.axis_bits();
        let u = (y / self.scale() + (m as f64 - 1.0)) / 2.0;
        u.round().clamp(0.0, (m - 1) as f64) as usize
    }
}

fn gray_inverse(mut g: usize) -> usize {
    let mut b = g;
    while g > 1 {
        g >>= 1;
        b ^= g;
    }
    b
}

fn push_axis_bits(index: usize, k: usize, out: &mut Vec<u8>) {
    let gray = index ^ (index >> 1);
    for i in (0..k).rev() {
        out.push(((gray >> i) & 1) as u8);
    }
}

/// Maps bits (one per byte) onto symbols.
pub fn modulate(bits: &[u8], m: Modulation) -> Result<Vec<Complex64>> {
    let k = m.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::LengthMismatch {
            expected: bits.len().div_ceil(k) * k,
            got: bits.len(),
        });
    }
    Ok(bits.chunks_exact(k).map(|c| m.map(c)).collect())
}

/// Minimum-distance hard decisions. For square Gray QAM this separates into
/// independent nearest-level decisions per axis.
pub fn demodulate(symbols: &[Complex64], m: Modulation) -> Vec<u8> {
    let mut out = Vec::with_capacity(symbols.len() * m.bits_per_symbol());
    for y in symbols {
        match m {
            Modulation::Bpsk => out.push((y.re < 0.0) as u8),
            _ => {
                let k = m.axis_bits();
                push_axis_bits(m.axis_index(y.re), k, &mut out);
                push_axis_bits(m.axis_index(y.im), k, &mut out);
            }
        }
    }
    out
}

/// Max-log bit LLRs, `ln P(0)/P(1)`, given each symbol's complex noise
/// variance after equalization.
pub fn demodulate_soft(symbols: &[Complex64], noise_var: &[f64], m: Modulation) -> Vec<f64> {
    let mut out = Vec::with_capacity(symbols.len() * m.bits_per_symbol());
    for (y, &nv) in symbols.iter().zip(noise_var) {
        let nv = nv.max(1e-300);
        match m {
            Modulation::Bpsk => out.push(4.0 * y.re / nv),
            _ => {
                for v in [y.re, y.im] {
                    axis_llrs(m, v, nv, &mut out);
                }
            }
        }
    }
    out
}

fn axis_llrs(m: Modulation, y: f64, nv: f64, out: &mut Vec<f64>) {
    let k = m.axis_bits();
    let levels = 1usize << k;
    for bit in (0..k).rev() {
        let mut best = [f64::INFINITY; 2];
        for index in 0..levels {
            let gray = index ^ (index >> 1);
            let b = (gray >> bit) & 1;
            let a = (2.0 * index as f64 - (levels as f64 - 1.0)) * m.scale();
            best[b] = best[b].min((y - a) * (y - a));
        }
        // per-axis noise variance is nv / 2
        out.push(2.0 * (best[1] - best[0]) / nv);
    }
}
