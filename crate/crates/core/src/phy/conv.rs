//! Rate-1/2, constraint-length-7 convolutional code (generators 133 and 171
//! octal, as in IEEE 802.11) with a Viterbi decoder over the terminated
//! trellis.
//!
//! Encoder state: the previous six input bits, most recent in bit 5. The
//! input bit sits in bit 6 of the 7-bit register the generators tap.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const GENERATORS: [u32; 2] = [0o133, 0o171];
pub const TAIL_BITS: usize = 6;
pub const CODE_RATE: f64 = 0.5;

const STATES: usize = 64;

#[inline]
fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Output dibit (g0 bit in bit 1, g1 bit in bit 0) for input `bit` from `state`.
#[inline]
fn output(state: usize, bit: usize) -> usize {
    let reg = ((bit << 6) | state) as u32;
    ((parity(reg & GENERATORS[0]) << 1) | parity(reg & GENERATORS[1])) as usize
}

/// Encodes `bits` (one bit per byte) and flushes with six zeros.
/// Output length is `2 * (bits.len() + 6)`.
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * (bits.len() + TAIL_BITS));
    let mut state = 0usize;
    for &b in bits.iter().chain([0u8; TAIL_BITS].iter()) {
        let b = (b & 1) as usize;
        let o = output(state, b);
        out.push((o >> 1) as u8);
        out.push((o & 1) as u8);
        state = (b << 5) | (state >> 1);
    }
    out
}

struct Trellis {
    /// For next state `ns` and predecessor choice `x`: the dibit emitted.
    out: [[usize; 2]; STATES],
}

impl Trellis {
    const fn new() -> Self {
        let mut out = [[0usize; 2]; STATES];
        let mut ns = 0;
        while ns < STATES {
            let mut x = 0;
            while x < 2 {
                let ps = ((ns << 1) & (STATES - 1)) | x;
                let reg = (((ns >> 5) << 6) | ps) as u32;
                let a = ((reg & GENERATORS[0]).count_ones() & 1) as usize;
                let b = ((reg & GENERATORS[1]).count_ones() & 1) as usize;
                out[ns][x] = (a << 1) | b;
                x += 1;
            }
            ns += 1;
        }
        Self { out }
    }
}

static TRELLIS: Trellis = Trellis::new();

/// Add-compare-select over all steps; `branch(t)` gives the cost of each
/// possible dibit at step `t`. Returns the decoded input bits, tail removed.
fn viterbi_core(steps: usize, mut branch: impl FnMut(usize) -> [f32; 4]) -> Vec<u8> {
    let mut metric = [f32::INFINITY; STATES];
    metric[0] = 0.0;
    let mut next = [0f32; STATES];
    let mut survivors: Vec<u64> = vec![0; steps];
    for (t, surv) in survivors.iter_mut().enumerate() {
        let bm = branch(t);
        let mut word = 0u64;
        let mut best = f32::INFINITY;
        for (ns, slot) in next.iter_mut().enumerate() {
            let ps0 = (ns << 1) & (STATES - 1);
            let [o0, o1] = TRELLIS.out[ns];
            let m0 = metric[ps0] + bm[o0];
            let m1 = metric[ps0 | 1] + bm[o1];
            let pick1 = m1 < m0;
            let m = if pick1 { m1 } else { m0 };
            word |= (pick1 as u64) << ns;
            *slot = m;
            best = best.min(m);
        }
        // keep metrics small so f32 stays exact for hard decisions
        for (m, n) in metric.iter_mut().zip(&next) {
            *m = n - best;
        }
        *surv = word;
    }
    let mut bits = vec![0u8; steps];
    let mut state = 0usize;
    for t in (0..steps).rev() {
        bits[t] = (state >> 5) as u8;
        let x = ((survivors[t] >> state) & 1) as usize;
        state = ((state << 1) & (STATES - 1)) | x;
    }
    bits.truncate(steps.saturating_sub(TAIL_BITS));
    bits
}

fn steps_for(len: usize) -> Result<usize> {
    if !len.is_multiple_of(2) || len < 2 * TAIL_BITS {
        let expected = (len / 2).max(TAIL_BITS) * 2;
        return Err(Error::LengthMismatch { expected, got: len });
    }
    Ok(len / 2)
}

/// Hard-decision Viterbi decoding of a terminated codeword (one bit per
/// byte). Returns `coded.len() / 2 - 6` payload bits.
pub fn viterbi_decode(coded: &[u8]) -> Result<Vec<u8>> {
    let steps = steps_for(coded.len())?;
    Ok(viterbi_core(steps, |t| {
        let r = ((coded[2 * t] & 1) << 1 | (coded[2 * t + 1] & 1)) as usize;
        let mut bm = [0f32; 4];
        for (o, m) in bm.iter_mut().enumerate() {
            *m = (o ^ r).count_ones() as f32;
        }
        bm
    }))
}

/// Soft-decision Viterbi decoding from per-bit log-likelihood ratios
/// (`ln P(b=0) / P(b=1)`, positive favours 0).
pub fn viterbi_decode_soft(llr: &[f64]) -> Result<Vec<u8>> {
    let steps = steps_for(llr.len())?;
    Ok(viterbi_core(steps, |t| {
        let a = llr[2 * t] as f32;
        let b = llr[2 * t + 1] as f32;
        // cost of hypothesising bit 1 is +llr, bit 0 is -llr (up to a constant)
        [-a - b, -a + b, a - b, a + b]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn random_bits(n: usize, seed: u64) -> Vec<u8> {
        let mut r = rng::seeded(seed);
        (0..n).map(|_| r.random::<bool>() as u8).collect()
    }

    #[test]
    fn zeros_encode_to_zeros() {
        let c = conv_encode(&[0; 640]);
        assert_eq!(c.len(), 2 * 646);
        assert!(c.iter().all(|&b| b == 0));
    }

    #[test]
    fn impulse_response() {
        let mut x = vec![0u8; 10];
        x[0] = 1;
        let c = conv_encode(&x);
        assert_eq!(&c[..2], &[1, 1]);
        // generator taps read newest-first: 133 = 1011011, 171 = 1111001
        let g0: Vec<u8> = c.iter().step_by(2).take(7).copied().collect();
        let g1: Vec<u8> = c.iter().skip(1).step_by(2).take(7).copied().collect();
        assert_eq!(g0, vec![1, 0, 1, 1, 0, 1, 1]);
        assert_eq!(g1, vec![1, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn encoder_is_linear() {
        let a = random_bits(200, 1);
        let b = random_bits(200, 2);
        let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = conv_encode(&a);
        let cb = conv_encode(&b);
        let cab: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        assert_eq!(conv_encode(&ab), cab);
    }

    #[test]
    fn clean_round_trip() {
        for seed in 0..20 {
            let x = random_bits(640, seed);
            assert_eq!(viterbi_decode(&conv_encode(&x)).unwrap(), x);
        }
    }

    #[test]
    fn corrects_single_flips() {
        let mut r = rng::seeded(77);
        for trial in 0..1000 {
            let x = random_bits(640, 1000 + trial);
            let mut c = conv_encode(&x);
            let pos = r.random_range(0..c.len());
            c[pos] ^= 1;
            assert_eq!(viterbi_decode(&c).unwrap(), x, "trial {trial} pos {pos}");
        }
    }

    #[test]
    fn corrects_spread_double_flips() {
        let x = random_bits(640, 5);
        let mut c = conv_encode(&x);
        c[100] ^= 1;
        c[900] ^= 1;
        assert_eq!(viterbi_decode(&c).unwrap(), x);
    }

    #[test]
    fn soft_round_trip() {
        let x = random_bits(300, 9);
        let llr: Vec<f64> = conv_encode(&x)
            .iter()
            .map(|&b| if b == 0 { 2.0 } else { -2.0 })
            .collect();
        assert_eq!(viterbi_decode_soft(&llr).unwrap(), x);
    }

    #[test]
    fn length_errors() {
        assert!(viterbi_decode(&[0; 11]).is_err());
        assert!(viterbi_decode(&[0; 10]).is_err());
        assert_eq!(viterbi_decode(&[0; 12]).unwrap().len(), 0);
    }
}
