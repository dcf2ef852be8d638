//! Synthetic semantic encoders.
//!
//! The theoretical encoder outputs the true concept's prototype plus i.i.d.
//! Gaussian noise of standard deviation `sigma_e` per coordinate, optionally
//! folded back into the space (clamped on linear dimensions, wrapped on
//! circular ones). `sigma_e` stands in for encoder quality.

use alloc::vec;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::decode::{nearest_unchecked, tau, BallSampler, ConceptSet, Measure};
use crate::rng::{self, SimRng};
use crate::space::{SemanticPoint, SpaceSpec};
use crate::{Error, Result};

/// Samples per random substream in the block-sharded estimators.
pub(crate) const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalEncoderConfig {
    pub sigma_e: f64,
    /// Fold outputs back into the dimension ranges.
    pub clip: bool,
}

impl Default for TheoreticalEncoderConfig {
    fn default() -> Self {
        Self {
            sigma_e: 0.0,
            clip: true,
        }
    }
}

impl TheoreticalEncoderConfig {
    pub fn new(sigma_e: f64, clip: bool) -> Result<Self> {
        if !(sigma_e.is_finite() && sigma_e >= 0.0) {
            return Err(Error::OutOfRange {
                what: "sigma_e",
                value: sigma_e,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self { sigma_e, clip })
    }
}

/// Draws a concept index with probability equal to its prior.
pub fn sample_concept(set: &ConceptSet, rng: &mut SimRng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let priors = set.priors();
    for (j, &a) in priors.iter().enumerate() {
        acc += a;
        if u < acc {
            return j;
        }
    }
    // rounding left u above the last partial sum
    priors.iter().rposition(|&a| a > 0.0).unwrap_or(0)
}

/// Writes `prototype + noise` into `out`.
#[inline]
pub(crate) fn encode_into(
    space: &SpaceSpec,
    prototype: &[f64],
    cfg: &TheoreticalEncoderConfig,
    rng: &mut SimRng,
    out: &mut [f64],
) {
    for (o, &p) in out.iter_mut().zip(prototype) {
        let n: f64 = StandardNormal.sample(rng);
        *o = p + cfg.sigma_e * n;
    }
    if cfg.clip {
        for (dim, v) in space.dimensions().zip(out.iter_mut()) {
            *v = dim.fold(*v);
        }
    }
}

/// Encoder output for true concept `j`.
pub fn encode_theoretical(
    space: &SpaceSpec,
    set: &ConceptSet,
    j: usize,
    cfg: &TheoreticalEncoderConfig,
    rng: &mut SimRng,
) -> Result<SemanticPoint> {
    let proto = set.get(j)?.prototype.as_slice();
    let mut out = vec![0.0; proto.len()];
    encode_into(space, proto, cfg, rng, &mut out);
    Ok(SemanticPoint::from_vec(out))
}

/// Semantic error rate with a perfect channel, under any decoding measure.
pub fn encoder_floor_under(
    measure: Measure<'_>,
    set: &ConceptSet,
    cfg: &TheoreticalEncoderConfig,
    n: u64,
    seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("encoder floor needs at least one sample".into()));
    }
    let space = measure.space();
    let mut z = vec![0.0; space.dimension_count()];
    let mut errors = 0u64;
    let blocks = n.div_ceil(BLOCK);
    for b in 0..blocks {
        let mut rng = rng::substream(seed, &[b]);
        let count = BLOCK.min(n - b * BLOCK);
        for _ in 0..count {
            let j = sample_concept(set, &mut rng);
            encode_into(space, set.concepts()[j].prototype.as_slice(), cfg, &mut rng, &mut z);
            if nearest_unchecked(measure, set, &z).index != j {
                errors += 1;
            }
        }
    }
    Ok(errors as f64 / n as f64)
}

/// Fraction of `n` prior-weighted encodings that decode to the wrong concept
/// with no channel in between: the semantic error floor at infinite SNR.
pub fn encoder_floor(
    space: &SpaceSpec,
    set: &ConceptSet,
    cfg: &TheoreticalEncoderConfig,
    n: u64,
    seed: u64,
) -> Result<f64> {
    encoder_floor_under(Measure::Plain(space), set, cfg, n, seed)
}

/// Uniform sample from the part of the `fraction * tau` ball around
/// prototype `j` that lies inside the space. Models conceptually unambiguous
/// (fine-tuned) encoder output.
pub fn sample_in_tau_ball(
    space: &SpaceSpec,
    set: &ConceptSet,
    j: usize,
    fraction: f64,
    rng: &mut SimRng,
) -> Result<SemanticPoint> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::OutOfRange {
            what: "tau fraction",
            value: fraction,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let t = tau(space, set, j)?;
    if !t.is_finite() {
        return Err(Error::InvalidConcepts("tau is infinite for a single concept".into()));
    }
    let proto = &set.get(j)?.prototype;
    BallSampler::new(space, proto, fraction * t)?.sample(rng)
}
