//! Upper bounds on the probability of semantic error.
//!
//! A decoding error for true concept `j` requires the received point to leave
//! the `tau_j` ball around the prototype. By the triangle inequality the
//! received distortion is at most `d_enc + d_ch` (encoder distortion plus the
//! distortion added by the syntactic link), so
//!
//! ```text
//! P(error) <= sum_j alpha_j P(d_enc + d_ch > tau_j)        (with priors)
//!          <= P(d_enc + d_ch > min_j tau_j)                (without priors)
//! ```
//!
//! The second form needs the encoder distortion law to be the same for every
//! concept. Both are evaluated here for exponential, Gaussian-encoder and
//! empirical distortion models. When both components are exponential the sum
//! is hypoexponential and has a closed-form survival function, which also
//! drives [`design_lambda2`].

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;
use rand_distr::{Distribution, Exp};

use crate::decode::{tau, ConceptSet};
use crate::encoders::{encode_into, sample_concept, TheoreticalEncoderConfig, BLOCK};
use crate::rng::{self, SimRng};
use crate::space::SpaceSpec;
use crate::{Error, Result};

const Z95: f64 = 1.959_963_984_540_054;

/// Law of one distortion component.
#[derive(Debug, Clone, PartialEq)]
pub enum DistortionModel {
    Exponential {
        rate: f64,
    },
    /// Distortion `d(z_j, z)` of the theoretical Gaussian encoder.
    GaussianEncoder {
        space: SpaceSpec,
        set: ConceptSet,
        config: TheoreticalEncoderConfig,
    },
    /// Resampled with replacement.
    Empirical(Vec<f64>),
}

impl DistortionModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        let m = Self::Exponential { rate };
        m.validate()?;
        Ok(m)
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        let m = Self::Empirical(samples);
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } if !(rate.is_finite() && *rate > 0.0) => Err(Error::InvalidModel(format!(
                "exponential rate must be positive, got {rate}"
            ))),
            Self::Empirical(s) if s.is_empty() => Err(Error::InvalidModel("no empirical samples".into())),
            Self::Empirical(s) if s.iter().any(|v| !(*v >= 0.0)) => {
                Err(Error::InvalidModel("empirical samples must be nonnegative".into()))
            }
            Self::GaussianEncoder { config, .. } => {
                TheoreticalEncoderConfig::new(config.sigma_e, config.clip).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// One draw of the distortion given true concept `concept`.
    pub fn sample(&self, concept: usize, rng: &mut SimRng) -> f64 {
        match self {
            Self::Exponential { rate } => Exp::new(*rate).expect("validated rate").sample(rng),
            Self::Empirical(s) => s[rand::Rng::random_range(rng, 0..s.len())],
            Self::GaussianEncoder { space, set, config } => {
                let j = concept.min(set.len() - 1);
                let proto = set.concepts()[j].prototype.as_slice();
                let mut z = [0.0f64; 16];
                if proto.len() <= z.len() {
                    let z = &mut z[..proto.len()];
                    encode_into(space, proto, config, rng, z);
                    space.distortion_unchecked(proto, z)
                } else {
                    let mut z = vec![0.0; proto.len()];
                    encode_into(space, proto, config, rng, &mut z);
                    space.distortion_unchecked(proto, &z)
                }
            }
        }
    }

    /// One draw with the concept itself drawn from the model's own priors
    /// (Gaussian encoder) or irrelevant (the other kinds).
    fn sample_any(&self, rng: &mut SimRng) -> f64 {
        match self {
            Self::GaussianEncoder { set, .. } => {
                let j = sample_concept(set, rng);
                self.sample(j, rng)
            }
            _ => self.sample(0, rng),
        }
    }
}

/// Value of a bound plus how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_value: f64,
    /// `P(d_enc + d_ch > tau_j)` per concept (a single entry for the
    /// prior-free bound).
    pub per_concept_terms: Vec<f64>,
    /// Monte Carlo draws per term; 0 for exact evaluations.
    pub sample_count: u64,
    /// 95% normal-approximation half-width; 0 for exact evaluations.
    pub confidence_halfwidth: f64,
}

fn check_taus(priors: &[f64], taus: &[f64]) -> Result<()> {
    if priors.len() != taus.len() {
        return Err(Error::LengthMismatch {
            expected: priors.len(),
            got: taus.len(),
        });
    }
    if priors.is_empty() {
        return Err(Error::InvalidConcepts("no concepts".into()));
    }
    if taus.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidModel("tau values must be nonnegative".into()));
    }
    let sum: f64 = priors.iter().sum();
    if priors.iter().any(|a| !(*a >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConcepts(format!(
            "priors must be a distribution (sum {sum})"
        )));
    }
    Ok(())
}

/// `P(E + C > t)` for independent draws from two sample sets; `sorted_c`
/// must be ascending. Exact for the product of the two empirical measures.
fn empirical_exceedance(e: &[f64], sorted_c: &[f64], t: f64) -> f64 {
    let mut count: u64 = 0;
    for &x in e {
        let below = sorted_c.partition_point(|&c| x + c <= t);
        count += (sorted_c.len() - below) as u64;
    }
    count as f64 / (e.len() as f64 * sorted_c.len() as f64)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn weighted(priors: &[f64], terms: Vec<f64>, n: u64) -> BoundReport {
    let bound_value = priors.iter().zip(&terms).map(|(a, p)| a * p).sum::<f64>().min(1.0);
    let confidence_halfwidth = if n == 0 {
        0.0
    } else {
        let var: f64 = priors
            .iter()
            .zip(&terms)
            .map(|(a, p)| a * a * p * (1.0 - p) / n as f64)
            .sum();
        Z95 * var.sqrt()
    };
    BoundReport {
        bound_value,
        per_concept_terms: terms,
        sample_count: n,
        confidence_halfwidth,
    }
}

/// Monte Carlo estimate of `P(d_enc + d_ch > t)` for concept `j`.
fn exceedance_mc(
    enc: &DistortionModel,
    ch: &DistortionModel,
    concept: Option<usize>,
    t: f64,
    n: u64,
    seed: u64,
    stream: u64,
) -> f64 {
    let mut hits = 0u64;
    for b in 0..n.div_ceil(BLOCK) {
        let mut rng = rng::substream(seed, &[stream, b]);
        for _ in 0..BLOCK.min(n - b * BLOCK) {
            let de = match concept {
                Some(j) => enc.sample(j, &mut rng),
                None => enc.sample_any(&mut rng),
            };
            let dc = ch.sample_any(&mut rng);
            if de + dc > t {
                hits += 1;
            }
        }
    }
    hits as f64 / n as f64
}

/// Prior-weighted bound by plain Monte Carlo, `n` draws per concept.
pub fn lemma1_monte_carlo(
    priors: &[f64],
    taus: &[f64],
    enc: &DistortionModel,
    ch: &DistortionModel,
    n: u64,
    seed: u64,
) -> Result<BoundReport> {
    check_taus(priors, taus)?;
    enc.validate()?;
    ch.validate()?;
    if n == 0 {
        return Err(Error::InvalidModel("need at least one sample".into()));
    }
    let terms = taus
        .iter()
        .enumerate()
        .map(|(j, &t)| exceedance_mc(enc, ch, Some(j), t, n, seed, j as u64))
        .collect();
    Ok(weighted(priors, terms, n))
}

/// Bound with priors: `sum_j alpha_j P(d_enc + d_ch > tau_j)`.
///
/// Evaluated exactly when both models are exponential (hypoexponential
/// survival) or both empirical (product of the two sample measures), and by
/// Monte Carlo with `n` draws per concept otherwise.
pub fn lemma1_bound(
    priors: &[f64],
    taus: &[f64],
    enc: &DistortionModel,
    ch: &DistortionModel,
    n: u64,
    seed: u64,
) -> Result<BoundReport> {
    check_taus(priors, taus)?;
    enc.validate()?;
    ch.validate()?;
    match (enc, ch) {
        (DistortionModel::Exponential { rate: l1 }, DistortionModel::Exponential { rate: l2 }) if l1 != l2 => {
            let terms = taus.iter().map(|&t| survival_unchecked(t, *l1, *l2)).collect();
            Ok(weighted(priors, terms, 0))
        }
        (DistortionModel::Empirical(e), DistortionModel::Empirical(c)) => {
            let c = sorted(c);
            let terms = taus.iter().map(|&t| empirical_exceedance(e, &c, t)).collect();
            Ok(weighted(priors, terms, 0))
        }
        _ => lemma1_monte_carlo(priors, taus, enc, ch, n, seed),
    }
}

/// Prior-free bound by plain Monte Carlo.
pub fn lemma2_monte_carlo(
    tau_min: f64,
    enc: &DistortionModel,
    ch: &DistortionModel,
    n: u64,
    seed: u64,
) -> Result<BoundReport> {
    check_taus(&[1.0], &[tau_min])?;
    enc.validate()?;
    ch.validate()?;
    if n == 0 {
        return Err(Error::InvalidModel("need at least one sample".into()));
    }
    let p = exceedance_mc(enc, ch, None, tau_min, n, seed, u64::MAX);
    Ok(weighted(&[1.0], vec![p], n))
}

/// Bound without priors: `P(d_enc + d_ch > tau_min)`. Same evaluation
/// routes as [`lemma1_bound`].
pub fn lemma2_bound(
    tau_min: f64,
    enc: &DistortionModel,
    ch: &DistortionModel,
    n: u64,
    seed: u64,
) -> Result<BoundReport> {
    check_taus(&[1.0], &[tau_min])?;
    enc.validate()?;
    ch.validate()?;
    match (enc, ch) {
        (DistortionModel::Exponential { rate: l1 }, DistortionModel::Exponential { rate: l2 }) if l1 != l2 => {
            Ok(weighted(&[1.0], vec![survival_unchecked(tau_min, *l1, *l2)], 0))
        }
        (DistortionModel::Empirical(e), DistortionModel::Empirical(c)) => {
            let c = sorted(c);
            Ok(weighted(&[1.0], vec![empirical_exceedance(e, &c, tau_min)], 0))
        }
        _ => lemma2_monte_carlo(tau_min, enc, ch, n, seed),
    }
}

/// Taus of a concept set, for feeding the bounds.
pub fn concept_taus(space: &SpaceSpec, set: &ConceptSet) -> Vec<f64> {
    (0..set.len()).map(|j| tau(space, set, j).expect("in range")).collect()
}

fn check_rates(l1: f64, l2: f64) -> Result<()> {
    for (what, l) in [("lambda1", l1), ("lambda2", l2)] {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::OutOfRange {
                what,
                value: l,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
    }
    if l1 == l2 {
        return Err(Error::EqualRates(l1));
    }
    Ok(())
}

/// `(1 - e^{-u}) / u`, continuous at 0.
#[inline]
fn one_minus_exp_over(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        -libm::expm1(-u) / u
    }
}

/// Survival of `Exp(l1) + Exp(l2)`, stable as `l2 -> l1` (the Erlang limit
/// is returned at equality).
pub(crate) fn survival_unchecked(t: f64, l1: f64, l2: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    if t <= 0.0 {
        return 1.0;
    }
    let (a, b) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    // (b e^{-a t} - a e^{-b t}) / (b - a) = e^{-a t} (1 + a t (1 - e^{-(b-a)t}) / ((b-a)t))
    libm::exp(-a * t) * (1.0 + a * t * one_minus_exp_over((b - a) * t))
}

/// Density of the sum of independent `Exp(l1)` and `Exp(l2)` variables,
/// `l1 l2 / (l2 - l1) * (e^{-l1 x} - e^{-l2 x})`.
pub fn hypoexp_pdf(x: f64, l1: f64, l2: f64) -> Result<f64> {
    check_rates(l1, l2)?;
    if !(x >= 0.0) {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let (a, b) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
    Ok(a * b * x * libm::exp(-a * x) * one_minus_exp_over((b - a) * x))
}

/// `P(Exp(l1) + Exp(l2) > t) = (l2 e^{-l1 t} - l1 e^{-l2 t}) / (l2 - l1)`.
pub fn hypoexp_survival(t: f64, l1: f64, l2: f64) -> Result<f64> {
    check_rates(l1, l2)?;
    if !(t >= 0.0) {
        return Err(Error::OutOfRange {
            what: "tau",
            value: t,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(survival_unchecked(t, l1, l2))
}

/// Limit of the prior-weighted hypoexponential bound as the channel rate
/// goes to infinity: `sum_j alpha_j e^{-l1 tau_j}`.
pub fn design_floor(priors: &[f64], taus: &[f64], l1: f64) -> f64 {
    priors
        .iter()
        .zip(taus)
        .map(|(a, &t)| if t.is_infinite() { 0.0 } else { a * libm::exp(-l1 * t) })
        .sum()
}

fn prior_weighted_survival(priors: &[f64], taus: &[f64], l1: f64, l2: f64) -> f64 {
    priors
        .iter()
        .zip(taus)
        .map(|(a, &t)| a * survival_unchecked(t, l1, l2))
        .sum()
}

/// Channel-distortion rate `l2` at which the prior-weighted bound with an
/// `Exp(l1)` encoder equals `target`. Any larger rate meets the target.
pub fn design_lambda2(priors: &[f64], taus: &[f64], l1: f64, target: f64) -> Result<f64> {
    check_taus(priors, taus)?;
    if !(l1.is_finite() && l1 > 0.0) {
        return Err(Error::OutOfRange {
            what: "lambda1",
            value: l1,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if !(target < 1.0) {
        return Err(Error::TrivialTarget(target));
    }
    let floor = design_floor(priors, taus, l1);
    if !(target > floor) {
        return Err(Error::Infeasible { target, floor });
    }
    let f = |l2: f64| prior_weighted_survival(priors, taus, l1, l2) - target;

    // the bound falls from its supremum (l2 -> 0) to the floor (l2 -> inf)
    let mut lo = l1;
    while f(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::TrivialTarget(target));
        }
    }
    let mut hi = l1;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Infeasible { target, floor });
        }
    }
    for _ in 0..2000 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.abs() <= 1e-14 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(lo).abs() < f(hi).abs() { lo } else { hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIORS: [f64; 3] = [0.5, 0.25, 0.25];
    const TAUS: [f64; 3] = [3.0, 2.0, 1.0];

    #[test]
    fn pdf_examples() {
        assert_eq!(hypoexp_pdf(0.0, 2.0, 1.0).unwrap(), 0.0);
        // 2 (e^-1 - e^-2); mpmath: 0.465088315869659259403
        let v = hypoexp_pdf(1.0, 2.0, 1.0).unwrap();
        assert!((v - 0.46508831586965926).abs() < 1e-15, "{v}");
        assert!(matches!(hypoexp_pdf(1.0, 2.0, 2.0), Err(Error::EqualRates(_))));
        assert!(hypoexp_pdf(-1.0, 2.0, 1.0).is_err());
        assert!(hypoexp_pdf(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn survival_examples() {
        assert_eq!(hypoexp_survival(0.0, 2.0, 1.5).unwrap(), 1.0);
        // mpmath: 0.0369997296229701507
        let v = hypoexp_survival(3.0, 2.0, 1.5).unwrap();
        assert!((v - 0.03699972962297015).abs() < 1e-15, "{v}");
        assert_eq!(hypoexp_survival(f64::INFINITY, 2.0, 1.5).unwrap(), 0.0);
        // symmetric in the rates
        assert_eq!(
            hypoexp_survival(0.7, 2.0, 5.0).unwrap(),
            hypoexp_survival(0.7, 5.0, 2.0).unwrap()
        );
        // naive formula agrees away from the singularity
        let (l1, l2, t) = (2.0f64, 7.0f64, 0.4f64);
        let naive = (l2 * (-l1 * t).exp() - l1 * (-l2 * t).exp()) / (l2 - l1);
        assert!((hypoexp_survival(t, l1, l2).unwrap() - naive).abs() < 1e-15);
    }

    #[test]
    fn survival_near_equal_rates_approaches_erlang() {
        let t = 1.3;
        let erlang = (-2.0 * t).exp() * (1.0 + 2.0 * t);
        let v = hypoexp_survival(t, 2.0, 2.0 + 1e-12).unwrap();
        assert!((v - erlang).abs() < 1e-11);
    }

    #[test]
    fn survival_is_monotone() {
        let mut prev = 1.0;
        for i in 1..200 {
            let v = hypoexp_survival(i as f64 * 0.05, 2.0, 1.5).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = 1.0;
        for i in 1..200 {
            let v = hypoexp_survival(1.0, 2.0, 0.1 * i as f64 + 0.05).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = 1.0;
        for i in 1..200 {
            let v = hypoexp_survival(1.0, 0.1 * i as f64 + 0.05, 3.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn lemma1_closed_form() {
        let enc = DistortionModel::exponential(2.0).unwrap();
        let ch = DistortionModel::exponential(1.5).unwrap();
        let r = lemma1_bound(&PRIORS, &TAUS, &enc, &ch, 1, 0).unwrap();
        // mpmath: 0.176178901733768693
        assert!((r.bound_value - 0.1761789017337687).abs() < 1e-15, "{}", r.bound_value);
        assert_eq!(r.sample_count, 0);
        let recombined: f64 = PRIORS.iter().zip(&r.per_concept_terms).map(|(a, p)| a * p).sum();
        assert!((recombined - r.bound_value).abs() < 1e-12);
        let inf = [f64::INFINITY; 3];
        assert_eq!(lemma1_bound(&PRIORS, &inf, &enc, &ch, 1, 0).unwrap().bound_value, 0.0);
    }

    #[test]
    fn lemma1_monte_carlo_matches_closed_form() {
        let enc = DistortionModel::exponential(2.0).unwrap();
        let ch = DistortionModel::exponential(1.5).unwrap();
        let exact = lemma1_bound(&PRIORS, &TAUS, &enc, &ch, 1, 0).unwrap().bound_value;
        let mc = lemma1_monte_carlo(&PRIORS, &TAUS, &enc, &ch, 200_000, 3).unwrap();
        assert!(
            (mc.bound_value - exact).abs() < 1.5 * mc.confidence_halfwidth,
            "{mc:?} vs {exact}"
        );
    }

    #[test]
    fn point_masses_at_zero() {
        let zero = DistortionModel::empirical(vec![0.0]).unwrap();
        let r = lemma1_bound(&PRIORS, &TAUS, &zero, &zero, 100, 0).unwrap();
        assert_eq!(r.bound_value, 0.0);
        let big = DistortionModel::empirical(vec![5.0, 5.0]).unwrap();
        assert_eq!(
            lemma1_bound(&PRIORS, &TAUS, &big, &zero, 100, 0).unwrap().bound_value,
            1.0
        );
        assert!(DistortionModel::empirical(vec![]).is_err());
        assert!(DistortionModel::empirical(vec![-0.1]).is_err());
        assert!(DistortionModel::exponential(0.0).is_err());
    }

    #[test]
    fn empirical_exact_matches_monte_carlo() {
        let mut rng = rng::seeded(21);
        let e: Vec<f64> = (0..500).map(|_| rand::Rng::random::<f64>(&mut rng) * 0.5).collect();
        let c: Vec<f64> = (0..700).map(|_| rand::Rng::random::<f64>(&mut rng).powi(3)).collect();
        let enc = DistortionModel::empirical(e.clone()).unwrap();
        let ch = DistortionModel::empirical(c.clone()).unwrap();
        let exact = lemma1_bound(&PRIORS, &[0.6, 0.4, 0.9], &enc, &ch, 0, 0).unwrap();
        // brute force over all pairs
        for (&t, &term) in [0.6, 0.4, 0.9].iter().zip(&exact.per_concept_terms) {
            let hits = e
                .iter()
                .flat_map(|x| c.iter().map(move |y| x + y))
                .filter(|s| *s > t)
                .count();
            assert_eq!(term, hits as f64 / (e.len() * c.len()) as f64);
        }
        let mc = lemma1_monte_carlo(&PRIORS, &[0.6, 0.4, 0.9], &enc, &ch, 200_000, 5).unwrap();
        assert!((mc.bound_value - exact.bound_value).abs() < 1.5 * mc.confidence_halfwidth);
    }

    #[test]
    fn lemma2_examples() {
        let enc = DistortionModel::exponential(2.0).unwrap();
        let ch = DistortionModel::exponential(1.0).unwrap();
        // mpmath: 0.600423599106271951
        let v = lemma2_bound(1.0, &enc, &ch, 1, 0).unwrap().bound_value;
        assert!((v - 0.600423599106272).abs() < 1e-15);
        assert_eq!(lemma2_bound(0.0, &enc, &ch, 1, 0).unwrap().bound_value, 1.0);
        let ch = DistortionModel::exponential(50.0).unwrap();
        // mpmath: 0.140974253371471554
        let v = lemma2_bound(1.0, &enc, &ch, 1, 0).unwrap().bound_value;
        assert!((v - 0.14097425337147155).abs() < 1e-15);
        assert!(v > (-2.0f64).exp());
    }

    #[test]
    fn lemma2_dominates_lemma1() {
        let cases = [(2.0, 1.5), (0.5, 3.0), (4.0, 9.0)];
        for (l1, l2) in cases {
            let enc = DistortionModel::exponential(l1).unwrap();
            let ch = DistortionModel::exponential(l2).unwrap();
            let b1 = lemma1_bound(&PRIORS, &TAUS, &enc, &ch, 1, 0).unwrap().bound_value;
            let b2 = lemma2_bound(1.0, &enc, &ch, 1, 0).unwrap().bound_value;
            assert!(b2 >= b1);
        }
    }

    #[test]
    fn gaussian_encoder_model_bound() {
        let space = SpaceSpec::vret();
        let set = ConceptSet::vret();
        let enc = DistortionModel::GaussianEncoder {
            space: space.clone(),
            set: set.clone(),
            config: TheoreticalEncoderConfig::new(0.1, false).unwrap(),
        };
        let ch = DistortionModel::empirical(vec![0.0]).unwrap();
        let taus = concept_taus(&space, &set);
        let r = lemma1_bound(set.priors(), &taus, &enc, &ch, 100_000, 1).unwrap();
        // sum of two Rayleigh(0.1) norms exceeding 0.3536; encoder floor is far smaller
        let floor = crate::encoders::encoder_floor(
            &space,
            &set,
            &TheoreticalEncoderConfig::new(0.1, false).unwrap(),
            100_000,
            2,
        )
        .unwrap();
        assert!(r.bound_value > floor);
        assert!(r.confidence_halfwidth > 0.0);
        let r2 = lemma2_bound(taus[0], &enc, &ch, 100_000, 1).unwrap();
        assert!((r2.bound_value - r.bound_value).abs() < 3.0 * r.confidence_halfwidth);
    }

    #[test]
    fn design_example_root() {
        let l2 = design_lambda2(&PRIORS, &TAUS, 2.0, 0.05).unwrap();
        // mpmath findroot: 9.66072272628498893893
        assert!((l2 - 9.660_722_726_285).abs() < 1e-9, "{l2}");
        let residual = prior_weighted_survival(&PRIORS, &TAUS, 2.0, l2) - 0.05;
        assert!(residual.abs() <= 1e-10);
        // the commonly quoted 1.5 gives a much larger error probability
        assert!((prior_weighted_survival(&PRIORS, &TAUS, 2.0, 1.5) - 0.1761789017337687).abs() < 1e-15);
    }

    #[test]
    fn design_infeasible_and_trivial() {
        match design_lambda2(&PRIORS, &TAUS, 2.0, 0.039) {
            Err(Error::Infeasible { floor, .. }) => {
                // mpmath: 0.0396521066196698973
                assert!((floor - 0.0396521066196699).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            design_lambda2(&PRIORS, &TAUS, 2.0, 1.0),
            Err(Error::TrivialTarget(_))
        ));
    }

    #[test]
    fn design_single_concept_near_floor() {
        let target = (-2.0f64).exp() + 1e-7;
        let l2 = design_lambda2(&[1.0], &[1.0], 2.0, target).unwrap();
        assert!(l2 > 1e5);
        let s = hypoexp_survival(1.0, 2.0, l2).unwrap();
        assert!((s - target).abs() <= 1e-10);
    }
}
