//! Concept prototypes and minimum-distance semantic decoding.
//!
//! Concepts are addressed by their position in a [`ConceptSet`] (0-based).
//! Decoding picks the prototype closest to the received point; ties go to the
//! lowest index.
//!
//! `tau` is the radius of the largest distortion ball around a prototype that
//! is guaranteed to decode back to it. For any metric distortion that is half
//! the distance to the nearest competing prototype: if `d(z_j, z) < d(z_j, z_k)/2`
//! then `d(z_k, z) >= d(z_j, z_k) - d(z_j, z) > d(z_j, z)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

use crate::rng::{self, SimRng};
use crate::space::{ContextSpec, DimensionKind, SemanticPoint, SpaceSpec};
use crate::{Error, Result};

/// A concept: a named region of the space represented by its prototype.
#[derive(Debug, Clone, PartialEq)]
pub struct Concept {
    pub name: String,
    pub prototype: SemanticPoint,
    /// Optional axis-aligned box `(lo, hi)` per dimension. Metadata only;
    /// decoding uses prototypes.
    pub region: Option<Vec<(f64, f64)>>,
}

impl Concept {
    pub fn new(name: impl Into<String>, prototype: SemanticPoint) -> Self {
        Self {
            name: name.into(),
            prototype,
            region: None,
        }
    }
}

/// Concepts with their prior probabilities. The dictionary of the semantic
/// language shared by transmitter and receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptSet {
    concepts: Vec<Concept>,
    priors: Vec<f64>,
}

impl ConceptSet {
    pub fn new(space: &SpaceSpec, concepts: Vec<Concept>, priors: Vec<f64>) -> Result<Self> {
        if concepts.is_empty() {
            return Err(Error::InvalidConcepts("at least one concept is required".into()));
        }
        if priors.len() != concepts.len() {
            return Err(Error::InvalidConcepts(format!(
                "priors: expected {} values, got {}",
                concepts.len(),
                priors.len()
            )));
        }
        if priors.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidConcepts("priors: values must be nonnegative".into()));
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConcepts(format!("priors: values sum to {sum}, not 1")));
        }
        for (i, c) in concepts.iter().enumerate() {
            space
                .validate(&c.prototype)
                .map_err(|e| Error::InvalidConcepts(format!("concept `{}`: {e}", c.name)))?;
            if let Some(region) = &c.region {
                if region.len() != space.dimension_count() {
                    return Err(Error::InvalidConcepts(format!(
                        "concept `{}`: region needs {} intervals",
                        c.name,
                        space.dimension_count()
                    )));
                }
                let inside = region
                    .iter()
                    .zip(c.prototype.as_slice())
                    .all(|(&(lo, hi), &v)| lo <= hi && v >= lo && v <= hi);
                if !inside {
                    return Err(Error::InvalidConcepts(format!(
                        "concept `{}`: prototype lies outside its region",
                        c.name
                    )));
                }
            }
            for other in &concepts[..i] {
                if other.name == c.name {
                    return Err(Error::InvalidConcepts(format!("duplicate concept name `{}`", c.name)));
                }
                let d = space.distortion_unchecked(other.prototype.as_slice(), c.prototype.as_slice());
                if !(d > 0.0) {
                    return Err(Error::InvalidConcepts(format!(
                        "concepts `{}` and `{}` share a prototype",
                        other.name, c.name
                    )));
                }
            }
        }
        Ok(Self { concepts, priors })
    }

    /// Uniform priors.
    pub fn uniform(space: &SpaceSpec, concepts: Vec<Concept>) -> Result<Self> {
        let n = concepts.len().max(1);
        Self::new(space, concepts, alloc::vec![1.0 / n as f64; n])
    }

    /// The three phobia levels of the exposure-therapy scenario with uniform
    /// priors. Coordinates are (valence, arousal, height, stability).
    pub fn vret() -> Self {
        let space = SpaceSpec::vret();
        let mk = |name: &str, v: [f64; 4]| Concept::new(name, SemanticPoint::from_vec(v.to_vec()));
        Self::uniform(
            &space,
            alloc::vec![
                mk("mild", [0.375, 0.625, 0.875, 0.125]),
                mk("moderate", [0.250, 0.750, 0.500, 0.500]),
                mk("extreme", [0.125, 0.875, 0.125, 0.875]),
            ],
        )
        .expect("vret concepts are valid")
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn get(&self, j: usize) -> Result<&Concept> {
        self.concepts.get(j).ok_or(Error::UnknownConcept(j))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.concepts.iter().position(|c| c.name == name)
    }
}

/// The distortion used for decoding: plain, or weighted by a context.
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    Plain(&'a SpaceSpec),
    Contextual(&'a SpaceSpec, &'a ContextSpec),
}

impl<'a> Measure<'a> {
    pub fn new(space: &'a SpaceSpec, ctx: Option<&'a ContextSpec>) -> Self {
        match ctx {
            Some(c) => Measure::Contextual(space, c),
            None => Measure::Plain(space),
        }
    }

    pub fn space(&self) -> &'a SpaceSpec {
        match *self {
            Measure::Plain(s) | Measure::Contextual(s, _) => s,
        }
    }

    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Measure::Plain(s) => s.distortion_unchecked(a, b),
            Measure::Contextual(s, c) => c.distortion_unchecked(s, a, b),
        }
    }
}

/// Output of the minimum-distance decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeResult {
    pub index: usize,
    pub distance: f64,
    /// Distance to the second-nearest prototype minus `distance`; `+inf`
    /// with a single concept.
    pub runner_up_gap: f64,
}

/// Decoder core on raw coordinates; no validation.
#[inline]
pub fn nearest_unchecked(measure: Measure<'_>, set: &ConceptSet, z: &[f64]) -> DecodeResult {
    let mut best = (usize::MAX, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (j, c) in set.concepts.iter().enumerate() {
        let d = measure.eval(c.prototype.as_slice(), z);
        if d < best.1 {
            second = best.1;
            best = (j, d);
        } else if d < second {
            second = d;
        }
    }
    DecodeResult {
        index: best.0,
        distance: best.1,
        runner_up_gap: second - best.1,
    }
}

/// Index of the prototype closest to `z` (under `ctx` when given).
pub fn nearest_concept(
    space: &SpaceSpec,
    set: &ConceptSet,
    z: &SemanticPoint,
    ctx: Option<&ContextSpec>,
) -> Result<DecodeResult> {
    if set.is_empty() {
        return Err(Error::InvalidConcepts("empty concept set".into()));
    }
    space.validate(z)?;
    Ok(nearest_unchecked(Measure::new(space, ctx), set, z.as_slice()))
}

/// Safe decoding radius of concept `j` under an arbitrary measure.
pub fn tau_under(measure: Measure<'_>, set: &ConceptSet, j: usize) -> Result<f64> {
    let center = set.get(j)?.prototype.as_slice();
    let nearest = set
        .concepts
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, c)| measure.eval(center, c.prototype.as_slice()))
        .fold(f64::INFINITY, f64::min);
    Ok(0.5 * nearest)
}

/// Half the distortion from prototype `j` to its nearest competitor; `+inf`
/// when the set has a single concept.
pub fn tau(space: &SpaceSpec, set: &ConceptSet, j: usize) -> Result<f64> {
    tau_under(Measure::Plain(space), set, j)
}

/// `tau` for every concept, in order.
pub fn taus(space: &SpaceSpec, set: &ConceptSet) -> Vec<f64> {
    (0..set.len())
        .map(|j| tau(space, set, j).expect("index in range"))
        .collect()
}

/// Uniform sampler over `{z in space : d(center, z) <= radius}` by rejection
/// from the ball's bounding box.
#[derive(Debug, Clone)]
pub struct BallSampler<'a> {
    space: &'a SpaceSpec,
    center: &'a [f64],
    radius: f64,
    /// Per-dimension `(lo, hi)` of the proposal box, before folding.
    bounds: Vec<(f64, f64)>,
    drawn: u64,
    accepted: u64,
}

const MIN_ACCEPTANCE: f64 = 1e-6;
const ACCEPTANCE_CHECK: u64 = 1 << 24;

impl<'a> BallSampler<'a> {
    pub fn new(space: &'a SpaceSpec, center: &'a SemanticPoint, radius: f64) -> Result<Self> {
        space.validate(center)?;
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::OutOfRange {
                what: "ball radius",
                value: radius,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let c = center.as_slice();
        let mut bounds = Vec::with_capacity(c.len());
        for (m, dom) in space.domains().iter().enumerate() {
            let reach = dom.coordinate_reach(radius);
            for (dim, &v) in dom.dimensions.iter().zip(&c[space.domain_range(m)]) {
                let b = match dim.kind {
                    DimensionKind::Linear => ((v - reach).max(dim.lo), (v + reach).min(dim.hi)),
                    DimensionKind::Circular if 2.0 * reach >= dim.span() => (dim.lo, dim.hi),
                    DimensionKind::Circular => (v - reach, v + reach),
                };
                bounds.push(b);
            }
        }
        Ok(Self {
            space,
            center: c,
            radius,
            bounds,
            drawn: 0,
            accepted: 0,
        })
    }

    /// Proposals drawn so far.
    pub fn drawn(&self) -> u64 {
        self.drawn
    }

    pub fn sample(&mut self, rng: &mut SimRng) -> Result<SemanticPoint> {
        let mut z = alloc::vec![0.0; self.center.len()];
        self.sample_into(rng, &mut z)?;
        Ok(SemanticPoint::from_vec(z))
    }

    /// Writes one accepted sample into `out`.
    pub fn sample_into(&mut self, rng: &mut SimRng, out: &mut [f64]) -> Result<()> {
        loop {
            for ((o, &(lo, hi)), dim) in out.iter_mut().zip(&self.bounds).zip(self.space.dimensions()) {
                let u: f64 = rng.random();
                *o = dim.fold(lo + (hi - lo) * u);
            }
            self.drawn += 1;
            if self.space.distortion_unchecked(self.center, out) <= self.radius {
                self.accepted += 1;
                return Ok(());
            }
            if self.drawn.is_multiple_of(ACCEPTANCE_CHECK) {
                let rate = self.accepted as f64 / self.drawn as f64;
                if rate < MIN_ACCEPTANCE {
                    return Err(Error::DegenerateSampling { rate });
                }
            }
        }
    }
}

/// Outcome of a sampling check of the decoding radius.
#[derive(Debug, Clone, PartialEq)]
pub struct TauCheck {
    pub passed: bool,
    pub samples: u64,
    pub radius: f64,
    /// Sampled points that decoded elsewhere.
    pub violations: u64,
    /// The first violating sample, if any.
    pub witness: Option<SemanticPoint>,
}

/// Draws `n` points uniformly from the ball of radius `radius` around
/// prototype `j` and decodes each one.
pub fn verify_radius_by_sampling(
    space: &SpaceSpec,
    set: &ConceptSet,
    j: usize,
    radius: f64,
    n: u64,
    seed: u64,
) -> Result<TauCheck> {
    let center = &set.get(j)?.prototype;
    let mut sampler = BallSampler::new(space, center, radius)?;
    let mut rng = rng::substream(seed, &[j as u64]);
    let mut z = alloc::vec![0.0; space.dimension_count()];
    let mut violations = 0;
    let mut witness = None;
    for _ in 0..n {
        sampler.sample_into(&mut rng, &mut z)?;
        if nearest_unchecked(Measure::Plain(space), set, &z).index != j {
            violations += 1;
            if witness.is_none() {
                witness = Some(SemanticPoint::from_vec(z.clone()));
            }
        }
    }
    Ok(TauCheck {
        passed: violations == 0,
        samples: n,
        radius,
        violations,
        witness,
    })
}

/// Sampling oracle for [`tau`]: every point strictly inside the `tau` ball of
/// concept `j` must decode to `j`.
pub fn verify_tau_by_sampling(space: &SpaceSpec, set: &ConceptSet, j: usize, n: u64, seed: u64) -> Result<TauCheck> {
    let t = tau(space, set, j)?;
    if !t.is_finite() {
        return Err(Error::InvalidConcepts("tau is infinite for a single concept".into()));
    }
    verify_radius_by_sampling(space, set, j, t * (1.0 - 1e-9), n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{DomainMetric, DomainSpec, QualityDimension};
    use alloc::vec;

    fn vret() -> (SpaceSpec, ConceptSet) {
        (SpaceSpec::vret(), ConceptSet::vret())
    }

    fn pt(v: &[f64]) -> SemanticPoint {
        SemanticPoint::from_vec(v.to_vec())
    }

    #[test]
    fn prototype_decodes_to_itself() {
        let (s, set) = vret();
        let r = nearest_concept(&s, &set, &set.concepts()[0].prototype, None).unwrap();
        assert_eq!(r.index, 0);
        assert_eq!(r.distance, 0.0);
        assert!((r.runner_up_gap - 0.7071068).abs() < 1e-7);
        for j in 0..set.len() {
            let r = nearest_concept(&s, &set, &set.concepts()[j].prototype, None).unwrap();
            assert_eq!((r.index, r.distance), (j, 0.0));
        }
    }

    #[test]
    fn nearby_point_decodes_to_mild() {
        let (s, set) = vret();
        let r = nearest_concept(&s, &set, &pt(&[0.35, 0.65, 0.8, 0.2]), None).unwrap();
        assert_eq!(r.index, 0);
        // sqrt(0.025^2*2) + sqrt(0.075^2*2) = 0.1*sqrt(2)
        assert!((r.distance - 0.1414214).abs() < 1e-7);
    }

    #[test]
    fn midpoint_tie_goes_to_lower_index() {
        let (s, set) = vret();
        let a = set.concepts()[0].prototype.as_slice();
        let b = set.concepts()[1].prototype.as_slice();
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let r = nearest_concept(&s, &set, &pt(&mid), None).unwrap();
        assert_eq!(r.index, 0);
        assert!((r.distance - 0.3535534).abs() < 1e-7);
        assert_eq!(r.runner_up_gap, 0.0);
    }

    #[test]
    fn vret_taus() {
        let (s, set) = vret();
        for t in taus(&s, &set) {
            assert!((t - 0.5 * core::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
            assert!((t - 0.3535534).abs() < 1e-7);
        }
        assert!(matches!(tau(&s, &set, 3), Err(Error::UnknownConcept(3))));
    }

    #[test]
    fn single_concept_tau_is_infinite() {
        let s = SpaceSpec::vret();
        let set = ConceptSet::uniform(&s, vec![Concept::new("only", pt(&[0.5; 4]))]).unwrap();
        assert_eq!(tau(&s, &set, 0).unwrap(), f64::INFINITY);
        let r = nearest_concept(&s, &set, &pt(&[0.1; 4]), None).unwrap();
        assert_eq!(r.runner_up_gap, f64::INFINITY);
        assert!(verify_tau_by_sampling(&s, &set, 0, 10, 0).is_err());
    }

    #[test]
    fn two_prototypes_bisector() {
        let dom = DomainSpec::new("line", vec![QualityDimension::unit("x")], DomainMetric::Euclidean).unwrap();
        let s = SpaceSpec::new(vec![dom]).unwrap();
        let set = ConceptSet::uniform(&s, vec![Concept::new("a", pt(&[0.2])), Concept::new("b", pt(&[0.6]))]).unwrap();
        assert!((tau(&s, &set, 0).unwrap() - 0.2).abs() < 1e-15);
        assert!((tau(&s, &set, 1).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn concept_set_validation() {
        let s = SpaceSpec::vret();
        let a = Concept::new("a", pt(&[0.1, 0.2, 0.3, 0.4]));
        let b = Concept::new("b", pt(&[0.1, 0.2, 0.3, 0.4]));
        assert!(ConceptSet::uniform(&s, vec![a.clone(), b]).is_err());
        let c = Concept::new("a", pt(&[0.5, 0.2, 0.3, 0.4]));
        assert!(ConceptSet::uniform(&s, vec![a.clone(), c.clone()]).is_err());
        let d = Concept::new("d", pt(&[0.5, 0.2, 0.3, 0.4]));
        let err = ConceptSet::new(&s, vec![a.clone(), d.clone()], vec![0.5, 0.4]).unwrap_err();
        assert!(format!("{err}").contains("priors"));
        assert!(ConceptSet::new(&s, vec![a.clone(), d.clone()], vec![1.2, -0.2]).is_err());
        assert!(ConceptSet::uniform(&s, vec![]).is_err());
        let mut boxed = d.clone();
        boxed.region = Some(vec![(0.0, 0.4), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)]);
        assert!(ConceptSet::uniform(&s, vec![a, boxed]).is_err());
    }

    #[test]
    fn tau_ball_sampling_passes_and_inflated_ball_fails() {
        let (s, set) = vret();
        for j in 0..set.len() {
            let check = verify_tau_by_sampling(&s, &set, j, 100_000, 11).unwrap();
            assert!(check.passed, "concept {j}: {check:?}");
        }
        let t = tau(&s, &set, 0).unwrap();
        let check = verify_radius_by_sampling(&s, &set, 0, 1.01 * t, 1_000_000, 11).unwrap();
        assert!(!check.passed);
        let w = check.witness.unwrap();
        let d_mild = s.distortion_unchecked(set.concepts()[0].prototype.as_slice(), w.as_slice());
        assert!(d_mild > t && d_mild <= 1.01 * t);
    }

    #[test]
    fn degenerate_ball_is_reported() {
        // radius zero: box collapses to the center, which is accepted
        let (s, set) = vret();
        let mut sampler = BallSampler::new(&s, &set.concepts()[0].prototype, 0.0).unwrap();
        let mut rng = rng::seeded(0);
        let z = sampler.sample(&mut rng).unwrap();
        assert_eq!(&z, &set.concepts()[0].prototype);
    }

    #[test]
    fn salience_keeps_prototypes_fixed() {
        let (s, set) = vret();
        for w in [[0.9, 0.1], [0.3, 0.7], [0.5, 0.5]] {
            let ctx = ContextSpec::with_weights(&s, w.to_vec()).unwrap();
            for j in 0..set.len() {
                let r = nearest_concept(&s, &set, &set.concepts()[j].prototype, Some(&ctx)).unwrap();
                assert_eq!(r.index, j);
            }
        }
    }

    #[test]
    fn scale_covariance() {
        let s = SpaceSpec::vret();
        let protos = [[0.3, 0.4, 0.2, 0.1], [0.1, 0.35, 0.4, 0.3], [0.45, 0.05, 0.1, 0.4]];
        let mut rng = rng::seeded(5);
        for _ in 0..2000 {
            let q: Vec<f64> = (0..4).map(|_| 0.5 * rng.random::<f64>()).collect();
            let k = 1.0 + rng.random::<f64>();
            let mk = |f: f64| {
                ConceptSet::uniform(
                    &s,
                    protos
                        .iter()
                        .enumerate()
                        .map(|(i, p)| Concept::new(format!("c{i}"), pt(&p.map(|v| v * f))))
                        .collect(),
                )
                .unwrap()
            };
            let base = nearest_concept(&s, &mk(1.0), &pt(&q), None).unwrap();
            let qs: Vec<f64> = q.iter().map(|v| v * k).collect();
            let scaled = nearest_concept(&s, &mk(k), &pt(&qs), None).unwrap();
            if base.runner_up_gap > 1e-9 {
                assert_eq!(base.index, scaled.index);
            }
        }
    }
}
