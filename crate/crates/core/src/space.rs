//! Conceptual spaces and semantic distortion.
//!
//! A [`SpaceSpec`] is an ordered product of domains; each [`DomainSpec`] is an
//! ordered product of quality dimensions and carries the rule used to measure
//! distance inside it. The semantic distortion between two points is the sum
//! of the per-domain distances.
//!
//! Points are stored flat (the concatenation of the per-domain coordinate
//! vectors); the space knows where each domain starts.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;

use crate::{Error, Result};

/// Whether a quality dimension is an interval or a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionKind {
    Linear,
    /// Endpoints of the range are identified (e.g. hue).
    Circular,
}

/// A scalar quality axis with a closed range.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityDimension {
    pub name: String,
    pub kind: DimensionKind,
    pub lo: f64,
    pub hi: f64,
}

impl QualityDimension {
    pub fn new(name: impl Into<String>, kind: DimensionKind, lo: f64, hi: f64) -> Result<Self> {
        let name = name.into();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSpace(format!(
                "dimension `{name}` needs a finite range with lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { name, kind, lo, hi })
    }

    /// Linear dimension over `[0, 1]`.
    pub fn unit(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: DimensionKind::Linear,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    /// Absolute coordinate difference, wrapped for circular dimensions.
    #[inline]
    fn difference(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        match self.kind {
            DimensionKind::Linear => d,
            DimensionKind::Circular => d.min(self.span() - d),
        }
    }

    /// Maps `v` back into the range: clamps linear dimensions, wraps circular ones.
    pub fn fold(&self, v: f64) -> f64 {
        match self.kind {
            DimensionKind::Linear => v.clamp(self.lo, self.hi),
            DimensionKind::Circular => {
                let span = self.span();
                let r = num_traits::Euclid::rem_euclid(&(v - self.lo), &span);
                self.lo + r
            }
        }
    }
}

/// Distance rule inside one domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainMetric {
    /// 2-norm of the coordinate differences (circular coordinates wrap).
    Euclidean,
    /// Mean-squared color distance over (hue, saturation, brightness) with a
    /// log-sum-exp smoothed hue term of sharpness `rho`. Not a metric: the
    /// distance of a point to itself is positive.
    ColorMsel { rho: f64 },
}

/// An ordered set of integral quality dimensions sharing one distance rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub name: String,
    pub dimensions: Vec<QualityDimension>,
    pub metric: DomainMetric,
}

impl DomainSpec {
    pub fn new(name: impl Into<String>, dimensions: Vec<QualityDimension>, metric: DomainMetric) -> Result<Self> {
        let name = name.into();
        if dimensions.is_empty() {
            return Err(Error::InvalidSpace(format!("domain `{name}` has no dimensions")));
        }
        for (i, d) in dimensions.iter().enumerate() {
            if !(d.lo.is_finite() && d.hi.is_finite() && d.lo < d.hi) {
                return Err(Error::InvalidSpace(format!(
                    "dimension `{}` of domain `{name}` has invalid range",
                    d.name
                )));
            }
            if dimensions[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate dimension `{}` in domain `{name}`",
                    d.name
                )));
            }
        }
        if let DomainMetric::ColorMsel { rho } = metric {
            if !(rho > 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "domain `{name}`: color metric needs rho > 0, got {rho}"
                )));
            }
            let shape_ok = dimensions.len() == 3
                && dimensions[0].kind == DimensionKind::Circular
                && dimensions[1].kind == DimensionKind::Linear
                && dimensions[2].kind == DimensionKind::Linear
                && dimensions.iter().all(|d| d.lo == 0.0 && d.hi == 1.0);
            if !shape_ok {
                return Err(Error::InvalidSpace(format!(
                    "domain `{name}`: color metric needs (circular hue, linear saturation, \
                     linear brightness), each over [0, 1]"
                )));
            }
        }
        Ok(Self {
            name,
            dimensions,
            metric,
        })
    }

    /// Distance between two coordinate slices of this domain.
    #[inline]
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.metric {
            DomainMetric::Euclidean => {
                let mut acc = 0.0;
                for ((dim, &x), &y) in self.dimensions.iter().zip(a).zip(b) {
                    let d = dim.difference(x, y);
                    acc += d * d;
                }
                acc.sqrt()
            }
            DomainMetric::ColorMsel { rho } => color_unchecked(a, b, rho),
        }
    }

    /// Largest per-coordinate deviation, in each dimension's own units, of a
    /// point whose domain distance from the center is at most `radius`.
    pub(crate) fn coordinate_reach(&self, radius: f64) -> f64 {
        match self.metric {
            DomainMetric::Euclidean => radius,
            // every squared term is at most 3r; the smoothed hue term bounds
            // the wrapped hue difference from above
            DomainMetric::ColorMsel { .. } => (3.0 * radius).sqrt(),
        }
    }
}

/// A point of a conceptual space, stored as the concatenation of its
/// per-domain coordinate vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticPoint(Vec<f64>);

impl SemanticPoint {
    /// Wraps coordinates without checking them against any space.
    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for SemanticPoint {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// A conceptual space: the Cartesian product of one or more domains.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    domains: Vec<DomainSpec>,
    offsets: Vec<usize>,
}

impl SpaceSpec {
    pub fn new(domains: Vec<DomainSpec>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::InvalidSpace("a space needs at least one domain".to_string()));
        }
        let mut offsets = Vec::with_capacity(domains.len() + 1);
        let mut at = 0;
        for (i, d) in domains.iter().enumerate() {
            if domains[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::InvalidSpace(format!("duplicate domain `{}`", d.name)));
            }
            // re-run the domain checks in case the struct was built by hand
            DomainSpec::new(d.name.clone(), d.dimensions.clone(), d.metric)?;
            offsets.push(at);
            at += d.dimensions.len();
        }
        offsets.push(at);
        Ok(Self { domains, offsets })
    }

    /// The two-domain space of the acrophobia exposure-therapy scenario:
    /// emotion (valence, arousal) and stimulus (height, stability), all on
    /// `[0, 1]`, euclidean within each domain.
    pub fn vret() -> Self {
        let emotion = DomainSpec {
            name: "emotion".into(),
            dimensions: alloc::vec![QualityDimension::unit("valence"), QualityDimension::unit("arousal")],
            metric: DomainMetric::Euclidean,
        };
        let stimulus = DomainSpec {
            name: "stimulus".into(),
            dimensions: alloc::vec![QualityDimension::unit("height"), QualityDimension::unit("stability")],
            metric: DomainMetric::Euclidean,
        };
        Self::new(alloc::vec![emotion, stimulus]).expect("vret space is valid")
    }

    pub fn domains(&self) -> &[DomainSpec] {
        &self.domains
    }

    /// Total number of quality dimensions.
    pub fn dimension_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// All dimensions in point order.
    pub fn dimensions(&self) -> impl Iterator<Item = &QualityDimension> {
        self.domains.iter().flat_map(|d| d.dimensions.iter())
    }

    /// Coordinate range of domain `m` inside a flat point.
    pub fn domain_range(&self, m: usize) -> core::ops::Range<usize> {
        self.offsets[m]..self.offsets[m + 1]
    }

    pub fn validate(&self, z: &SemanticPoint) -> Result<()> {
        if z.len() != self.dimension_count() {
            return Err(Error::PointMismatch(format!(
                "expected {} coordinates, got {}",
                self.dimension_count(),
                z.len()
            )));
        }
        for (dim, &v) in self.dimensions().zip(z.as_slice()) {
            if !dim.contains(v) {
                return Err(Error::PointMismatch(format!(
                    "coordinate `{}` = {v} outside [{}, {}]",
                    dim.name, dim.lo, dim.hi
                )));
            }
        }
        Ok(())
    }

    /// Builds a validated point.
    pub fn point(&self, values: Vec<f64>) -> Result<SemanticPoint> {
        let z = SemanticPoint(values);
        self.validate(&z)?;
        Ok(z)
    }

    /// Semantic distortion on raw coordinate slices; no validation.
    #[inline]
    pub fn distortion_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut total = 0.0;
        for (m, dom) in self.domains.iter().enumerate() {
            let r = self.domain_range(m);
            total += dom.distance(&a[r.clone()], &b[r]);
        }
        total
    }

    /// Clamps (linear) or wraps (circular) every coordinate into range.
    pub fn fold(&self, z: &mut SemanticPoint) {
        for (dim, v) in self.dimensions().zip(z.as_mut_slice()) {
            *v = dim.fold(*v);
        }
    }
}

/// Sum over domains of the per-domain distance between `z1` and `z2`.
pub fn semantic_distortion(space: &SpaceSpec, z1: &SemanticPoint, z2: &SemanticPoint) -> Result<f64> {
    space.validate(z1)?;
    space.validate(z2)?;
    Ok(space.distortion_unchecked(z1.as_slice(), z2.as_slice()))
}

fn check_unit(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: v,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// Wraparound distance between two positions on a unit circle.
pub fn circular_distance(h: f64, h2: f64) -> Result<f64> {
    check_unit("hue", h)?;
    check_unit("hue", h2)?;
    let d = (h - h2).abs();
    Ok(d.min(1.0 - d))
}

#[inline]
fn smooth_circular_unchecked(h: f64, h2: f64, rho: f64) -> f64 {
    let a = (h - h2).abs();
    let b = 1.0 - a;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if rho.is_infinite() {
        return lo;
    }
    // -(1/rho) ln(e^{-rho a}/2 + e^{-rho b}/2), factored around the smaller term
    lo - libm::log(0.5 + 0.5 * libm::exp(-rho * (hi - lo))) / rho
}

/// Log-sum-exp smoothing of [`circular_distance`]. Lies within
/// `[min-form, min-form + ln 2 / rho]`; `rho = +inf` gives the min-form.
pub fn smooth_circular_distance(h: f64, h2: f64, rho: f64) -> Result<f64> {
    check_unit("hue", h)?;
    check_unit("hue", h2)?;
    if !(rho > 0.0) {
        return Err(Error::OutOfRange {
            what: "rho",
            value: rho,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(smooth_circular_unchecked(h, h2, rho))
}

#[inline]
fn color_unchecked(d1: &[f64], d2: &[f64], rho: f64) -> f64 {
    let g = smooth_circular_unchecked(d1[0], d2[0], rho);
    let ds = d1[1] - d2[1];
    let db = d1[2] - d2[2];
    (ds * ds + db * db + g * g) / 3.0
}

/// Mean-squared color distance over `(hue, saturation, brightness)`.
pub fn color_domain_distance(d1: [f64; 3], d2: [f64; 3], rho: f64) -> Result<f64> {
    for &v in d1.iter().chain(d2.iter()) {
        check_unit("color coordinate", v)?;
    }
    if !(rho > 0.0) {
        return Err(Error::OutOfRange {
            what: "rho",
            value: rho,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(color_unchecked(&d1, &d2, rho))
}

/// Strictly increasing piecewise-linear map of a closed interval onto itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn identity(lo: f64, hi: f64) -> Self {
        Self {
            knots: alloc::vec![(lo, lo), (hi, hi)],
        }
    }

    /// Knots `(x, y)`; both coordinates must be strictly increasing and the
    /// first and last knot must be `(lo, lo)` and `(hi, hi)`.
    pub fn new(knots: Vec<(f64, f64)>, lo: f64, hi: f64) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidContext("a transform needs at least two knots".into()));
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if first != (lo, lo) || last != (hi, hi) {
            return Err(Error::InvalidContext(format!(
                "transform must fix the endpoints ({lo}, {hi})"
            )));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
            return Err(Error::InvalidContext(
                "transform knots must be strictly increasing".into(),
            ));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn apply(&self, x: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|&(kx, _)| kx <= x).clamp(1, k.len() - 1);
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Salience weights over domains plus per-dimension sensitivity transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSpec {
    weights: Vec<f64>,
    /// Flat, in point order.
    transforms: Vec<PiecewiseLinear>,
}

impl ContextSpec {
    /// Salience-only context: identity transforms.
    pub fn with_weights(space: &SpaceSpec, weights: Vec<f64>) -> Result<Self> {
        let transforms = space
            .dimensions()
            .map(|d| PiecewiseLinear::identity(d.lo, d.hi))
            .collect();
        Self::new(space, weights, transforms)
    }

    /// `transforms` is flat, one per dimension in point order.
    pub fn new(space: &SpaceSpec, weights: Vec<f64>, transforms: Vec<PiecewiseLinear>) -> Result<Self> {
        if weights.len() != space.domains().len() {
            return Err(Error::InvalidContext(format!(
                "expected {} weights, got {}",
                space.domains().len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidContext("weights must be nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidContext(format!("weights sum to {sum}, not 1")));
        }
        if transforms.len() != space.dimension_count() {
            return Err(Error::InvalidContext(format!(
                "expected {} transforms, got {}",
                space.dimension_count(),
                transforms.len()
            )));
        }
        for (dim, t) in space.dimensions().zip(&transforms) {
            // re-validate against this dimension's range
            PiecewiseLinear::new(t.knots.clone(), dim.lo, dim.hi)
                .map_err(|e| Error::InvalidContext(format!("dimension `{}`: {e}", dim.name)))?;
        }
        Ok(Self { weights, transforms })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn transforms(&self) -> &[PiecewiseLinear] {
        &self.transforms
    }

    /// Contextual distortion on raw slices; no validation. Allocation-free
    /// for points of up to 16 coordinates.
    pub fn distortion_unchecked(&self, space: &SpaceSpec, a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let mut buf_a = [0.0f64; 16];
        let mut buf_b = [0.0f64; 16];
        let mut heap_a;
        let mut heap_b;
        let (ta, tb): (&mut [f64], &mut [f64]) = if n <= 16 {
            (&mut buf_a[..n], &mut buf_b[..n])
        } else {
            heap_a = alloc::vec![0.0; n];
            heap_b = alloc::vec![0.0; n];
            (&mut heap_a[..], &mut heap_b[..])
        };
        for (i, t) in self.transforms.iter().enumerate() {
            ta[i] = t.apply(a[i]);
            tb[i] = t.apply(b[i]);
        }
        let mut total = 0.0;
        for (m, (dom, w)) in space.domains().iter().zip(&self.weights).enumerate() {
            let r = space.domain_range(m);
            total += w * dom.distance(&ta[r.clone()], &tb[r]);
        }
        total
    }
}

/// Salience-weighted distortion over sensitivity-transformed coordinates.
pub fn contextual_distortion(
    space: &SpaceSpec,
    ctx: &ContextSpec,
    z1: &SemanticPoint,
    z2: &SemanticPoint,
) -> Result<f64> {
    space.validate(z1)?;
    space.validate(z2)?;
    if ctx.weights.len() != space.domains().len() || ctx.transforms.len() != space.dimension_count() {
        return Err(Error::InvalidContext("context does not match space".into()));
    }
    Ok(ctx.distortion_unchecked(space, z1.as_slice(), z2.as_slice()))
}
