//! End-to-end Monte Carlo of the semantic link.
//!
//! One trial is one semantic representation: draw the true concept from the
//! priors, encode it, send it inside a packet of `reps_per_packet` trials,
//! decode the received point to the nearest prototype. Each SNR point runs
//! `ceil(trials / reps_per_packet)` packets, grouped in fixed-size blocks.
//! Packet `p` of point `i` always draws from substream `(seed, i, p)` and
//! blocks are reduced in index order, so a sweep is bit-identical however
//! its blocks are scheduled.
//!
//! Bound overlays are computed from the encoder and channel distortions
//! harvested at each point, treated as independent empirical laws.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;

use crate::bounds::{lemma1_bound, lemma2_bound, DistortionModel};
use crate::decode::{nearest_unchecked, tau_under, ConceptSet, Measure};
use crate::encoders::{encode_into, sample_concept, TheoreticalEncoderConfig};
use crate::phy::{transmit_packet, ChannelModel, Decision, Fading, Modulation, PhyConfig};
use crate::rng::{self, SimRng};
use crate::space::{ContextSpec, DomainMetric, SemanticPoint, SpaceSpec};
use crate::{Error, Result};

/// Packets per reduction block.
pub const PACKETS_PER_BLOCK: u64 = 16;

const Z95: f64 = 1.959_963_984_540_054;

/// Rates backed by fewer error events than this are flagged.
pub const MIN_ERROR_EVENTS: u64 = 10;

/// A complete simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub space: SpaceSpec,
    pub concepts: ConceptSet,
    pub encoder: TheoreticalEncoderConfig,
    pub phy: PhyConfig,
    /// Eb/N0 grid in dB, strictly increasing; `+inf` means a noiseless channel.
    pub ebn0_db: Vec<f64>,
    /// Requested trials per SNR point (rounded up to whole packets).
    pub trials: u64,
    pub seed: u64,
    pub context: Option<ContextSpec>,
}

impl ScenarioConfig {
    /// The exposure-therapy scenario with the given encoder noise and PHY.
    pub fn vret(sigma_e: f64, phy: PhyConfig, ebn0_db: Vec<f64>, trials: u64, seed: u64) -> Self {
        Self {
            space: SpaceSpec::vret(),
            concepts: ConceptSet::vret(),
            encoder: TheoreticalEncoderConfig { sigma_e, clip: true },
            phy,
            ebn0_db,
            trials,
            seed,
            context: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("sweep.trials must be at least 1".into()));
        }
        if self.ebn0_db.is_empty() {
            return Err(Error::InvalidConfig("sweep.ebn0_db must not be empty".into()));
        }
        if self.ebn0_db.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidConfig("sweep.ebn0_db values must be numbers".into()));
        }
        if self.ebn0_db.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("sweep.ebn0_db must be strictly increasing".into()));
        }
        TheoreticalEncoderConfig::new(self.encoder.sigma_e, self.encoder.clip)?;
        self.phy.validate()?;
        for c in self.concepts.concepts() {
            self.space.validate(&c.prototype)?;
        }
        if let Some(ctx) = &self.context {
            ContextSpec::new(&self.space, ctx.weights().to_vec(), ctx.transforms().to_vec())?;
        }
        Ok(())
    }

    pub fn measure(&self) -> Measure<'_> {
        Measure::new(&self.space, self.context.as_ref())
    }

    pub fn packets_per_point(&self) -> u64 {
        self.trials.div_ceil(self.phy.reps_per_packet as u64)
    }

    pub fn blocks_per_point(&self) -> u64 {
        self.packets_per_point().div_ceil(PACKETS_PER_BLOCK)
    }

    /// Decoding radii under the scenario's measure.
    pub fn taus(&self) -> Vec<f64> {
        (0..self.concepts.len())
            .map(|j| tau_under(self.measure(), &self.concepts, j).expect("in range"))
            .collect()
    }

    /// Fingerprint of everything that defines the experiment except the seed
    /// and the trial count, so independent runs of one scenario can be merged.
    pub fn scenario_id(&self) -> u64 {
        let mut h = Fnv::new();
        for d in self.space.domains() {
            h.str(&d.name);
            match d.metric {
                DomainMetric::Euclidean => h.u64(0),
                DomainMetric::ColorMsel { rho } => {
                    h.u64(1);
                    h.f64(rho)
                }
            }
            for dim in &d.dimensions {
                h.str(&dim.name);
                h.u64(dim.kind as u64);
                h.f64(dim.lo);
                h.f64(dim.hi);
            }
        }
        for (c, a) in self.concepts.concepts().iter().zip(self.concepts.priors()) {
            h.str(&c.name);
            h.f64(*a);
            c.prototype.as_slice().iter().for_each(|v| h.f64(*v));
        }
        h.f64(self.encoder.sigma_e);
        h.u64(self.encoder.clip as u64);
        h.u64(self.phy.quantizer.bits_per_dim() as u64);
        h.u64(self.phy.modulation as u64);
        match self.phy.channel {
            ChannelModel::Awgn => h.u64(0),
            ChannelModel::Rician { k_db, fading } => {
                h.u64(1);
                h.f64(k_db);
                h.u64(matches!(fading, Fading::PerSymbol) as u64);
            }
        }
        h.u64(self.phy.reps_per_packet as u64);
        h.u64(matches!(self.phy.decision, Decision::Soft) as u64);
        self.ebn0_db.iter().for_each(|v| h.f64(*v));
        if let Some(ctx) = &self.context {
            ctx.weights().iter().for_each(|v| h.f64(*v));
            for t in ctx.transforms() {
                for &(x, y) in t.knots() {
                    h.f64(x);
                    h.f64(y);
                }
            }
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
    fn bytes(&mut self, b: &[u8]) {
        for &x in b {
            self.0 = (self.0 ^ x as u64).wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.bytes(s.as_bytes());
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

/// One semantic representation's trip through the link.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub concept: usize,
    pub encoded: SemanticPoint,
    pub received: SemanticPoint,
    pub decoded: usize,
    /// `d(z_j, z)`
    pub encoder_distortion: f64,
    /// `d(z, z_hat)`
    pub channel_distortion: f64,
    /// `d(z_j, z_hat)`
    pub total_distortion: f64,
    /// The packet carrying this trial had a payload bit error.
    pub packet_error: bool,
}

impl TrialRecord {
    pub fn semantic_error(&self) -> bool {
        self.decoded != self.concept
    }
}

/// Runs one packet's worth of trials at `ebn0_db`.
pub fn run_packet(scenario: &ScenarioConfig, ebn0_db: f64, rng: &mut SimRng) -> Result<Vec<TrialRecord>> {
    let space = &scenario.space;
    let set = &scenario.concepts;
    let measure = scenario.measure();
    let n = scenario.phy.reps_per_packet;
    let mut concepts = Vec::with_capacity(n);
    let mut reps = Vec::with_capacity(n);
    for _ in 0..n {
        let j = sample_concept(set, rng);
        let mut z = alloc::vec![0.0; space.dimension_count()];
        encode_into(
            space,
            set.concepts()[j].prototype.as_slice(),
            &scenario.encoder,
            rng,
            &mut z,
        );
        concepts.push(j);
        reps.push(SemanticPoint::from_vec(z));
    }
    let out = transmit_packet(space, &reps, &scenario.phy, ebn0_db, rng)?;
    Ok(concepts
        .into_iter()
        .zip(reps)
        .zip(out.reps)
        .map(|((j, z), zh)| {
            let proto = set.concepts()[j].prototype.as_slice();
            let d = nearest_unchecked(measure, set, zh.as_slice());
            TrialRecord {
                concept: j,
                encoder_distortion: measure.eval(proto, z.as_slice()),
                channel_distortion: measure.eval(z.as_slice(), zh.as_slice()),
                total_distortion: d_total(measure, proto, &zh),
                decoded: d.index,
                encoded: z,
                received: zh,
                packet_error: out.packet_error,
            }
        })
        .collect())
}

fn d_total(measure: Measure<'_>, proto: &[f64], zh: &SemanticPoint) -> f64 {
    measure.eval(proto, zh.as_slice())
}

/// Partial statistics of one block of packets at one SNR point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BlockStats {
    pub trials: u64,
    pub semantic_errors: u64,
    pub packets: u64,
    pub packet_errors: u64,
    pub sum_total_distortion: f64,
    pub sum_encoder_distortion: f64,
    pub encoder_samples: Vec<f64>,
    pub channel_samples: Vec<f64>,
}

/// Runs block `block` of SNR point `point`.
pub fn run_block(scenario: &ScenarioConfig, point: usize, block: u64) -> Result<BlockStats> {
    let ebn0 = *scenario
        .ebn0_db
        .get(point)
        .ok_or_else(|| Error::InvalidConfig(format!("no SNR point {point}")))?;
    let total = scenario.packets_per_point();
    let first = block * PACKETS_PER_BLOCK;
    let last = (first + PACKETS_PER_BLOCK).min(total);
    let mut s = BlockStats::default();
    for p in first..last {
        let mut r = rng::substream(scenario.seed, &[point as u64, p]);
        let records = run_packet(scenario, ebn0, &mut r)?;
        s.packets += 1;
        s.packet_errors += records.first().is_some_and(|t| t.packet_error) as u64;
        for t in records {
            s.trials += 1;
            s.semantic_errors += t.semantic_error() as u64;
            s.sum_total_distortion += t.total_distortion;
            s.sum_encoder_distortion += t.encoder_distortion;
            s.encoder_samples.push(t.encoder_distortion);
            s.channel_samples.push(t.channel_distortion);
        }
    }
    Ok(s)
}

/// Aggregates for one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub semantic_errors: u64,
    pub packets: u64,
    pub packet_errors: u64,
    pub sum_total_distortion: f64,
    pub sum_encoder_distortion: f64,
    /// Prior-weighted bound from the harvested distortions.
    pub lemma1_bound: f64,
    /// Prior-free bound at the smallest tau.
    pub lemma2_bound: f64,
}

fn ratio(a: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        a / n as f64
    }
}

fn ci(events: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = events as f64 / n as f64;
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

impl SweepPoint {
    fn empty(ebn0_db: f64) -> Self {
        Self {
            ebn0_db,
            trials: 0,
            semantic_errors: 0,
            packets: 0,
            packet_errors: 0,
            sum_total_distortion: 0.0,
            sum_encoder_distortion: 0.0,
            lemma1_bound: 0.0,
            lemma2_bound: 0.0,
        }
    }

    pub fn semantic_error_rate(&self) -> f64 {
        ratio(self.semantic_errors as f64, self.trials)
    }

    pub fn packet_error_rate(&self) -> f64 {
        ratio(self.packet_errors as f64, self.packets)
    }

    pub fn mean_total_distortion(&self) -> f64 {
        ratio(self.sum_total_distortion, self.trials)
    }

    pub fn mean_encoder_distortion(&self) -> f64 {
        ratio(self.sum_encoder_distortion, self.trials)
    }

    /// 95% normal-approximation half-width of the semantic error rate.
    pub fn ci_semantic(&self) -> f64 {
        ci(self.semantic_errors, self.trials)
    }

    pub fn ci_packet(&self) -> f64 {
        ci(self.packet_errors, self.packets)
    }

    /// Standard error of the semantic error rate.
    pub fn se_semantic(&self) -> f64 {
        self.ci_semantic() / Z95
    }

    /// Too few error events (either kind) for the normal approximation.
    pub fn low_event_count(&self) -> bool {
        self.semantic_errors < MIN_ERROR_EVENTS || self.packet_errors < MIN_ERROR_EVENTS
    }
}

/// Reduces the blocks of one SNR point, in order, and attaches the bound
/// overlays.
pub fn finish_point(
    scenario: &ScenarioConfig,
    point: usize,
    blocks: impl IntoIterator<Item = BlockStats>,
) -> Result<SweepPoint> {
    let mut p = SweepPoint::empty(scenario.ebn0_db[point]);
    let mut enc = Vec::new();
    let mut ch = Vec::new();
    for b in blocks {
        p.trials += b.trials;
        p.semantic_errors += b.semantic_errors;
        p.packets += b.packets;
        p.packet_errors += b.packet_errors;
        p.sum_total_distortion += b.sum_total_distortion;
        p.sum_encoder_distortion += b.sum_encoder_distortion;
        enc.extend(b.encoder_samples);
        ch.extend(b.channel_samples);
    }
    if p.trials > 0 {
        let taus = scenario.taus();
        let tau_min = taus.iter().copied().fold(f64::INFINITY, f64::min);
        let enc = DistortionModel::empirical(enc)?;
        let ch = DistortionModel::empirical(ch)?;
        p.lemma1_bound = lemma1_bound(scenario.concepts.priors(), &taus, &enc, &ch, 0, 0)?.bound_value;
        p.lemma2_bound = lemma2_bound(tau_min, &enc, &ch, 0, 0)?.bound_value;
    }
    Ok(p)
}

/// Runs every block of SNR point `point` in order.
pub fn run_point(scenario: &ScenarioConfig, point: usize) -> Result<SweepPoint> {
    let blocks = (0..scenario.blocks_per_point())
        .map(|b| run_block(scenario, point, b))
        .collect::<Result<Vec<_>>>()?;
    finish_point(scenario, point, blocks)
}

/// Per-SNR results of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub scenario_id: u64,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    /// A report with the scenario's grid and no trials; the identity of
    /// [`merge_reports`].
    pub fn empty(scenario: &ScenarioConfig) -> Self {
        Self {
            scenario_id: scenario.scenario_id(),
            points: scenario.ebn0_db.iter().map(|&e| SweepPoint::empty(e)).collect(),
        }
    }
}

/// Runs the whole sweep on the calling thread.
pub fn run_sweep(scenario: &ScenarioConfig) -> Result<SweepReport> {
    scenario.validate()?;
    let points = (0..scenario.ebn0_db.len())
        .map(|i| run_point(scenario, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        scenario_id: scenario.scenario_id(),
        points,
    })
}

fn pooled(a: f64, na: u64, b: f64, nb: u64) -> f64 {
    match (na, nb) {
        (_, 0) => a,
        (0, _) => b,
        _ => (a * na as f64 + b * nb as f64) / (na + nb) as f64,
    }
}

/// Count-weighted pooling of two reports of the same scenario. Counts and
/// sums add; bound overlays are averaged with trial-count weights.
pub fn merge_reports(a: &SweepReport, b: &SweepReport) -> Result<SweepReport> {
    if a.scenario_id != b.scenario_id {
        return Err(Error::InvalidConfig(
            "cannot merge reports of different scenarios".into(),
        ));
    }
    let same_grid = a.points.len() == b.points.len()
        && a.points
            .iter()
            .zip(&b.points)
            .all(|(x, y)| x.ebn0_db.to_bits() == y.ebn0_db.to_bits());
    if !same_grid {
        return Err(Error::InvalidConfig(
            "cannot merge reports with different SNR grids".into(),
        ));
    }
    let points = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(x, y)| SweepPoint {
            ebn0_db: x.ebn0_db,
            trials: x.trials + y.trials,
            semantic_errors: x.semantic_errors + y.semantic_errors,
            packets: x.packets + y.packets,
            packet_errors: x.packet_errors + y.packet_errors,
            sum_total_distortion: x.sum_total_distortion + y.sum_total_distortion,
            sum_encoder_distortion: x.sum_encoder_distortion + y.sum_encoder_distortion,
            lemma1_bound: pooled(x.lemma1_bound, x.trials, y.lemma1_bound, y.trials),
            lemma2_bound: pooled(x.lemma2_bound, x.trials, y.lemma2_bound, y.trials),
        })
        .collect();
    Ok(SweepReport {
        scenario_id: a.scenario_id,
        points,
    })
}

/// Bits per inference of the semantic system against an image baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateAccounting {
    pub semantic_bits: f64,
    pub baseline_bits: f64,
    pub reduction_fraction: f64,
}

/// Raw-image baseline: `images` arrays of `height x width x channels` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageBaseline {
    pub images: u64,
    pub height: u64,
    pub width: u64,
    pub channels: u64,
    pub bits_per_value: u64,
}

impl Default for ImageBaseline {
    /// Two 112x112 RGB frames at 8 bits per value.
    fn default() -> Self {
        Self {
            images: 2,
            height: 112,
            width: 112,
            channels: 3,
            bits_per_value: 8,
        }
    }
}

/// Coded semantic bits (`dims * bits_per_dim / code_rate`) against the raw
/// baseline, and the fraction of rate saved.
pub fn rate_accounting(
    dims: u64,
    bits_per_dim: u64,
    code_rate: f64,
    baseline: ImageBaseline,
) -> Result<RateAccounting> {
    let b = baseline;
    if dims == 0 || bits_per_dim == 0 || !(code_rate > 0.0 && code_rate <= 1.0) {
        return Err(Error::InvalidConfig("semantic payload must be positive".into()));
    }
    if [b.images, b.height, b.width, b.channels, b.bits_per_value].contains(&0) {
        return Err(Error::InvalidConfig("baseline dimensions must be positive".into()));
    }
    let semantic_bits = (dims * bits_per_dim) as f64 / code_rate;
    let baseline_bits = (b.images * b.height * b.width * b.channels * b.bits_per_value) as f64;
    Ok(RateAccounting {
        semantic_bits,
        baseline_bits,
        reduction_fraction: 1.0 - semantic_bits / baseline_bits,
    })
}

/// Convenience PHY for the common AWGN/Rician BPSK/QAM runs.
pub fn phy(modulation: Modulation, channel: ChannelModel) -> PhyConfig {
    PhyConfig {
        modulation,
        channel,
        ..PhyConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::encoder_floor;
    use alloc::vec;

    fn small(sigma: f64, grid: Vec<f64>, trials: u64) -> ScenarioConfig {
        ScenarioConfig::vret(sigma, PhyConfig::default(), grid, trials, 42)
    }

    #[test]
    fn noiseless_zero_noise_decodes_perfectly() {
        let sc = small(0.0, vec![f64::INFINITY], 2000);
        let mut r = rng::seeded(0);
        for _ in 0..10 {
            for t in run_packet(&sc, f64::INFINITY, &mut r).unwrap() {
                assert_eq!(t.decoded, t.concept);
                assert!(t.total_distortion <= 2.0 * 2f64.sqrt() / 510.0);
                assert!(!t.packet_error);
            }
        }
    }

    #[test]
    fn triangle_inequality_per_trial() {
        let sc = small(0.15, vec![0.0, 4.0], 2000);
        let mut r = rng::seeded(1);
        for ebn0 in [-2.0, 0.0, 3.0] {
            for _ in 0..50 {
                for t in run_packet(&sc, ebn0, &mut r).unwrap() {
                    assert!(t.total_distortion <= t.encoder_distortion + t.channel_distortion + 1e-9);
                }
            }
        }
    }

    #[test]
    fn trials_round_up_to_packets() {
        let sc = small(0.1, vec![10.0], 1001);
        assert_eq!(sc.packets_per_point(), 51);
        let rep = run_sweep(&sc).unwrap();
        assert_eq!(rep.points[0].trials, 1020);
        assert_eq!(rep.points[0].packets, 51);
    }

    #[test]
    fn scenario_validation() {
        assert!(small(0.1, vec![], 10).validate().is_err());
        assert!(small(0.1, vec![1.0, 1.0], 10).validate().is_err());
        assert!(small(0.1, vec![2.0, 1.0], 10).validate().is_err());
        assert!(small(0.1, vec![1.0], 0).validate().is_err());
        assert!(small(-0.1, vec![1.0], 10).validate().is_err());
        assert!(small(0.1, vec![1.0, f64::INFINITY], 10).validate().is_ok());
    }

    #[test]
    fn sweep_is_reproducible() {
        let sc = small(0.1, vec![0.0, 3.0], 400);
        assert_eq!(run_sweep(&sc).unwrap(), run_sweep(&sc).unwrap());
        let other = ScenarioConfig { seed: 43, ..sc.clone() };
        assert_ne!(run_sweep(&sc).unwrap(), run_sweep(&other).unwrap());
        assert_eq!(sc.scenario_id(), other.scenario_id());
    }

    #[test]
    fn block_order_does_not_matter_for_counts() {
        let sc = small(0.1, vec![1.0], 2000);
        let mut blocks: Vec<_> = (0..sc.blocks_per_point())
            .map(|b| run_block(&sc, 0, b).unwrap())
            .collect();
        let forward = finish_point(&sc, 0, blocks.clone()).unwrap();
        blocks.reverse();
        let backward = finish_point(&sc, 0, blocks).unwrap();
        assert_eq!(forward.semantic_errors, backward.semantic_errors);
        assert_eq!(forward.packet_errors, backward.packet_errors);
        // overlays only depend on the sample multisets
        assert_eq!(forward.lemma1_bound, backward.lemma1_bound);
        assert!((forward.sum_total_distortion - backward.sum_total_distortion).abs() < 1e-9);
    }

    #[test]
    fn noiseless_sweep_matches_encoder_floor() {
        let n = 200_000;
        let sc = small(0.15, vec![f64::INFINITY], n);
        let rep = run_sweep(&sc).unwrap();
        let p = &rep.points[0];
        let floor = encoder_floor(&sc.space, &sc.concepts, &sc.encoder, n, 9).unwrap();
        let se =
            ((floor * (1.0 - floor) + p.semantic_error_rate() * (1.0 - p.semantic_error_rate())) / n as f64).sqrt();
        assert!(
            (p.semantic_error_rate() - floor).abs() < 3.0 * se,
            "{} vs {floor}",
            p.semantic_error_rate()
        );
        assert_eq!(p.packet_errors, 0);
    }

    #[test]
    fn overlays_dominate() {
        let sc = small(0.15, vec![-2.0, 2.0, 6.0], 4000);
        for p in run_sweep(&sc).unwrap().points {
            assert!(p.lemma1_bound >= p.semantic_error_rate() - p.ci_semantic(), "{p:?}");
            assert!(p.lemma2_bound >= p.lemma1_bound);
        }
    }

    #[test]
    fn merge_identity_and_commutativity() {
        let sc = small(0.1, vec![0.0, 2.0], 400);
        let a = run_sweep(&sc).unwrap();
        let b = run_sweep(&ScenarioConfig { seed: 7, ..sc.clone() }).unwrap();
        assert_eq!(merge_reports(&a, &SweepReport::empty(&sc)).unwrap(), a);
        assert_eq!(merge_reports(&SweepReport::empty(&sc), &a).unwrap(), a);
        assert_eq!(merge_reports(&a, &b).unwrap(), merge_reports(&b, &a).unwrap());
        let c = run_sweep(&ScenarioConfig { seed: 8, ..sc.clone() }).unwrap();
        let left = merge_reports(&merge_reports(&a, &b).unwrap(), &c).unwrap();
        let right = merge_reports(&a, &merge_reports(&b, &c).unwrap()).unwrap();
        for (l, r) in left.points.iter().zip(&right.points) {
            assert_eq!(
                (l.trials, l.semantic_errors, l.packet_errors),
                (r.trials, r.semantic_errors, r.packet_errors)
            );
            assert!((l.sum_total_distortion - r.sum_total_distortion).abs() < 1e-9);
            assert!((l.lemma1_bound - r.lemma1_bound).abs() < 1e-12);
        }
        let other = small(0.2, vec![0.0, 2.0], 400);
        assert!(merge_reports(&a, &SweepReport::empty(&other)).is_err());
        let regrid = small(0.1, vec![0.0, 3.0], 400);
        assert!(merge_reports(&a, &SweepReport::empty(&regrid)).is_err());
    }

    #[test]
    fn pooled_runs_match_a_single_long_run() {
        let n = 20_000;
        let sc = small(0.15, vec![1.0], n);
        let a = run_sweep(&sc).unwrap();
        let b = run_sweep(&ScenarioConfig {
            seed: 1000,
            ..sc.clone()
        })
        .unwrap();
        let pooled = merge_reports(&a, &b).unwrap();
        let long = run_sweep(&ScenarioConfig {
            trials: 2 * n,
            seed: 2000,
            ..sc.clone()
        })
        .unwrap();
        let (p, q) = (&pooled.points[0], &long.points[0]);
        assert_eq!(p.trials, q.trials);
        let se = (p.se_semantic().powi(2) + q.se_semantic().powi(2)).sqrt();
        assert!((p.semantic_error_rate() - q.semantic_error_rate()).abs() < 3.0 * se);
    }

    #[test]
    fn rate_examples() {
        let r = rate_accounting(4, 8, 0.5, ImageBaseline::default()).unwrap();
        assert_eq!(r.semantic_bits, 64.0);
        assert_eq!(r.baseline_bits, 602_112.0);
        assert!((r.reduction_fraction - 0.9998937).abs() < 1e-7);
        assert!(r.reduction_fraction > 0.999);
        assert!(rate_accounting(0, 8, 0.5, ImageBaseline::default()).is_err());
        assert!(rate_accounting(4, 8, 0.0, ImageBaseline::default()).is_err());
    }

    #[test]
    fn contextual_scenario_runs() {
        let mut sc = small(0.1, vec![2.0], 400);
        sc.context = Some(ContextSpec::with_weights(&sc.space, vec![0.7, 0.3]).unwrap());
        sc.validate().unwrap();
        let taus = sc.taus();
        // 0.7*0.1768 + 0.3*0.5303 halved
        assert!((taus[0] - 0.5 * (0.7 * 0.125 * 2f64.sqrt() + 0.3 * 0.375 * 2f64.sqrt())).abs() < 1e-12);
        let rep = run_sweep(&sc).unwrap();
        assert_ne!(rep.scenario_id, small(0.1, vec![2.0], 400).scenario_id());
    }
}
