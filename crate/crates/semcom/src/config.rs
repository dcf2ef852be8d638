//! TOML scenario files.
//!
//! ```toml
//! [space]
//! [[space.domains]]
//! name = "emotion"
//! metric = "euclidean"          # or "color" with `rho`
//! [[space.domains.dimensions]]
//! name = "valence"              # kind = "linear" | "circular", lo/hi default 0/1
//!
//! [concepts]
//! priors = [0.5, 0.5]           # optional, uniform when omitted
//! [[concepts.items]]
//! name = "mild"
//! prototype = [0.375, 0.625, 0.875, 0.125]
//!
//! [encoder]
//! sigma_e = 0.1
//!
//! [phy]
//! modulation = "bpsk"           # bpsk | qam16 | qam256
//! channel = "awgn"              # awgn | rician
//!
//! [sweep]
//! ebn0_db = [0.0, 5.0, inf]
//! trials = 2000
//! seed = 1
//!
//! [context]                     # optional
//! weights = [0.7, 0.3]
//! ```
//!
//! Unknown keys are rejected. Every semantic error names the offending key.

use std::path::{Path, PathBuf};

use semcom_core::decode::{Concept, ConceptSet};
use semcom_core::encoders::TheoreticalEncoderConfig;
use semcom_core::phy::{ChannelModel, Decision, Fading, Modulation, PhyConfig, QuantizerSpec};
use semcom_core::sim::ScenarioConfig;
use semcom_core::space::{
    ContextSpec, DimensionKind, DomainMetric, DomainSpec, PiecewiseLinear, QualityDimension, SpaceSpec,
};
use serde::{Deserialize, Serialize};

/// The exposure-therapy scenario shipped with the crate.
pub const VRET_TOML: &str = include_str!("../configs/vret.toml");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {source}")]
    Syntax { origin: String, source: toml::de::Error },
    #[error("{origin}: {key}: {message}")]
    Invalid {
        origin: String,
        key: String,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub space: SpaceSection,
    pub concepts: ConceptsSection,
    #[serde(default)]
    pub encoder: EncoderSection,
    #[serde(default)]
    pub phy: PhySection,
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub domains: Vec<DomainSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    #[default]
    Euclidean,
    Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub name: String,
    #[serde(default)]
    pub metric: MetricName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub dimensions: Vec<DimensionSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    #[default]
    Linear,
    Circular,
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionSection {
    pub name: String,
    #[serde(default)]
    pub kind: KindName,
    #[serde(default = "zero")]
    pub lo: f64,
    #[serde(default = "one")]
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    pub items: Vec<ConceptItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptItem {
    pub name: String,
    pub prototype: Vec<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderSection {
    #[serde(default)]
    pub sigma_e: f64,
    #[serde(default = "yes")]
    pub clip: bool,
}

impl Default for EncoderSection {
    fn default() -> Self {
        Self {
            sigma_e: 0.0,
            clip: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModulationName {
    #[default]
    Bpsk,
    Qam16,
    Qam256,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChannelName {
    #[default]
    Awgn,
    Rician,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FadingName {
    #[default]
    Block,
    PerSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DecisionName {
    #[default]
    Hard,
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhySection {
    #[serde(default)]
    pub modulation: ModulationName,
    #[serde(default)]
    pub channel: ChannelName,
    #[serde(default = "six")]
    pub rician_k_db: f64,
    #[serde(default)]
    pub fading: FadingName,
    #[serde(default = "eight")]
    pub bits_per_dim: u32,
    #[serde(default = "twenty")]
    pub reps_per_packet: usize,
    #[serde(default)]
    pub decision: DecisionName,
}

fn six() -> f64 {
    6.0
}

fn eight() -> u32 {
    8
}

fn twenty() -> usize {
    20
}

impl Default for PhySection {
    fn default() -> Self {
        Self {
            modulation: ModulationName::Bpsk,
            channel: ChannelName::Awgn,
            rician_k_db: 6.0,
            fading: FadingName::Block,
            bits_per_dim: 8,
            reps_per_packet: 20,
            decision: DecisionName::Hard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub ebn0_db: Vec<f64>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSection {
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<TransformSection>,
}

/// Sensitivity map for one named dimension; interior knots only, the
/// endpoints of the dimension's range are fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub dimension: String,
    pub knots: Vec<[f64; 2]>,
}

/// A semantic error at `key` of the config read from `origin`.
fn invalid(origin: &str, key: impl Into<String>, e: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        origin: origin.to_string(),
        key: key.into(),
        message: e.to_string(),
    }
}

impl ScenarioFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Syntax {
            origin: origin.to_string(),
            source,
        })
    }

    /// Reads a file, or the bundled scenario when `name` is `vret` and no
    /// such file exists.
    pub fn load(name: &Path) -> Result<Self, ConfigError> {
        if name == Path::new("vret") && !name.exists() {
            return Self::parse(VRET_TOML, "vret (bundled)");
        }
        let text = std::fs::read_to_string(name).map_err(|source| ConfigError::Io {
            path: name.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &name.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Builds and validates the scenario.
    pub fn build(&self, origin: &str) -> Result<ScenarioConfig, ConfigError> {
        let space = self.build_space(origin)?;
        let concepts = self.build_concepts(origin, &space)?;
        let encoder = TheoreticalEncoderConfig::new(self.encoder.sigma_e, self.encoder.clip)
            .map_err(|e| invalid(origin, "encoder.sigma_e", e))?;
        let phy = self.build_phy(origin)?;
        let context = match &self.context {
            None => None,
            Some(c) => Some(self.build_context(origin, &space, c)?),
        };
        let sc = ScenarioConfig {
            space,
            concepts,
            encoder,
            phy,
            ebn0_db: self.sweep.ebn0_db.clone(),
            trials: self.sweep.trials,
            seed: self.sweep.seed,
            context,
        };
        sc.validate().map_err(|e| invalid(origin, "sweep", e))?;
        Ok(sc)
    }

    fn build_space(&self, origin: &str) -> Result<SpaceSpec, ConfigError> {
        let mut domains = Vec::new();
        for (i, d) in self.space.domains.iter().enumerate() {
            let key = format!("space.domains[{i}]");
            let mut dims = Vec::new();
            for (k, x) in d.dimensions.iter().enumerate() {
                let kind = match x.kind {
                    KindName::Linear => DimensionKind::Linear,
                    KindName::Circular => DimensionKind::Circular,
                };
                dims.push(
                    QualityDimension::new(x.name.clone(), kind, x.lo, x.hi)
                        .map_err(|e| invalid(origin, format!("{key}.dimensions[{k}]"), e))?,
                );
            }
            let metric = match (d.metric, d.rho) {
                (MetricName::Euclidean, None) => DomainMetric::Euclidean,
                (MetricName::Euclidean, Some(_)) => {
                    return Err(invalid(origin, format!("{key}.rho"), "only the color metric takes rho"))
                }
                (MetricName::Color, rho) => DomainMetric::ColorMsel {
                    rho: rho.ok_or_else(|| invalid(origin, format!("{key}.rho"), "color metric needs rho"))?,
                },
            };
            domains.push(DomainSpec::new(d.name.clone(), dims, metric).map_err(|e| invalid(origin, &key, e))?);
        }
        SpaceSpec::new(domains).map_err(|e| invalid(origin, "space.domains", e))
    }

    fn build_concepts(&self, origin: &str, space: &SpaceSpec) -> Result<ConceptSet, ConfigError> {
        let mut items = Vec::new();
        for (i, c) in self.concepts.items.iter().enumerate() {
            let p = space
                .point(c.prototype.clone())
                .map_err(|e| invalid(origin, format!("concepts.items[{i}].prototype"), e))?;
            items.push(Concept::new(c.name.clone(), p));
        }
        match &self.concepts.priors {
            Some(p) => ConceptSet::new(space, items, p.clone()),
            None => ConceptSet::uniform(space, items),
        }
        .map_err(|e| {
            let key = if e.to_string().contains("prior") {
                "concepts.priors"
            } else {
                "concepts.items"
            };
            invalid(origin, key, e)
        })
    }

    fn build_phy(&self, origin: &str) -> Result<PhyConfig, ConfigError> {
        let p = &self.phy;
        let quantizer = QuantizerSpec::new(p.bits_per_dim).map_err(|e| invalid(origin, "phy.bits_per_dim", e))?;
        let modulation = match p.modulation {
            ModulationName::Bpsk => Modulation::Bpsk,
            ModulationName::Qam16 => Modulation::Qam16,
            ModulationName::Qam256 => Modulation::Qam256,
        };
        let channel = match p.channel {
            ChannelName::Awgn => ChannelModel::Awgn,
            ChannelName::Rician => ChannelModel::Rician {
                k_db: p.rician_k_db,
                fading: match p.fading {
                    FadingName::Block => Fading::Block,
                    FadingName::PerSymbol => Fading::PerSymbol,
                },
            },
        };
        let phy = PhyConfig {
            quantizer,
            modulation,
            channel,
            reps_per_packet: p.reps_per_packet,
            decision: match p.decision {
                DecisionName::Hard => Decision::Hard,
                DecisionName::Soft => Decision::Soft,
            },
        };
        phy.validate().map_err(|e| invalid(origin, "phy", e))?;
        Ok(phy)
    }

    fn build_context(&self, origin: &str, space: &SpaceSpec, c: &ContextSection) -> Result<ContextSpec, ConfigError> {
        let mut transforms: Vec<PiecewiseLinear> = space
            .dimensions()
            .map(|d| PiecewiseLinear::identity(d.lo, d.hi))
            .collect();
        for (i, t) in c.transforms.iter().enumerate() {
            let key = format!("context.transforms[{i}]");
            let (k, dim) = space
                .dimensions()
                .enumerate()
                .find(|(_, d)| d.name == t.dimension)
                .ok_or_else(|| {
                    invalid(
                        origin,
                        format!("{key}.dimension"),
                        format!("no dimension named {}", t.dimension),
                    )
                })?;
            let knots = std::iter::once((dim.lo, dim.lo))
                .chain(t.knots.iter().map(|[x, y]| (*x, *y)))
                .chain(std::iter::once((dim.hi, dim.hi)))
                .collect();
            transforms[k] =
                PiecewiseLinear::new(knots, dim.lo, dim.hi).map_err(|e| invalid(origin, format!("{key}.knots"), e))?;
        }
        ContextSpec::new(space, c.weights.clone(), transforms).map_err(|e| invalid(origin, "context.weights", e))
    }
}

/// Loads and builds a scenario in one step.
pub fn parse_config(path: &Path) -> Result<(ScenarioFile, ScenarioConfig), ConfigError> {
    let file = ScenarioFile::load(path)?;
    let origin = if path == Path::new("vret") && !path.exists() {
        "vret (bundled)".to_string()
    } else {
        path.display().to_string()
    };
    let sc = file.build(&origin)?;
    Ok((file, sc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled() -> ScenarioFile {
        ScenarioFile::parse(VRET_TOML, "vret").unwrap()
    }

    #[test]
    fn bundled_vret_is_table_one() {
        let sc = bundled().build("vret").unwrap();
        assert_eq!(sc.space, SpaceSpec::vret());
        assert_eq!(sc.concepts, ConceptSet::vret());
        for a in sc.concepts.priors() {
            assert!((a - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn toml_round_trip() {
        let f = bundled();
        assert_eq!(ScenarioFile::parse(&f.to_toml(), "x").unwrap(), f);
    }

    #[test]
    fn priors_must_sum_to_one() {
        let mut f = bundled();
        f.concepts.priors = Some(vec![0.3, 0.3, 0.3]);
        let e = f.build("t").unwrap_err().to_string();
        assert!(e.contains("concepts.priors"), "{e}");
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut f = bundled();
        f.concepts.items[1].name = "mild".into();
        let e = f.build("t").unwrap_err().to_string();
        assert!(e.contains("concepts.items"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = VRET_TOML.replace("[encoder]", "[encoder]\nsigma = 0.2");
        let e = ScenarioFile::parse(&text, "t").unwrap_err().to_string();
        assert!(e.contains("sigma"), "{e}");
    }

    #[test]
    fn out_of_range_prototype_is_path_qualified() {
        let mut f = bundled();
        f.concepts.items[2].prototype[0] = 1.5;
        let e = f.build("t").unwrap_err().to_string();
        assert!(e.contains("concepts.items[2].prototype"), "{e}");
    }

    #[test]
    fn sweep_grid_checked() {
        let mut f = bundled();
        f.sweep.ebn0_db = vec![3.0, 1.0];
        assert!(f.build("t").unwrap_err().to_string().contains("strictly increasing"));
        f.sweep.ebn0_db = vec![];
        assert!(f.build("t").is_err());
    }

    #[test]
    fn context_and_transforms() {
        let mut f = bundled();
        f.context = Some(ContextSection {
            weights: vec![0.7, 0.3],
            transforms: vec![TransformSection {
                dimension: "height".into(),
                knots: vec![[0.5, 0.8]],
            }],
        });
        let sc = f.build("t").unwrap();
        let ctx = sc.context.unwrap();
        assert_eq!(ctx.transforms()[2].knots(), &[(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)]);
        f.context.as_mut().unwrap().transforms[0].dimension = "depth".into();
        assert!(f
            .build("t")
            .unwrap_err()
            .to_string()
            .contains("context.transforms[0].dimension"));
    }

    #[test]
    fn color_domain_from_config() {
        let text = r#"
[space]
[[space.domains]]
name = "color"
metric = "color"
rho = 10.0
dimensions = [{ name = "hue", kind = "circular" }, { name = "saturation" }, { name = "lightness" }]

[concepts]
items = [{ name = "red", prototype = [0.0, 1.0, 0.5] }, { name = "cyan", prototype = [0.5, 1.0, 0.5] }]

[sweep]
ebn0_db = [inf]
trials = 20
"#;
        let sc = ScenarioFile::parse(text, "t").unwrap().build("t").unwrap();
        assert_eq!(sc.space.dimension_count(), 3);
        assert!(matches!(sc.space.domains()[0].metric, DomainMetric::ColorMsel { .. }));
    }
}
