use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use semcom::config::{parse_config, ScenarioFile};
use semcom::parallel::run_sweep_parallel;
use semcom::report::{fmt_g9, to_csv, to_json};
use semcom_core::bounds::{design_floor, design_lambda2, lemma1_bound, lemma2_bound, DistortionModel};
use semcom_core::decode::verify_tau_by_sampling;
use semcom_core::rng;
use semcom_core::sim::{rate_accounting, run_packet, ImageBaseline, ScenarioConfig};
use semcom_core::Error;

const EXIT_INFEASIBLE: u8 = 3;

/// Conceptual-space semantic communication simulator.
#[derive(Debug, Parser)]
#[command(name = "semcom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump per-trial records for a few packets at one SNR.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Eb/N0 in dB (`inf` for a noiseless channel); defaults to the first grid point.
        #[arg(long, allow_hyphen_values = true)]
        ebn0: Option<f64>,
        #[arg(long, default_value_t = 1)]
        packets: u64,
    },
    /// Run the SNR sweep and write CSV and JSON reports.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Directory for the reports.
        #[arg(long, env = "SEMCOM_OUTPUT_DIR", default_value = "results")]
        output_dir: PathBuf,
        /// Report file stem.
        #[arg(long, default_value = "sweep")]
        name: String,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the decoding radius of every concept.
    Tau {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also check each radius with this many uniform samples in its ball.
        #[arg(long)]
        verify: Option<u64>,
    },
    /// Evaluate both error bounds for exponential encoder and channel distortions.
    Bound {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        radii: RadiiArgs,
        #[arg(long)]
        lambda1: f64,
        #[arg(long)]
        lambda2: f64,
    },
    /// Smallest channel rate meeting a target semantic error probability.
    Design {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        radii: RadiiArgs,
        #[arg(long)]
        lambda1: f64,
        #[arg(long)]
        target: f64,
    },
    /// Bits per inference against a raw-image baseline.
    Rate {
        #[arg(long, default_value_t = 4)]
        dims: u64,
        #[arg(long, default_value_t = 8)]
        bits: u64,
        #[arg(long, default_value_t = 0.5)]
        code_rate: f64,
        #[arg(long, default_value_t = 2)]
        images: u64,
        #[arg(long, default_value_t = 112)]
        height: u64,
        #[arg(long, default_value_t = 112)]
        width: u64,
        #[arg(long, default_value_t = 3)]
        channels: u64,
    },
    /// Parse and check a scenario file.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file, or `vret` for the bundled one.
    #[arg(long, default_value = "vret")]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated Eb/N0 grid in dB, replacing the file's.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<u64>,
}

/// Stand-ins for the scenario's priors and decoding radii.
#[derive(Debug, Args)]
struct RadiiArgs {
    #[arg(long, value_delimiter = ',')]
    priors: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    taus: Option<Vec<f64>>,
}

impl RadiiArgs {
    fn resolve(&self, sc: &ScenarioConfig) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
        let priors = self.priors.clone().unwrap_or_else(|| sc.concepts.priors().to_vec());
        let taus = self.taus.clone().unwrap_or_else(|| sc.taus());
        anyhow::ensure!(
            priors.len() == taus.len(),
            "{} priors but {} radii",
            priors.len(),
            taus.len()
        );
        Ok((priors, taus))
    }
}

impl ScenarioArgs {
    fn load(&self) -> anyhow::Result<(ScenarioFile, ScenarioConfig)> {
        let (mut file, _) = parse_config(&self.config)?;
        if let Some(s) = self.seed {
            file.sweep.seed = s;
        }
        if let Some(g) = &self.snr {
            file.sweep.ebn0_db = g.clone();
        }
        if let Some(t) = self.trials {
            file.sweep.trials = t;
        }
        let sc = file.build(&self.config.display().to_string())?;
        Ok((file, sc))
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Simulate {
            scenario,
            ebn0,
            packets,
        } => {
            let (_, sc) = scenario.load()?;
            let ebn0 = ebn0.unwrap_or(sc.ebn0_db[0]);
            writeln!(
                out,
                "packet,concept,decoded,encoder_distortion,channel_distortion,total_distortion,packet_error"
            )?;
            for p in 0..packets {
                let mut r = rng::substream(sc.seed, &[u64::MAX, p]);
                for t in run_packet(&sc, ebn0, &mut r)? {
                    let name = |j: usize| sc.concepts.concepts()[j].name.as_str();
                    writeln!(
                        out,
                        "{p},{},{},{},{},{},{}",
                        name(t.concept),
                        name(t.decoded),
                        fmt_g9(t.encoder_distortion),
                        fmt_g9(t.channel_distortion),
                        fmt_g9(t.total_distortion),
                        t.packet_error as u8
                    )?;
                }
            }
        }
        Command::Sweep {
            scenario,
            output_dir,
            name,
            workers,
        } => {
            let (file, sc) = scenario.load()?;
            let report = run_sweep_parallel(&sc, workers)?;
            std::fs::create_dir_all(&output_dir).with_context(|| format!("creating {}", output_dir.display()))?;
            let csv = output_dir.join(format!("{name}.csv"));
            let json = output_dir.join(format!("{name}.json"));
            write_file(&csv, &to_csv(&report))?;
            write_file(&json, &to_json(&file, &report))?;
            for p in report.points.iter().filter(|p| p.low_event_count()) {
                eprintln!(
                    "warning: fewer than 10 error events at {} dB; interval is unreliable",
                    fmt_g9(p.ebn0_db)
                );
            }
            writeln!(out, "{}", csv.display())?;
            writeln!(out, "{}", json.display())?;
        }
        Command::Tau { scenario, verify } => {
            let (_, sc) = scenario.load()?;
            let taus = sc.taus();
            writeln!(out, "concept,tau")?;
            for (c, t) in sc.concepts.concepts().iter().zip(&taus) {
                writeln!(out, "{},{}", c.name, fmt_g9(*t))?;
            }
            if let Some(n) = verify {
                if sc.context.is_some() {
                    anyhow::bail!("--verify checks the plain semantic distortion; drop [context]");
                }
                for (j, c) in sc.concepts.concepts().iter().enumerate() {
                    let check = verify_tau_by_sampling(&sc.space, &sc.concepts, j, n, sc.seed)?;
                    anyhow::ensure!(
                        check.passed,
                        "{}: {} of {} samples decode elsewhere",
                        c.name,
                        check.violations,
                        check.samples
                    );
                }
                writeln!(out, "# verified with {n} samples per concept")?;
            }
        }
        Command::Bound {
            scenario,
            radii,
            lambda1,
            lambda2,
        } => {
            let (_, sc) = scenario.load()?;
            let (priors, taus) = radii.resolve(&sc)?;
            let tau_min = taus.iter().copied().fold(f64::INFINITY, f64::min);
            let enc = DistortionModel::exponential(lambda1)?;
            let ch = DistortionModel::exponential(lambda2)?;
            let l1 = lemma1_bound(&priors, &taus, &enc, &ch, 100_000, sc.seed)?;
            let l2 = lemma2_bound(tau_min, &enc, &ch, 100_000, sc.seed)?;
            writeln!(out, "bound,value")?;
            for (j, v) in l1.per_concept_terms.iter().enumerate() {
                let name = sc
                    .concepts
                    .concepts()
                    .get(j)
                    .filter(|_| radii.taus.is_none())
                    .map_or(j.to_string(), |c| c.name.clone());
                writeln!(out, "lemma1[{name}],{}", fmt_g9(*v))?;
            }
            writeln!(out, "lemma1,{}", fmt_g9(l1.bound_value))?;
            writeln!(out, "lemma2,{}", fmt_g9(l2.bound_value))?;
        }
        Command::Design {
            scenario,
            radii,
            lambda1,
            target,
        } => {
            let (_, sc) = scenario.load()?;
            let (priors, taus) = radii.resolve(&sc)?;
            let l2 = design_lambda2(&priors, &taus, lambda1, target)?;
            writeln!(out, "lambda2,{}", fmt_g9(l2))?;
            writeln!(out, "floor,{}", fmt_g9(design_floor(&priors, &taus, lambda1)))?;
        }
        Command::Rate {
            dims,
            bits,
            code_rate,
            images,
            height,
            width,
            channels,
        } => {
            let r = rate_accounting(
                dims,
                bits,
                code_rate,
                ImageBaseline {
                    images,
                    height,
                    width,
                    channels,
                    bits_per_value: 8,
                },
            )?;
            writeln!(out, "semantic_bits,{}", fmt_g9(r.semantic_bits))?;
            writeln!(out, "baseline_bits,{}", fmt_g9(r.baseline_bits))?;
            writeln!(out, "reduction_fraction,{}", fmt_g9(r.reduction_fraction))?;
        }
        Command::Validate { scenario } => {
            let (_, sc) = scenario.load()?;
            writeln!(
                out,
                "ok: {} concepts in {} dimensions, {} SNR points, scenario {:016x}",
                sc.concepts.len(),
                sc.space.dimension_count(),
                sc.ebn0_db.len(),
                sc.scenario_id()
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Infeasible { .. }) => ExitCode::from(EXIT_INFEASIBLE),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
