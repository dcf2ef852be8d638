//! Multi-threaded sweeps with results identical to [`run_sweep`].
//!
//! [`run_sweep`]: semcom_core::sim::run_sweep

use rayon::prelude::*;
use semcom_core::sim::{finish_point, run_block, ScenarioConfig, SweepReport};

/// Runs every `(point, block)` pair on a pool of `workers` threads (the
/// rayon default when `None`). Blocks are reduced in index order, so the
/// report does not depend on the worker count.
pub fn run_sweep_parallel(scenario: &ScenarioConfig, workers: Option<usize>) -> anyhow::Result<SweepReport> {
    scenario.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build()?;
    let blocks = scenario.blocks_per_point();
    let points = scenario.ebn0_db.len();
    let tasks: Vec<(usize, u64)> = (0..points).flat_map(|i| (0..blocks).map(move |b| (i, b))).collect();
    let mut done = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, b)| run_block(scenario, i, b))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut out = Vec::with_capacity(points);
    // collect() kept task order; peel off one point's blocks at a time
    for i in 0..points {
        let rest = done.split_off(blocks as usize);
        out.push(finish_point(scenario, i, std::mem::replace(&mut done, rest))?);
    }
    Ok(SweepReport {
        scenario_id: scenario.scenario_id(),
        points: out,
    })
}
