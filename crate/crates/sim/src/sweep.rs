//! Parallel Monte Carlo execution of an [`ExperimentPlan`].
//!
//! Every `(grid point, run)` pair is an independent task seeded with
//! [`derive_seed`]`(master_seed, point, run)`. Results are collected in task
//! order, so the output does not depend on the number of workers.

use misfit_core::metrics::{aggregate_runs, LogHistogram};
use misfit_core::seed::derive_seed;
use misfit_core::{simulate, PeriodStats, Scenario, Statistic, Trajectory};
use rayon::prelude::*;

use crate::error::HarnessError;
use crate::plan::{ExperimentPlan, GridPoint};

/// Aggregated statistic for one grid point and period.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub point: GridPoint,
    pub period: u32,
    pub statistic: Statistic,
    pub mean: f64,
    pub std: f64,
    pub n_runs: u32,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` lets the pool pick.
    pub workers: Option<usize>,
    /// Collect a histogram of final valuations per grid point.
    pub histogram: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub points: Vec<GridPoint>,
    /// Sorted by (grid point, period, statistic).
    pub records: Vec<RunRecord>,
    /// One per grid point when requested.
    pub histograms: Option<Vec<LogHistogram>>,
}

struct RunResult {
    stats: Vec<PeriodStats>,
    histogram: Option<LogHistogram>,
}

fn scenarios(plan: &ExperimentPlan) -> Result<(Vec<GridPoint>, Vec<Scenario>), HarnessError> {
    let points = plan.grid_points();
    let scenarios = points
        .iter()
        .map(|p| plan.scenario_at(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((points, scenarios))
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

pub fn run_sweep(
    plan: &ExperimentPlan,
    options: &SweepOptions,
) -> Result<SweepOutput, HarnessError> {
    let (points, scenarios) = scenarios(plan)?;
    let n_runs = plan.n_runs;
    let tasks: Vec<(usize, u32)> = (0..points.len())
        .flat_map(|p| (0..n_runs).map(move |r| (p, r)))
        .collect();

    let results: Vec<RunResult> = pool(options.workers)?.install(|| {
        tasks
            .par_iter()
            .map(|&(p, r)| {
                let seed = derive_seed(plan.master_seed, p as u32, r);
                let trajectory =
                    simulate(&scenarios[p], seed).map_err(|source| HarnessError::Run {
                        point: points[p].to_string(),
                        source,
                    })?;
                let histogram = options.histogram.then(|| {
                    let mut h = LogHistogram::valuations();
                    h.extend(&trajectory.final_valuations);
                    h
                });
                Ok(RunResult {
                    stats: trajectory.stats,
                    histogram,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })?;

    let mut records = Vec::new();
    let mut histograms = options.histogram.then(Vec::new);
    for (p, chunk) in results.chunks(n_runs as usize).enumerate() {
        let series: Vec<Vec<PeriodStats>> = chunk.iter().map(|r| r.stats.clone()).collect();
        let summaries = aggregate_runs(&series).map_err(|source| HarnessError::Run {
            point: points[p].to_string(),
            source,
        })?;
        for summary in &summaries {
            for stat in Statistic::ALL {
                let s = summary.get(stat);
                records.push(RunRecord {
                    point: points[p].clone(),
                    period: summary.period,
                    statistic: stat,
                    mean: s.mean,
                    std: s.std,
                    n_runs,
                });
            }
        }
        if let Some(hists) = histograms.as_mut() {
            let mut merged = LogHistogram::valuations();
            for h in chunk.iter().filter_map(|r| r.histogram.as_ref()) {
                merged.merge(h);
            }
            hists.push(merged);
        }
    }
    Ok(SweepOutput {
        points,
        records,
        histograms,
    })
}

/// Every trajectory of one grid point, with the same seeds [`run_sweep`] uses.
pub fn run_grid_point(
    plan: &ExperimentPlan,
    point_index: usize,
    workers: Option<usize>,
) -> Result<Vec<Trajectory>, HarnessError> {
    let points = plan.grid_points();
    let point = points.get(point_index).ok_or_else(|| {
        HarnessError::Malformed(format!(
            "grid point {point_index} out of range ({} points)",
            points.len()
        ))
    })?;
    let scenario = plan.scenario_at(point)?;
    pool(workers)?.install(|| {
        (0..plan.n_runs)
            .into_par_iter()
            .map(|r| {
                simulate(
                    &scenario,
                    derive_seed(plan.master_seed, point_index as u32, r),
                )
                .map_err(|source| HarnessError::Run {
                    point: point.to_string(),
                    source,
                })
            })
            .collect()
    })
}
