use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_trial, TrialConfig, TrialResult};
use crate::design::Family;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Aggregate over the trials of one `(m, family, multi)` grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub m: usize,
    pub family: Family,
    pub multi: bool,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_overlap: f64,
    /// Trials that ended in a structural failure (no threshold or a failed
    /// simplification). They also count as non-successes.
    pub failures: usize,
    pub eps_ok: usize,
}

impl AggregateRow {
    /// Folds trial results, in the given order, into a row.
    pub fn from_results(m: usize, family: Family, multi: bool, results: &[TrialResult]) -> Self {
        let trials = results.len();
        let successes = results.iter().filter(|r| r.success90).count();
        let failures = results.iter().filter(|r| r.is_structural_failure()).count();
        let eps_ok = results.iter().filter(|r| r.eps_ok).count();
        let overlap_sum: f64 = results.iter().map(|r| r.overlap).sum();
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        AggregateRow {
            m,
            family,
            multi,
            trials,
            successes,
            success_rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci_low,
            ci_high,
            mean_overlap: if trials == 0 { 0.0 } else { overlap_sum / trials as f64 },
            failures,
            eps_ok,
        }
    }
}

/// Wilson score interval at 95% for `successes` out of `trials`. Returns
/// `(0, 1)` for zero trials.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let low = (centre - half).max(0.0);
    let high = (centre + half).min(1.0);
    // Keep the bracket exact at the boundaries despite rounding.
    (low.min(phat), high.max(phat))
}

/// Runs every `(m, family, multi, trial)` task on the current rayon pool and
/// aggregates. Rows are sorted by `(family name, multi, m)`.
pub fn run_sweep(
    config: &TrialConfig,
    m_grid: &[usize],
    families: &[(Family, bool)],
    trials_per_point: usize,
) -> Result<Vec<AggregateRow>> {
    if m_grid.is_empty() || families.is_empty() || trials_per_point == 0 {
        return Err(Error::invalid(
            "sweep needs a non-empty m grid, at least one family and at least one trial",
        ));
    }
    let mut points: Vec<(Family, bool, usize)> = families
        .iter()
        .flat_map(|&(f, multi)| m_grid.iter().map(move |&m| (f, multi, m)))
        .collect();
    points.sort_by(|a, b| (a.0.as_str(), a.1, a.2).cmp(&(b.0.as_str(), b.1, b.2)));
    points.dedup();
    for &(f, multi, _) in &points {
        config.with_family(f, multi).design.validate()?;
    }

    let tasks: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| (0..trials_per_point as u64).map(move |t| (p, t)))
        .collect();
    // An indexed parallel collect keeps task order, whatever the schedule.
    let results: Vec<TrialResult> = tasks
        .par_iter()
        .map(|&(p, t)| {
            let (f, multi, m) = points[p];
            run_trial(&config.with_family(f, multi), m, t)
        })
        .collect::<Result<_>>()?;

    Ok(points
        .iter()
        .zip(results.chunks(trials_per_point))
        .map(|(&(f, multi, m), chunk)| AggregateRow::from_results(m, f, multi, chunk))
        .collect())
}

/// [`run_sweep`] on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(
    config: &TrialConfig,
    m_grid: &[usize],
    families: &[(Family, bool)],
    trials_per_point: usize,
    workers: usize,
) -> Result<Vec<AggregateRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(config, m_grid, families, trials_per_point))
}
