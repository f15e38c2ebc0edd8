//! Seeded Monte-Carlo trials and sweeps.
//!
//! A trial samples a ground truth, draws a pooling graph, runs the noisy
//! queries and decodes. Its randomness comes from
//! `derive_seed(base, [m, family_key, trial_index])`, split into independent
//! substreams for the truth, the graph and the channel noise.

mod config;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::channel::run_queries;
use crate::decoder::{alpha_star, compute_l, ScoreVector};
use crate::design::{generate, DesignSpec, Family};
use crate::error::{Error, Result};
use crate::model::{eps_recovery, sample_ground_truth, ChannelMatrix, GroundTruth, Prior, RecoveryReport};
use crate::seed::{derive_seed, substream};

pub use config::{
    parse_family_entry, write_csv, FamilyEntry, RunManifest, SweepConfig, CSV_HEADER,
};
pub use sweep::{run_sweep, run_sweep_with_workers, wilson_interval, AggregateRow};

/// Overlap above which a trial counts as a success.
pub const SUCCESS_OVERLAP: f64 = 0.9;

const TRUTH_STREAM: u64 = 0;
const GRAPH_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Everything a trial needs except the query count and trial index. The
/// design's `m` is ignored; each trial supplies its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub design: DesignSpec,
    pub prior: Prior,
    pub channel: ChannelMatrix,
    /// Prior handed to the decoder; `None` means `k/n` for a fixed-k prior
    /// and `p` for a Bernoulli prior.
    pub p_for_threshold: Option<f64>,
    pub epsilon: f64,
    pub base_seed: u64,
}

impl TrialConfig {
    pub fn threshold_p(&self) -> f64 {
        self.p_for_threshold
            .unwrap_or_else(|| self.prior.default_p(self.design.n))
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        self.prior.validate(self.design.n)?;
        let p = self.threshold_p();
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!(
                "decoder prior p = {p} must lie in (0, 1)"
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Same configuration with another design family.
    pub fn with_family(&self, family: Family, allow_multi: bool) -> Self {
        let mut c = *self;
        c.design.family = family;
        c.design.allow_multi = allow_multi;
        c
    }
}

/// Key folded into the seed for a (family, multi) pair.
pub fn family_key(family: Family, allow_multi: bool) -> u64 {
    2 * family.id() + allow_multi as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Decoded,
    /// `m` does not exceed `ln(1/p) / L`.
    ThresholdUndefined,
    /// The simple-graph repair gave up.
    SimplificationFailed,
}

/// Metrics of one trial. Structural failures report an empty estimate:
/// overlap 0, Hamming distance `ones`, and `eps_ok = false`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub m: usize,
    pub family: Family,
    pub multi: bool,
    pub outcome: TrialOutcome,
    pub ones: usize,
    pub success90: bool,
    pub overlap: f64,
    pub eps_ok: bool,
    pub hamming: usize,
    pub seed: u64,
}

impl TrialResult {
    pub fn is_structural_failure(&self) -> bool {
        self.outcome != TrialOutcome::Decoded
    }
}

/// A trial with its intermediate artefacts kept.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub result: TrialResult,
    pub truth: GroundTruth,
    pub scores: Option<ScoreVector>,
    pub estimate: Option<Vec<bool>>,
    pub report: Option<RecoveryReport>,
}

pub fn run_trial(config: &TrialConfig, m: usize, trial_index: u64) -> Result<TrialResult> {
    run_trial_detailed(config, m, trial_index).map(|r| r.result)
}

pub fn run_trial_detailed(config: &TrialConfig, m: usize, trial_index: u64) -> Result<TrialRecord> {
    let mut design = config.design;
    design.m = m;
    let config = TrialConfig { design, ..*config };
    config.validate()?;

    let family = design.family;
    let multi = design.allow_multi;
    let seed = derive_seed(
        config.base_seed,
        &[m as u64, family_key(family, multi), trial_index],
    );
    let truth = sample_ground_truth(design.n, config.prior, &mut substream(seed, &[TRUTH_STREAM]))?;

    let failed = |outcome| TrialResult {
        m,
        family,
        multi,
        outcome,
        ones: truth.ones(),
        success90: false,
        overlap: 0.0,
        eps_ok: false,
        hamming: truth.ones(),
        seed,
    };

    let p = config.threshold_p();
    let l = compute_l(design.n, p, &config.channel)?;
    match alpha_star(l, m as u64, p) {
        Ok(_) => {}
        Err(Error::ThresholdUndefined { .. }) => {
            return Ok(TrialRecord {
                result: failed(TrialOutcome::ThresholdUndefined),
                truth,
                scores: None,
                estimate: None,
                report: None,
            })
        }
        Err(e) => return Err(e),
    }

    let graph = match generate(&design, &mut substream(seed, &[GRAPH_STREAM])) {
        Ok(g) => g,
        Err(Error::SimplificationFailed { .. }) => {
            return Ok(TrialRecord {
                result: failed(TrialOutcome::SimplificationFailed),
                truth,
                scores: None,
                estimate: None,
                report: None,
            })
        }
        Err(e) => return Err(e),
    };
    let outcomes = run_queries(&graph, &truth, &config.channel, &mut substream(seed, &[NOISE_STREAM]))?;
    let scores = ScoreVector::build(&graph, &outcomes, p, &config.channel)?;
    let estimate = scores.decode()?;
    let report = eps_recovery(&truth, &estimate, config.epsilon)?;
    // No 1-bits: every one-bit is trivially recovered.
    let overlap = report.overlap.unwrap_or(1.0);

    Ok(TrialRecord {
        result: TrialResult {
            m,
            family,
            multi,
            outcome: TrialOutcome::Decoded,
            ones: truth.ones(),
            success90: overlap > SUCCESS_OVERLAP,
            overlap,
            eps_ok: report.eps_ok,
            hamming: report.hamming,
            seed,
        },
        truth,
        scores: Some(scores),
        estimate: Some(estimate),
        report: Some(report),
    })
}
