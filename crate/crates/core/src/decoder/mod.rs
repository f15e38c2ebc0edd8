//! Score-and-threshold decoder.
//!
//! Every agent sums the results of the distinct queries it belongs to
//! (`Ψ_i`), subtracts the expected contribution of its second neighbourhood
//! (`C_i`), and reports one iff the centred score exceeds its threshold `T_i`.
//! `C_i` and `T_i` depend on the prior `p`, never on the realised number of
//! ones.

pub mod bounds;

use serde::{Deserialize, Serialize};

use crate::channel::{effective_p, QueryOutcomes};
use crate::design::PoolingGraph;
use crate::error::{Error, Result};
use crate::model::ChannelMatrix;

/// Raw scores, centres and thresholds for every agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub psi: Vec<u64>,
    pub center: Vec<f64>,
    pub threshold: Vec<f64>,
}

impl ScoreVector {
    /// Runs the full scoring pipeline on one graph and its outcomes.
    pub fn build(
        graph: &PoolingGraph,
        outcomes: &QueryOutcomes,
        p: f64,
        channel: &ChannelMatrix,
    ) -> Result<Self> {
        let psi = compute_scores(graph, outcomes)?;
        let center = center(graph, p, channel)?;
        let l = compute_l(graph.n(), p, channel)?;
        let m = graph.m() as u64;
        let threshold = graph
            .agent_degrees()
            .into_iter()
            .map(|d| threshold(d, channel, l, m, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreVector {
            psi,
            center,
            threshold,
        })
    }

    pub fn decode(&self) -> Result<Vec<bool>> {
        decode(&self.psi, &self.center, &self.threshold)
    }
}

/// `Ψ_i`: sum of `σ̂_j` over the distinct queries containing agent `i`.
/// A multi-edge contributes its query's result once.
pub fn compute_scores(graph: &PoolingGraph, outcomes: &QueryOutcomes) -> Result<Vec<u64>> {
    if outcomes.results.len() != graph.m() {
        return Err(Error::invalid(format!(
            "{} query results for a graph with {} queries",
            outcomes.results.len(),
            graph.m()
        )));
    }
    Ok((0..graph.n())
        .map(|i| {
            graph
                .agent_edges(i)
                .iter()
                .map(|e| outcomes.results[e.query as usize])
                .sum()
        })
        .collect())
}

/// `C_i = (Γ Δ_i* - Δ_i) p_S`, the expected neighbourhood part of `Ψ_i`.
pub fn center(graph: &PoolingGraph, p: f64, channel: &ChannelMatrix) -> Result<Vec<f64>> {
    check_probability(p, "p")?;
    let ps = effective_p(p, channel);
    let gamma = graph.gamma() as f64;
    Ok(graph
        .agent_degrees()
        .into_iter()
        .zip(graph.distinct_agent_degrees())
        .map(|(d, ds)| (gamma * ds as f64 - d as f64) * ps)
        .collect())
}

/// Rate constant `L = (s11 - s01)^2 / (2 n p_S)`.
pub fn compute_l(n: usize, p: f64, channel: &ChannelMatrix) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    check_probability(p, "p")?;
    let ps = effective_p(p, channel);
    if ps <= 0.0 {
        return Err(Error::DegenerateChannel);
    }
    Ok(channel.gap().powi(2) / (2.0 * n as f64 * ps))
}

/// Optimal interpolation `α* = 1/2 + ln(1/p) / (2 L m)`, defined while
/// `L m > ln(1/p)`.
pub fn alpha_star(l: f64, m: u64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p = {p} must lie in (0, 1]")));
    }
    if !(l > 0.0) {
        return Err(Error::invalid(format!("L = {l} must be positive")));
    }
    let log_inv_p = (1.0 / p).ln();
    let lm = l * m as f64;
    if lm <= log_inv_p {
        return Err(Error::ThresholdUndefined {
            m,
            floor: log_inv_p / l,
        });
    }
    Ok(0.5 + log_inv_p / (2.0 * lm))
}

/// `T = Δ s11 - (1/2 - ln(1/p)/(2 L m)) Δ (s11 - s01)`, evaluated with the
/// agent's own degree.
pub fn threshold(delta_i: u64, channel: &ChannelMatrix, l: f64, m: u64, p: f64) -> Result<f64> {
    let alpha = alpha_star(l, m, p)?;
    let d = delta_i as f64;
    Ok(d * channel.s11() - (1.0 - alpha) * d * channel.gap())
}

/// `σ̃_i = 1` iff `Ψ_i - C_i > T_i`; ties decode to zero.
pub fn decode(psi: &[u64], centers: &[f64], thresholds: &[f64]) -> Result<Vec<bool>> {
    if psi.len() != centers.len() || psi.len() != thresholds.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} scores, {} centres, {} thresholds",
            psi.len(),
            centers.len(),
            thresholds.len()
        )));
    }
    Ok(psi
        .iter()
        .zip(centers)
        .zip(thresholds)
        .map(|((&s, &c), &t)| s as f64 - c > t)
        .collect())
}

pub(crate) fn check_probability(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}
