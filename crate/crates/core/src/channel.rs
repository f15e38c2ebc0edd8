//! Noisy additive queries.
//!
//! Noise acts per read: an agent in `d` queries is read `d` times, and every
//! copy of a multi-edge is a separate read. Reads consume the stream in
//! canonical edge order, so outcomes are a pure function of
//! `(graph, truth, channel, seed)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::design::PoolingGraph;
use crate::error::{Error, Result};
use crate::model::{ChannelMatrix, GroundTruth};

/// Observed result `σ̂_j` of every query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOutcomes {
    pub results: Vec<u64>,
}

/// Sends one bit through the channel. Degenerate probabilities (0 or 1) do
/// not touch the stream.
#[inline]
pub fn read_bit<R: Rng + ?Sized>(bit: bool, channel: &ChannelMatrix, rng: &mut R) -> bool {
    let p = if bit { channel.s11() } else { channel.s01() };
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        rng.gen_bool(p)
    }
}

pub fn run_queries<R: Rng + ?Sized>(
    graph: &PoolingGraph,
    truth: &GroundTruth,
    channel: &ChannelMatrix,
    rng: &mut R,
) -> Result<QueryOutcomes> {
    if truth.len() != graph.n() {
        return Err(Error::invalid(format!(
            "ground truth has {} bits but the graph has {} agents",
            truth.len(),
            graph.n()
        )));
    }
    let bits = truth.bits();
    let mut results = vec![0u64; graph.m()];
    for e in graph.edges() {
        let bit = bits[e.agent as usize];
        let r = &mut results[e.query as usize];
        for _ in 0..e.multiplicity {
            *r += read_bit(bit, channel, rng) as u64;
        }
    }
    Ok(QueryOutcomes { results })
}

/// `p_S = p (s11 - s01) + s01`, the probability that a read of a
/// `Be(p)` bit comes back as one.
pub fn effective_p(p: f64, channel: &ChannelMatrix) -> f64 {
    p * channel.gap() + channel.s01()
}
