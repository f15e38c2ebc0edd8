//! Simulation laboratory for approximate recovery in the noisy pooled data
//! problem.
//!
//! `n` agents carry hidden bits. A non-adaptive pooling design assigns agents
//! to `m` queries; every query reports the sum of its members' bits, each bit
//! read through a noisy 2x2 channel. Agents add up the results of the distinct
//! queries they belong to, subtract the expected neighbourhood contribution,
//! and declare themselves "one" when the centred score clears a threshold.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: ground truth, channel matrix and recovery metrics.
//! - [`design`]: Bernoulli, one-sided regular and doubly regular pooling graphs.
//! - [`channel`]: noisy additive queries.
//! - [`decoder`]: scores, centring, thresholds and the closed-form query bounds.
//! - [`experiment`]: seeded trials, sweeps and aggregation.
//! - [`cli`]: the `pooldata` command-line surface.

pub mod channel;
pub mod cli;
pub mod decoder;
pub mod design;
mod error;
pub mod experiment;
pub mod model;
pub mod seed;

pub use channel::{effective_p, read_bit, run_queries, QueryOutcomes};
pub use decoder::bounds::{
    counting_bound, entropy, error_exponents, required_queries, BoundReport, ErrorExponents,
};
pub use decoder::{
    alpha_star, center, compute_l, compute_scores, decode, threshold, ScoreVector,
};
pub use design::{
    degree_sequence, distinct_degrees, generate, generate_bernoulli, generate_doubly_regular,
    generate_one_sided, simplify, DegreeSequence, DesignSpec, Edge, Family, PoolingGraph,
};
pub use error::{Error, Result};
pub use experiment::{
    run_sweep, run_trial, AggregateRow, TrialConfig, TrialOutcome, TrialResult,
};
pub use model::{
    eps_recovery, hamming_distance, overlap, sample_ground_truth, ChannelMatrix, GroundTruth,
    Prior, RecoveryReport,
};
