//! Ground truth, channel matrix and recovery metrics.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden bit vector together with its number of 1-bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    bits: Vec<bool>,
    ones: usize,
}

impl GroundTruth {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let ones = bits.iter().filter(|&&b| b).count();
        GroundTruth { bits, ones }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of agents with bit one (`k`).
    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// How the ground truth is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    /// Every bit is one independently with probability `p`.
    Bernoulli(f64),
    /// A uniformly random subset of exactly `k` agents has bit one.
    Fixed(usize),
}

impl Prior {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Prior::Bernoulli(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::invalid(format!("prior p = {p} is outside [0, 1]")))
            }
            Prior::Fixed(k) if k > n => {
                Err(Error::invalid(format!("prior k = {k} exceeds n = {n}")))
            }
            _ => Ok(()),
        }
    }

    /// The probability handed to the decoder when none is given explicitly.
    pub fn default_p(&self, n: usize) -> f64 {
        match *self {
            Prior::Bernoulli(p) => p,
            Prior::Fixed(k) => k as f64 / n as f64,
        }
    }
}

pub fn sample_ground_truth<R: Rng + ?Sized>(
    n: usize,
    prior: Prior,
    rng: &mut R,
) -> Result<GroundTruth> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    prior.validate(n)?;
    let bits = match prior {
        Prior::Bernoulli(p) => (0..n).map(|_| rng.gen_bool(p)).collect(),
        Prior::Fixed(k) => {
            let mut bits = vec![false; n];
            for i in index::sample(rng, n, k) {
                bits[i] = true;
            }
            bits
        }
    };
    Ok(GroundTruth::from_bits(bits))
}

/// Noisy read channel. `s11` is `Pr(read 1 | sent 1)` and `s01` is
/// `Pr(read 1 | sent 0)`; the remaining two entries are their complements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelMatrix {
    s11: f64,
    s01: f64,
}

impl ChannelMatrix {
    pub fn new(s11: f64, s01: f64) -> Result<Self> {
        for (name, v) in [("s11", s11), ("s01", s01)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if s11 - s01 <= 0.0 {
            return Err(Error::invalid(format!(
                "channel requires s11 > s01 (got s11 = {s11}, s01 = {s01})"
            )));
        }
        Ok(ChannelMatrix { s11, s01 })
    }

    pub fn identity() -> Self {
        ChannelMatrix { s11: 1.0, s01: 0.0 }
    }

    /// Z-channel: ones are lost with probability `s10`, zeros are never
    /// read as ones.
    pub fn z_channel(s10: f64) -> Result<Self> {
        Self::new(1.0 - s10, 0.0)
    }

    pub fn s11(&self) -> f64 {
        self.s11
    }

    pub fn s01(&self) -> f64 {
        self.s01
    }

    pub fn s10(&self) -> f64 {
        1.0 - self.s11
    }

    pub fn s00(&self) -> f64 {
        1.0 - self.s01
    }

    /// `s11 - s01`, strictly positive.
    pub fn gap(&self) -> f64 {
        self.s11 - self.s01
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub hamming: usize,
    /// `None` when the truth has no 1-bits.
    pub overlap: Option<f64>,
    pub eps_ok: bool,
    pub epsilon: f64,
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

pub fn hamming_distance(a: &[bool], b: &[bool]) -> Result<usize> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Fraction of true 1-bits that the estimate also marks as one.
pub fn overlap(truth: &GroundTruth, estimate: &[bool]) -> Result<f64> {
    check_len(truth.len(), estimate.len())?;
    if truth.ones() == 0 {
        return Err(Error::UndefinedMetric(
            "overlap needs at least one 1-bit in the ground truth".into(),
        ));
    }
    let hits = truth
        .bits()
        .iter()
        .zip(estimate)
        .filter(|(&t, &e)| t && e)
        .count();
    Ok(hits as f64 / truth.ones() as f64)
}

/// Checks `d_H(truth, estimate) <= 2 * epsilon * ones(truth)`.
pub fn eps_recovery(truth: &GroundTruth, estimate: &[bool], epsilon: f64) -> Result<RecoveryReport> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("epsilon = {epsilon} must be positive")));
    }
    let hamming = hamming_distance(truth.bits(), estimate)?;
    let overlap = match overlap(truth, estimate) {
        Ok(v) => Some(v),
        Err(Error::UndefinedMetric(_)) => None,
        Err(e) => return Err(e),
    };
    let budget = 2.0 * epsilon * truth.ones() as f64;
    Ok(RecoveryReport {
        hamming,
        overlap,
        eps_ok: hamming as f64 <= budget,
        epsilon,
    })
}
