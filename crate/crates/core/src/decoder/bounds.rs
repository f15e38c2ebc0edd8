//! Closed-form query bounds and error exponents.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use super::{alpha_star, compute_l};
use crate::error::{Error, Result};
use crate::model::ChannelMatrix;

/// Exponents and Markov tail bounds at `α*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorExponents {
    pub alpha: f64,
    /// `N_α = α² L m`, governs false positives.
    pub n_alpha: f64,
    /// `P_α = (1 - α)² L m`, governs false negatives.
    pub p_alpha: f64,
    /// Bound on `Pr(|false positives| > ε n p)`: `2 (1 - p) e^{-N_α} / (ε p)`.
    pub fp_tail: f64,
    /// Bound on `Pr(|false negatives| > ε n p)`: `2 e^{-P_α} / ε`.
    pub fn_tail: f64,
    /// Both tails are at most `δ`.
    pub meets_delta: bool,
}

pub fn error_exponents(l: f64, m: u64, p: f64, epsilon: f64, delta: f64) -> Result<ErrorExponents> {
    check_open_unit(epsilon, "epsilon")?;
    let alpha = alpha_star(l, m, p)?;
    let lm = l * m as f64;
    let n_alpha = alpha * alpha * lm;
    let p_alpha = (1.0 - alpha).powi(2) * lm;
    let fp_tail = 2.0 * (1.0 - p) * (-n_alpha).exp() / (epsilon * p);
    let fn_tail = 2.0 * (-p_alpha).exp() / epsilon;
    Ok(ErrorExponents {
        alpha,
        n_alpha,
        p_alpha,
        fp_tail,
        fn_tail,
        meets_delta: fp_tail <= delta && fn_tail <= delta,
    })
}

/// Everything the query-count bound says about one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub l: f64,
    /// Right-hand side of the sufficient condition `m > rhs`.
    pub rhs: f64,
    /// Smallest integer strictly above `rhs`.
    pub m_min: u64,
    /// Smallest integer strictly above `ln(1/p) / L`, below which no
    /// threshold exists.
    pub m_floor: u64,
    pub alpha_star: f64,
    pub n_alpha: f64,
    pub p_alpha: f64,
    pub fp_tail: f64,
    pub fn_tail: f64,
}

/// Number of queries sufficient for ε-recovery with probability `1 - δ`:
///
/// `m > (1/L) (ln(1/p) + 2 ln(2/(εδ)) + 2 sqrt(ln(2/(εδ)) ln(2/(εδp))))`.
pub fn required_queries(
    n: usize,
    p: f64,
    epsilon: f64,
    delta: f64,
    channel: &ChannelMatrix,
) -> Result<BoundReport> {
    check_open_unit(p, "p")?;
    check_open_unit(epsilon, "epsilon")?;
    check_open_unit(delta, "delta")?;
    let l = compute_l(n, p, channel)?;
    let log_inv_p = (1.0 / p).ln();
    let a = (2.0 / (epsilon * delta)).ln();
    let b = (2.0 / (epsilon * delta * p)).ln();
    let rhs = (log_inv_p + 2.0 * a + 2.0 * (a * b).sqrt()) / l;
    let m_min = rhs.floor() as u64 + 1;
    let m_floor = (log_inv_p / l).floor() as u64 + 1;
    let ex = error_exponents(l, m_min, p, epsilon, delta)?;
    Ok(BoundReport {
        n,
        p,
        epsilon,
        delta,
        l,
        rhs,
        m_min,
        m_floor,
        alpha_star: ex.alpha,
        n_alpha: ex.n_alpha,
        p_alpha: ex.p_alpha,
        fp_tail: ex.fp_tail,
        fn_tail: ex.fn_tail,
    })
}

/// Binary entropy in nats, with `H(0) = H(1) = 0`. NaN outside `[0, 1]`.
pub fn entropy(alpha: f64) -> f64 {
    if !(0.0..=1.0).contains(&alpha) {
        return f64::NAN;
    }
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.ln() };
    term(alpha) + term(1.0 - alpha)
}

/// Information-theoretic lower bound `2 n H(k/n) ln(n/k) / ln k`.
pub fn counting_bound(n: usize, k: usize) -> Result<f64> {
    if k < 2 || k >= n {
        return Err(Error::invalid(format!(
            "counting bound needs 2 <= k < n (got n = {n}, k = {k})"
        )));
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(2.0 * nf * entropy(kf / nf) * (nf / kf).ln() / kf.ln())
}

fn check_open_unit(x: f64, name: &str) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}
