//! Random pooling designs.
//!
//! Three families are supported, each with the expected number of agents per
//! query equal to `gamma`:
//!
//! - **Bernoulli**: every (agent, query) pair is an edge independently with
//!   probability `gamma / n`. Always simple.
//! - **One-sided regular**: every query draws exactly `gamma` agents, with
//!   replacement (multi) or as a uniform subset (simple).
//! - **Doubly regular**: agent degrees differ by at most one, every query has
//!   exactly `gamma` half-edges, and half-edges are paired by a uniformly
//!   random matching (configuration model). The simple variant repairs the
//!   matching with degree-preserving double-edge swaps.
//!
//! The simple doubly regular variant is matching-then-repair, so it is not
//! exactly uniform over simple graphs with the given degrees.

mod edgelist;
mod graph;
mod simplify;

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use edgelist::{parse_edge_list, read_edge_list, to_edge_list, write_edge_list};
pub use graph::{Edge, PoolingGraph};
pub(crate) use graph::SlotGraph;
pub use simplify::simplify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bernoulli,
    OneSidedRegular,
    DoublyRegular,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::Bernoulli,
        Family::OneSidedRegular,
        Family::DoublyRegular,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Bernoulli => "bernoulli",
            Family::OneSidedRegular => "one_sided_regular",
            Family::DoublyRegular => "doubly_regular",
        }
    }

    /// Stable numeric id used in seed derivation.
    pub fn id(&self) -> u64 {
        match self {
            Family::Bernoulli => 0,
            Family::OneSidedRegular => 1,
            Family::DoublyRegular => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown design family {s:?} (expected bernoulli, one_sided_regular or doubly_regular)"
                ))
            })
    }
}

/// Parameters of a pooling design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub n: usize,
    pub m: usize,
    pub gamma: usize,
    pub family: Family,
    pub allow_multi: bool,
}

impl DesignSpec {
    pub fn new(n: usize, m: usize, gamma: usize, family: Family, allow_multi: bool) -> Result<Self> {
        let spec = DesignSpec {
            n,
            m,
            gamma,
            family,
            allow_multi,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.gamma == 0 {
            return Err(Error::invalid(format!(
                "n, m and gamma must be at least 1 (got n = {}, m = {}, gamma = {})",
                self.n, self.m, self.gamma
            )));
        }
        if self.n > u32::MAX as usize || self.m > u32::MAX as usize {
            return Err(Error::invalid("n and m must fit in 32 bits"));
        }
        if self.family == Family::Bernoulli && self.allow_multi {
            return Err(Error::invalid("the bernoulli family has no multi-edge variant"));
        }
        if (self.family == Family::Bernoulli || !self.allow_multi) && self.gamma > self.n {
            return Err(Error::invalid(format!(
                "gamma = {} exceeds n = {} in a simple design",
                self.gamma, self.n
            )));
        }
        Ok(())
    }

    /// Average agent degree `m * gamma / n`.
    pub fn average_degree(&self) -> f64 {
        (self.m * self.gamma) as f64 / self.n as f64
    }
}

/// Returns a warning when `gamma` lies outside the window
/// `sqrt(n / (m p)) <= gamma <= n` in which the asymptotic analysis applies
/// (the `n^δ` slack factors are dropped). Outside the window the design is
/// still generated.
pub fn admissibility_warning(spec: &DesignSpec, p: f64) -> Option<String> {
    let lower = (spec.n as f64 / (spec.m as f64 * p)).sqrt();
    let g = spec.gamma as f64;
    if g < lower {
        Some(format!(
            "gamma = {} is below sqrt(n/(m p)) = {lower:.2}; outside the analysed regime",
            spec.gamma
        ))
    } else if spec.gamma >= spec.n {
        Some(format!(
            "gamma = {} is not sublinear in n = {}; outside the analysed regime",
            spec.gamma, spec.n
        ))
    } else {
        None
    }
}

/// Agent degrees with `|Δ_i - Δ_j| <= 1` and `Σ Δ_i = m * gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<u64>,
    /// Numerator `m * gamma` of the average degree.
    pub total: u64,
}

impl DegreeSequence {
    pub fn average(&self) -> f64 {
        self.total as f64 / self.degrees.len() as f64
    }
}

/// Exactly `(m * gamma) mod n` uniformly chosen agents get the larger degree
/// `ceil(m * gamma / n)`; the rest get `floor(m * gamma / n)`.
pub fn degree_sequence<R: Rng + ?Sized>(n: usize, m: usize, gamma: usize, rng: &mut R) -> DegreeSequence {
    assert!(n >= 1 && m >= 1 && gamma >= 1, "n, m and gamma must be positive");
    let total = (m as u64) * (gamma as u64);
    let base = total / n as u64;
    let extra = (total % n as u64) as usize;
    let mut degrees = vec![base; n];
    for i in index::sample(rng, n, extra) {
        degrees[i] += 1;
    }
    DegreeSequence { degrees, total }
}

/// Dispatches on `spec.family`.
pub fn generate<R: Rng + ?Sized>(spec: &DesignSpec, rng: &mut R) -> Result<PoolingGraph> {
    match spec.family {
        Family::Bernoulli => generate_bernoulli(spec, rng),
        Family::OneSidedRegular => generate_one_sided(spec, rng),
        Family::DoublyRegular => generate_doubly_regular(spec, rng),
    }
}

fn expect_family(spec: &DesignSpec, family: Family) -> Result<()> {
    spec.validate()?;
    if spec.family != family {
        return Err(Error::invalid(format!(
            "spec family is {}, expected {family}",
            spec.family
        )));
    }
    Ok(())
}

/// Configuration model: agent stubs are shuffled and matched positionally
/// against query stubs (`gamma` per query).
pub fn generate_doubly_regular<R: Rng + ?Sized>(spec: &DesignSpec, rng: &mut R) -> Result<PoolingGraph> {
    expect_family(spec, Family::DoublyRegular)?;
    let seq = degree_sequence(spec.n, spec.m, spec.gamma, rng);
    let mut stubs = Vec::with_capacity(seq.total as usize);
    for (agent, &d) in seq.degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat(agent as u32).take(d as usize));
    }
    stubs.shuffle(rng);
    let mut slots = SlotGraph::regular(spec.n, spec.m, spec.gamma, stubs);
    if !spec.allow_multi {
        simplify::simplify_slots(&mut slots, rng)?;
    }
    PoolingGraph::from_slots(*spec, &slots)
}

/// Every query independently draws `gamma` agents, with replacement when
/// multi-edges are allowed and as a uniform subset otherwise.
pub fn generate_one_sided<R: Rng + ?Sized>(spec: &DesignSpec, rng: &mut R) -> Result<PoolingGraph> {
    expect_family(spec, Family::OneSidedRegular)?;
    let (n, m, gamma) = (spec.n, spec.m, spec.gamma);
    let mut pairs = Vec::with_capacity(m * gamma);
    for j in 0..m as u32 {
        if spec.allow_multi {
            for _ in 0..gamma {
                pairs.push((rng.gen_range(0..n) as u32, j));
            }
        } else {
            pairs.extend(index::sample(rng, n, gamma).into_iter().map(|a| (a as u32, j)));
        }
    }
    PoolingGraph::from_pairs(*spec, pairs)
}

/// Each pair is an edge independently with probability `gamma / n`.
pub fn generate_bernoulli<R: Rng + ?Sized>(spec: &DesignSpec, rng: &mut R) -> Result<PoolingGraph> {
    expect_family(spec, Family::Bernoulli)?;
    let prob = spec.gamma as f64 / spec.n as f64;
    PoolingGraph::from_pairs(*spec, bernoulli_pairs(spec.n, spec.m, prob, rng))
}

/// Independent coin flips over the `n * m` pairs in query-major order, with
/// geometric skipping between successes.
pub(crate) fn bernoulli_pairs<R: Rng + ?Sized>(n: usize, m: usize, prob: f64, rng: &mut R) -> Vec<(u32, u32)> {
    let cells = (n as u64) * (m as u64);
    let mut pairs = Vec::new();
    if prob <= 0.0 {
        return pairs;
    }
    let push = |pairs: &mut Vec<(u32, u32)>, cell: u64| {
        pairs.push(((cell % n as u64) as u32, (cell / n as u64) as u32));
    };
    if prob >= 1.0 {
        for cell in 0..cells {
            push(&mut pairs, cell);
        }
        return pairs;
    }
    pairs.reserve((cells as f64 * prob * 1.1) as usize);
    let log_q = (-prob).ln_1p();
    let mut cell: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (cells - cell) as f64 {
            break;
        }
        cell += skip as u64;
        push(&mut pairs, cell);
        cell += 1;
        if cell >= cells {
            break;
        }
    }
    pairs
}

/// `Δ_i*` for every agent.
pub fn distinct_degrees(graph: &PoolingGraph) -> Vec<u64> {
    graph.distinct_agent_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;
    use proptest::prelude::*;

    fn spec(n: usize, m: usize, g: usize, family: Family, multi: bool) -> DesignSpec {
        DesignSpec::new(n, m, g, family, multi).unwrap()
    }

    fn sorted(mut v: Vec<u64>) -> Vec<u64> {
        v.sort_unstable();
        v
    }

    #[test]
    fn spec_validation() {
        assert!(DesignSpec::new(0, 1, 1, Family::DoublyRegular, true).is_err());
        assert!(DesignSpec::new(3, 1, 4, Family::Bernoulli, false).is_err());
        assert!(DesignSpec::new(3, 1, 2, Family::Bernoulli, true).is_err());
        assert!(DesignSpec::new(3, 1, 4, Family::OneSidedRegular, false).is_err());
        assert!(DesignSpec::new(3, 1, 4, Family::OneSidedRegular, true).is_ok());
        assert!(DesignSpec::new(2, 1, 4, Family::DoublyRegular, true).is_ok());
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert!("regular".parse::<Family>().is_err());
    }

    #[test]
    fn degree_sequence_examples() {
        let mut rng = stream(5);
        let s = degree_sequence(5, 2, 3, &mut rng);
        assert_eq!(sorted(s.degrees.clone()), vec![1, 1, 1, 1, 2]);
        assert_eq!(s.total, 6);
        assert_eq!(degree_sequence(4, 2, 2, &mut rng).degrees, vec![1; 4]);
        assert_eq!(degree_sequence(3, 3, 2, &mut rng).degrees, vec![2; 3]);
    }

    #[test]
    fn larger_degrees_are_not_index_biased() {
        // 1 extra stub among 4 agents: each agent should get it ~1/4 of the time.
        let mut rng = stream(6);
        let mut hits = [0u32; 4];
        for _ in 0..4000 {
            let s = degree_sequence(4, 1, 5, &mut rng);
            let i = s.degrees.iter().position(|&d| d == 2).unwrap();
            hits[i] += 1;
        }
        for h in hits {
            assert!((h as f64 - 1000.0).abs() < 4.0 * (4000.0f64 * 0.25 * 0.75).sqrt());
        }
    }

    #[test]
    fn doubly_regular_small_examples() {
        let mut rng = stream(7);
        let g = generate_doubly_regular(&spec(4, 2, 2, Family::DoublyRegular, true), &mut rng).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.query_degrees(), vec![2, 2]);
        assert_eq!(g.agent_degrees(), vec![1; 4]);
        assert!(g.is_simple());

        let g = generate_doubly_regular(&spec(2, 1, 4, Family::DoublyRegular, true), &mut rng).unwrap();
        assert_eq!(g.query_degrees(), vec![4]);
        assert_eq!(g.agent_degrees(), vec![2, 2]);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn doubly_regular_rejects_wrong_family() {
        let mut rng = stream(8);
        let s = spec(4, 2, 2, Family::OneSidedRegular, true);
        assert!(generate_doubly_regular(&s, &mut rng).is_err());
        assert!(generate_bernoulli(&s, &mut rng).is_err());
    }

    #[test]
    fn one_sided_examples() {
        let mut rng = stream(9);
        let g = generate_one_sided(&spec(5, 3, 1, Family::OneSidedRegular, true), &mut rng).unwrap();
        assert_eq!(g.query_degrees(), vec![1, 1, 1]);
        assert_eq!(g.agent_degrees().iter().sum::<u64>(), 3);

        let g = generate_one_sided(&spec(3, 1, 3, Family::OneSidedRegular, false), &mut rng).unwrap();
        assert_eq!(g.agent_degrees(), vec![1, 1, 1]);
        assert!(g.is_simple());
    }

    #[test]
    fn one_sided_multi_self_pair_rate() {
        // 20 generations of (n=10, m=1000, gamma=2) so that ±0.01 is ~4.7σ.
        let mut rng = stream(10);
        let s = spec(10, 1000, 2, Family::OneSidedRegular, true);
        let mut self_pairs = 0;
        for _ in 0..20 {
            let g = generate_one_sided(&s, &mut rng).unwrap();
            self_pairs += g.edges().iter().filter(|e| e.multiplicity == 2).count();
        }
        let frac = self_pairs as f64 / 20_000.0;
        assert!((frac - 0.1).abs() <= 0.01, "self-pair fraction {frac}");
    }

    #[test]
    fn bernoulli_complete_and_empty() {
        let mut rng = stream(11);
        let g = generate_bernoulli(&spec(4, 2, 4, Family::Bernoulli, false), &mut rng).unwrap();
        assert_eq!(g.edges().len(), 8);
        assert!(g.is_simple());
        assert!(bernoulli_pairs(10, 10, 0.0, &mut rng).is_empty());
    }

    #[test]
    fn bernoulli_mean_query_degree() {
        let mut rng = stream(12);
        let s = spec(100, 100, 10, Family::Bernoulli, false);
        let mut total = 0u64;
        for _ in 0..1000 {
            total += generate_bernoulli(&s, &mut rng).unwrap().edge_count();
        }
        let mean = total as f64 / 100_000.0;
        assert!((mean - 10.0).abs() <= 0.1, "mean query degree {mean}");
    }

    #[test]
    fn distinct_degree_examples() {
        let s = spec(2, 1, 3, Family::DoublyRegular, true);
        let g = PoolingGraph::from_pairs(s, [(0, 0), (0, 0), (0, 0)]).unwrap();
        assert_eq!(g.agent_degrees(), vec![3, 0]);
        assert_eq!(distinct_degrees(&g), vec![1, 0]);
    }

    #[test]
    fn admissibility_window() {
        let s = spec(1000, 500, 100, Family::DoublyRegular, false);
        assert!(admissibility_warning(&s, 0.006).is_none());
        let s = spec(1000, 10, 2, Family::DoublyRegular, false);
        assert!(admissibility_warning(&s, 0.006).is_some());
    }

    proptest! {
        #[test]
        fn degree_sequence_sum_and_spread(n in 1usize..300, m in 1usize..300, g in 1usize..50, seed: u64) {
            let s = degree_sequence(n, m, g, &mut stream(seed));
            prop_assert_eq!(s.degrees.iter().sum::<u64>(), (m * g) as u64);
            let max = *s.degrees.iter().max().unwrap();
            let min = *s.degrees.iter().min().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn regular_query_degrees(n in 1usize..80, m in 1usize..80, g in 1usize..20, multi: bool, seed: u64) {
            let mut rng = stream(seed);
            prop_assume!(multi || g <= n);
            let s = spec(n, m, g, Family::OneSidedRegular, multi);
            let graph = generate_one_sided(&s, &mut rng).unwrap();
            prop_assert!(graph.query_degrees().iter().all(|&d| d == g as u64));
            if !multi {
                prop_assert!(graph.is_simple());
            }
            let s = spec(n, m, g, Family::DoublyRegular, true);
            let graph = generate_doubly_regular(&s, &mut rng).unwrap();
            prop_assert!(graph.query_degrees().iter().all(|&d| d == g as u64));
            let deg = graph.agent_degrees();
            prop_assert!(deg.iter().max().unwrap() - deg.iter().min().unwrap() <= 1);
            prop_assert_eq!(deg.iter().sum::<u64>(), (m * g) as u64);
        }
    }
}
