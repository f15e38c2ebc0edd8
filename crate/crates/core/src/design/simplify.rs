//! Degree-preserving removal of multi-edges.

use rand::Rng;

use super::{PoolingGraph, SlotGraph};
use crate::error::{Error, Result};

/// Swap attempts allowed per half-edge pair before giving up.
const ATTEMPTS_PER_EDGE: u64 = 100;

/// Removes every multi-edge by double-edge swaps while keeping both degree
/// vectors unchanged.
///
/// For a duplicated pair `(u, a)` a uniformly random other half-edge pair
/// `(v, b)` is drawn, and `{(u, a), (v, b)}` becomes `{(u, b), (v, a)}` when
/// neither new pair already exists. Fails with
/// [`Error::SimplificationFailed`] after `100 * |E|` attempts; callers may
/// retry with a fresh seed. The returned graph has `allow_multi = false`.
pub fn simplify<R: Rng + ?Sized>(graph: &PoolingGraph, rng: &mut R) -> Result<PoolingGraph> {
    let mut spec = *graph.spec();
    spec.allow_multi = false;
    if graph.is_simple() {
        return Ok(graph.clone().with_spec(spec));
    }
    let mut slots = graph.to_slots();
    simplify_slots(&mut slots, rng)?;
    PoolingGraph::from_slots(spec, &slots)
}

/// Works query by query. A successful swap never creates a new duplicate, so
/// queries already cleaned stay clean. Returns the number of swaps performed.
pub(crate) fn simplify_slots<R: Rng + ?Sized>(slots: &mut SlotGraph, rng: &mut R) -> Result<u64> {
    let m = slots.m();
    let n = slots.n;
    let total = slots.agents.len();

    for j in 0..m {
        let d = slots.offsets[j + 1] - slots.offsets[j];
        if d > n {
            return Err(Error::invalid(format!(
                "query {j} has {d} half-edges but only {n} agents exist"
            )));
        }
    }
    let mut agent_deg = vec![0usize; n];
    for &a in &slots.agents {
        agent_deg[a as usize] += 1;
    }
    if let Some((a, &d)) = agent_deg.iter().enumerate().find(|(_, &d)| d > m) {
        return Err(Error::invalid(format!(
            "agent {a} has {d} half-edges but only {m} queries exist"
        )));
    }

    let mut query_of = Vec::with_capacity(total);
    for j in 0..m {
        query_of.extend(std::iter::repeat(j as u32).take(slots.offsets[j + 1] - slots.offsets[j]));
    }

    let budget = ATTEMPTS_PER_EDGE * total as u64;
    let mut attempts = 0u64;
    let mut swaps = 0u64;
    let mut seen = vec![0u32; n];
    let mut stamp = 0u32;

    for j in 0..m {
        loop {
            stamp = stamp.wrapping_add(1);
            if stamp == 0 {
                seen.iter_mut().for_each(|s| *s = 0);
                stamp = 1;
            }
            let (lo, hi) = (slots.offsets[j], slots.offsets[j + 1]);
            let mut dup = None;
            for s in lo..hi {
                let a = slots.agents[s] as usize;
                if seen[a] == stamp {
                    dup = Some(s);
                    break;
                }
                seen[a] = stamp;
            }
            let Some(s) = dup else { break };
            let u = slots.agents[s];

            loop {
                if attempts >= budget {
                    return Err(Error::SimplificationFailed {
                        attempts,
                        remaining: count_excess(slots),
                    });
                }
                attempts += 1;
                let t = rng.gen_range(0..total);
                let b = query_of[t] as usize;
                let v = slots.agents[t];
                if b == j || v == u {
                    continue;
                }
                if slots.query(j).contains(&v) || slots.query(b).contains(&u) {
                    continue;
                }
                slots.agents.swap(s, t);
                swaps += 1;
                break;
            }
        }
    }
    Ok(swaps)
}

fn count_excess(slots: &SlotGraph) -> u64 {
    let mut excess = 0u64;
    let mut buf = Vec::new();
    for j in 0..slots.m() {
        buf.clear();
        buf.extend_from_slice(slots.query(j));
        buf.sort_unstable();
        excess += buf.windows(2).filter(|w| w[0] == w[1]).count() as u64;
    }
    excess
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{generate_doubly_regular, DesignSpec, Edge, Family};
    use crate::seed::stream;
    use proptest::prelude::*;

    fn multi_spec(n: usize, m: usize, gamma: usize) -> DesignSpec {
        DesignSpec::new(n, m, gamma, Family::DoublyRegular, true).unwrap()
    }

    #[test]
    fn simple_input_is_unchanged() {
        let g = PoolingGraph::from_pairs(multi_spec(3, 2, 2), [(0, 0), (1, 0), (1, 1), (2, 1)]).unwrap();
        let s = simplify(&g, &mut stream(1)).unwrap();
        assert_eq!(s.edges(), g.edges());
        assert!(!s.spec().allow_multi);
    }

    #[test]
    fn two_double_edges_become_a_four_cycle() {
        let g = PoolingGraph::from_pairs(multi_spec(2, 2, 2), [(0, 0), (0, 0), (1, 1), (1, 1)]).unwrap();
        let s = simplify(&g, &mut stream(2)).unwrap();
        let expect: Vec<Edge> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .into_iter()
            .map(|(agent, query)| Edge { agent, query, multiplicity: 1 })
            .collect();
        assert_eq!(s.edges(), expect.as_slice());
    }

    #[test]
    fn impossible_degrees_rejected() {
        // Agent 0 needs three distinct queries but only two exist.
        let g = PoolingGraph::from_pairs(multi_spec(2, 2, 2), [(0, 0), (0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(simplify(&g, &mut stream(3)).is_err());
    }

    #[test]
    fn stuck_repair_reports_failure() {
        // Query 0 needs three distinct agents but only agents 0 and 1 have
        // half-edges, so no swap can ever clear the duplicate.
        let g = PoolingGraph::from_pairs(multi_spec(4, 2, 2), [(0, 0), (0, 0), (1, 0), (1, 1)]).unwrap();
        match simplify(&g, &mut stream(4)) {
            Err(Error::SimplificationFailed { attempts, remaining }) => {
                assert_eq!(attempts, 400);
                assert_eq!(remaining, 1);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn thousand_doubly_regular_repairs_preserve_degrees() {
        let spec = multi_spec(100, 50, 10);
        let mut rng = stream(5);
        for _ in 0..1000 {
            let g = generate_doubly_regular(&spec, &mut rng).unwrap();
            let s = simplify(&g, &mut rng).unwrap();
            assert!(s.is_simple());
            assert_eq!(s.agent_degrees(), g.agent_degrees());
            assert_eq!(s.query_degrees(), g.query_degrees());
        }
    }

    proptest! {
        #[test]
        fn simplify_preserves_degree_vectors(n in 2usize..40, m in 2usize..40, g in 1usize..10, seed: u64) {
            prop_assume!(g <= n);
            let spec = multi_spec(n, m, g);
            let mut rng = stream(seed);
            let graph = generate_doubly_regular(&spec, &mut rng).unwrap();
            prop_assume!(graph.agent_degrees().iter().all(|&d| d as usize <= m));
            if let Ok(s) = simplify(&graph, &mut rng) {
                prop_assert!(s.is_simple());
                prop_assert_eq!(s.agent_degrees(), graph.agent_degrees());
                prop_assert_eq!(s.query_degrees(), graph.query_degrees());
            }
        }
    }
}
