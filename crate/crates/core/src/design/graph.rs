use serde::{Deserialize, Serialize};

use super::DesignSpec;
use crate::error::{Error, Result};

/// One distinct (agent, query) pair with its edge multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub agent: u32,
    pub query: u32,
    pub multiplicity: u32,
}

/// Bipartite multigraph between agents and queries.
///
/// Edges are kept in canonical form: one entry per distinct pair, sorted by
/// `(agent, query)`, multiplicity at least one. Two graphs with the same spec
/// and edge multiset therefore compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolingGraph {
    spec: DesignSpec,
    edges: Vec<Edge>,
    /// `edges[agent_offsets[i]..agent_offsets[i + 1]]` are agent `i`'s edges.
    agent_offsets: Vec<usize>,
}

/// Stub-level view grouped by query: `agents[offsets[j]..offsets[j + 1]]`
/// lists the agent at every half-edge of query `j`, repeated per multiplicity.
#[derive(Debug, Clone)]
pub(crate) struct SlotGraph {
    pub n: usize,
    pub offsets: Vec<usize>,
    pub agents: Vec<u32>,
}

impl SlotGraph {
    /// Every query holds exactly `gamma` slots.
    pub fn regular(n: usize, m: usize, gamma: usize, agents: Vec<u32>) -> Self {
        debug_assert_eq!(agents.len(), m * gamma);
        SlotGraph {
            n,
            offsets: (0..=m).map(|j| j * gamma).collect(),
            agents,
        }
    }

    pub fn m(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn query(&self, j: usize) -> &[u32] {
        &self.agents[self.offsets[j]..self.offsets[j + 1]]
    }
}

impl PoolingGraph {
    /// Builds the canonical graph from an arbitrary multiset of
    /// `(agent, query)` pairs.
    pub fn from_pairs<I>(spec: DesignSpec, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
        let (n, m) = (spec.n, spec.m);
        let mut counts = vec![0usize; n + 1];
        for &(a, q) in &pairs {
            if a as usize >= n || q as usize >= m {
                return Err(Error::invalid(format!(
                    "edge ({a}, {q}) out of range for n = {n}, m = {m}"
                )));
            }
            counts[a as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut cursor = counts.clone();
        let mut queries = vec![0u32; pairs.len()];
        for &(a, q) in &pairs {
            let c = &mut cursor[a as usize];
            queries[*c] = q;
            *c += 1;
        }
        let mut edges = Vec::with_capacity(pairs.len());
        let mut agent_offsets = Vec::with_capacity(n + 1);
        agent_offsets.push(0);
        for a in 0..n {
            let bucket = &mut queries[counts[a]..counts[a + 1]];
            bucket.sort_unstable();
            let mut k = 0;
            while k < bucket.len() {
                let q = bucket[k];
                let mut run = 1;
                while k + run < bucket.len() && bucket[k + run] == q {
                    run += 1;
                }
                edges.push(Edge {
                    agent: a as u32,
                    query: q,
                    multiplicity: run as u32,
                });
                k += run;
            }
            agent_offsets.push(edges.len());
        }
        Ok(PoolingGraph {
            spec,
            edges,
            agent_offsets,
        })
    }

    /// Builds a graph from explicit edges. Repeated pairs are merged.
    pub fn from_edges(spec: DesignSpec, edges: &[Edge]) -> Result<Self> {
        if let Some(e) = edges.iter().find(|e| e.multiplicity == 0) {
            return Err(Error::invalid(format!(
                "edge ({}, {}) has multiplicity 0",
                e.agent, e.query
            )));
        }
        let pairs = edges
            .iter()
            .flat_map(|e| std::iter::repeat((e.agent, e.query)).take(e.multiplicity as usize));
        Self::from_pairs(spec, pairs)
    }

    pub(crate) fn from_slots(spec: DesignSpec, slots: &SlotGraph) -> Result<Self> {
        let pairs = (0..slots.m())
            .flat_map(|j| slots.query(j).iter().map(move |&a| (a, j as u32)));
        Self::from_pairs(spec, pairs)
    }

    pub(crate) fn to_slots(&self) -> SlotGraph {
        let m = self.m();
        let mut offsets = vec![0usize; m + 1];
        for e in &self.edges {
            offsets[e.query as usize + 1] += e.multiplicity as usize;
        }
        for j in 0..m {
            offsets[j + 1] += offsets[j];
        }
        let mut cursor = offsets.clone();
        let mut agents = vec![0u32; offsets[m]];
        // Edges are agent-sorted, so every query's slots end up agent-sorted.
        for e in &self.edges {
            let c = &mut cursor[e.query as usize];
            for _ in 0..e.multiplicity {
                agents[*c] = e.agent;
                *c += 1;
            }
        }
        SlotGraph {
            n: self.n(),
            offsets,
            agents,
        }
    }

    pub fn spec(&self) -> &DesignSpec {
        &self.spec
    }

    pub(crate) fn with_spec(mut self, spec: DesignSpec) -> Self {
        self.spec = spec;
        self
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn m(&self) -> usize {
        self.spec.m
    }

    pub fn gamma(&self) -> usize {
        self.spec.gamma
    }

    /// Distinct edges in canonical order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn agent_edges(&self, agent: usize) -> &[Edge] {
        &self.edges[self.agent_offsets[agent]..self.agent_offsets[agent + 1]]
    }

    /// Total number of half-edge pairs, counting multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges.iter().map(|e| e.multiplicity as u64).sum()
    }

    /// `Δ_i`: edges at each agent, counted with multiplicity.
    pub fn agent_degrees(&self) -> Vec<u64> {
        (0..self.n())
            .map(|i| self.agent_edges(i).iter().map(|e| e.multiplicity as u64).sum())
            .collect()
    }

    /// `Δ_i*`: distinct queries containing each agent.
    pub fn distinct_agent_degrees(&self) -> Vec<u64> {
        (0..self.n())
            .map(|i| (self.agent_offsets[i + 1] - self.agent_offsets[i]) as u64)
            .collect()
    }

    /// Edges at each query, counted with multiplicity.
    pub fn query_degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.m()];
        for e in &self.edges {
            deg[e.query as usize] += e.multiplicity as u64;
        }
        deg
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| e.multiplicity == 1)
    }

    /// Sum over edges of `multiplicity - 1`.
    pub fn excess_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.multiplicity as u64 - 1).sum()
    }
}
