//! Plain-text edge list.
//!
//! ```text
//! n m gamma family multi
//! agent query multiplicity
//! ...
//! ```
//!
//! Edge lines are sorted by `(agent, query)`; the writer always emits this
//! canonical form, so equal graphs produce identical bytes.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{DesignSpec, Edge, Family, PoolingGraph};
use crate::error::{Error, Result};

pub fn to_edge_list(graph: &PoolingGraph) -> String {
    let s = graph.spec();
    let mut out = String::with_capacity(32 + graph.edges().len() * 16);
    let _ = writeln!(out, "{} {} {} {} {}", s.n, s.m, s.gamma, s.family, s.allow_multi);
    for e in graph.edges() {
        let _ = writeln!(out, "{} {} {}", e.agent, e.query, e.multiplicity);
    }
    out
}

pub fn write_edge_list<W: Write>(graph: &PoolingGraph, mut w: W) -> Result<()> {
    w.write_all(to_edge_list(graph).as_bytes())?;
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what}: {tok:?}"),
    })
}

pub fn read_edge_list<R: BufRead>(r: R) -> Result<PoolingGraph> {
    let mut spec = None;
    let mut edges = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        if spec.is_none() {
            let n = field(toks.next(), lineno, "n")?;
            let m = field(toks.next(), lineno, "m")?;
            let gamma = field(toks.next(), lineno, "gamma")?;
            let family: Family = field(toks.next(), lineno, "family")?;
            let multi = field(toks.next(), lineno, "multi flag")?;
            spec = Some(DesignSpec::new(n, m, gamma, family, multi).map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?);
        } else {
            edges.push(Edge {
                agent: field(toks.next(), lineno, "agent")?,
                query: field(toks.next(), lineno, "query")?,
                multiplicity: field(toks.next(), lineno, "multiplicity")?,
            });
        }
        if let Some(extra) = toks.next() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
    }
    let spec = spec.ok_or(Error::Parse {
        line: 1,
        message: "missing header line".into(),
    })?;
    PoolingGraph::from_edges(spec, &edges)
}

pub fn parse_edge_list(text: &str) -> Result<PoolingGraph> {
    read_edge_list(text.as_bytes())
}
