//! Labeled simple graphs and the cover/clique predicates shared by the
//! builder, the staged engine, and the oracle.
//!
//! Vertex `v` of an input graph carries label `v`, 1-based, so a vertex set
//! and its label set coincide and both are stored as a [`LabelSet`].

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::labels::{LabelSet, MAX_LABEL};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: endpoint {vertex} outside 1..={order}")]
    OutOfRange { line: usize, vertex: u32, order: u32 },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u32 },
    #[error("missing `p edge <n> <m>` header")]
    MissingHeader,
    #[error("order {0} exceeds the supported maximum of {MAX_LABEL}")]
    OrderTooLarge(u32),
    #[error("vertex {vertex} is not present")]
    AbsentVertex { vertex: usize },
}

/// Simple undirected graph on vertices `1..=order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    order: u32,
    adj: Vec<LabelSet>,
}

impl LabeledGraph {
    pub fn empty(order: u32) -> Result<Self, GraphError> {
        if order > MAX_LABEL {
            return Err(GraphError::OrderTooLarge(order));
        }
        Ok(LabeledGraph {
            order,
            adj: vec![LabelSet::EMPTY; order as usize],
        })
    }

    /// Builds a graph from 1-based edges; duplicates are ignored.
    pub fn from_edges(order: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(order)?;
        for (i, &(u, v)) in edges.iter().enumerate() {
            g.add_edge(u, v).map_err(|e| match e {
                GraphError::OutOfRange { vertex, order, .. } => GraphError::OutOfRange {
                    line: i + 1,
                    vertex,
                    order,
                },
                GraphError::SelfLoop { vertex, .. } => GraphError::SelfLoop { line: i + 1, vertex },
                other => other,
            })?;
        }
        Ok(g)
    }

    /// Adds the undirected edge `uv`. Returns whether it was new.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<bool, GraphError> {
        for x in [u, v] {
            if x == 0 || x > self.order {
                return Err(GraphError::OutOfRange {
                    line: 0,
                    vertex: x,
                    order: self.order,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop { line: 0, vertex: u });
        }
        let fresh = !self.adj[u as usize - 1].contains(v);
        self.adj[u as usize - 1].insert(v);
        self.adj[v as usize - 1].insert(u);
        Ok(fresh)
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Open neighbourhood of vertex `v` (1-based).
    #[inline]
    pub fn neighbors(&self, v: u32) -> LabelSet {
        self.adj[v as usize - 1]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.neighbors(u).contains(v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.len()).sum::<usize>() / 2
    }

    pub fn has_edges(&self) -> bool {
        self.adj.iter().any(|r| !r.is_empty())
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 1..=self.order {
            for v in self.neighbors(u).iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn vertices(&self) -> LabelSet {
        LabelSet::full(self.order)
    }

    /// True iff every edge has an endpoint in `cover`.
    pub fn is_vertex_cover(&self, cover: LabelSet) -> bool {
        let outside = self.vertices().bits() & !cover.bits();
        bits::word_ones(outside).all(|i| self.adj[i].is_subset(cover))
    }
}

/// Parses the `p edge <n> <m>` / `e <u> <v>` edge-list format.
///
/// Lines starting with `c` are comments. The edge count in the header is
/// informational; duplicate edge lines are accepted and collapse.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut graph: Option<LabeledGraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let malformed = |msg: &str| GraphError::Malformed {
            line: line_no,
            msg: msg.to_string(),
        };
        match parts.next() {
            Some("p") => {
                if graph.is_some() {
                    return Err(malformed("duplicate header"));
                }
                if parts.next() != Some("edge") {
                    return Err(malformed("expected `p edge <n> <m>`"));
                }
                let n: u32 = parse_num(parts.next(), line_no, "vertex count")?;
                let _m: usize = parse_num(parts.next(), line_no, "edge count")?;
                if parts.next().is_some() {
                    return Err(malformed("trailing tokens in header"));
                }
                graph = Some(LabeledGraph::empty(n)?);
            }
            Some("e") => {
                let g = graph.as_mut().ok_or(GraphError::MissingHeader)?;
                let u: u32 = parse_num(parts.next(), line_no, "endpoint")?;
                let v: u32 = parse_num(parts.next(), line_no, "endpoint")?;
                if parts.next().is_some() {
                    return Err(malformed("trailing tokens in edge line"));
                }
                g.add_edge(u, v).map_err(|e| match e {
                    GraphError::OutOfRange { vertex, order, .. } => GraphError::OutOfRange {
                        line: line_no,
                        vertex,
                        order,
                    },
                    GraphError::SelfLoop { vertex, .. } => GraphError::SelfLoop {
                        line: line_no,
                        vertex,
                    },
                    other => other,
                })?;
            }
            Some(tok) => return Err(malformed(&format!("unknown line type `{tok}`"))),
            None => unreachable!("blank lines are skipped"),
        }
    }
    graph.ok_or(GraphError::MissingHeader)
}

fn parse_num<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, GraphError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Malformed {
            line,
            msg: format!("missing or invalid {what}"),
        })
}

/// Serializes with edges `u < v` in lexicographic order.
pub fn write_graph(g: &LabeledGraph) -> String {
    let edges = g.edges();
    let mut out = String::new();
    writeln!(out, "p edge {} {}", g.order(), edges.len()).unwrap();
    for (u, v) in edges {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

/// Input graph padded with isolated vertices up to order `2^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedGraph {
    base: LabeledGraph,
    k: u32,
}

impl PaddedGraph {
    #[inline]
    pub fn base(&self) -> &LabeledGraph {
        &self.base
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn padded_order(&self) -> u32 {
        1 << self.k
    }

    /// Fill labels `n+1..=2^k`; isolated by construction.
    pub fn fill_labels(&self) -> LabelSet {
        LabelSet::from_bits(
            LabelSet::full(self.padded_order()).bits() & !self.base.vertices().bits(),
        )
    }

    /// True iff some vertex cover `C` of the graph has `L(C) = labels`.
    ///
    /// Labels are unique, so this reduces to "the vertices labelled by
    /// `labels` cover every edge". Fill labels never matter.
    #[inline]
    pub fn is_vertex_cover(&self, labels: LabelSet) -> bool {
        self.base.is_vertex_cover(labels)
    }
}

/// Pads `g` to order `2^k` where `k >= 1` is the smallest with `n <= 2^k`.
pub fn pad_to_power_of_two(g: &LabeledGraph) -> PaddedGraph {
    let n = g.order().max(1);
    let k = (n.next_power_of_two().trailing_zeros()).max(1);
    PaddedGraph { base: g.clone(), k }
}

/// True iff every distinct pair of `vertices` is adjacent. A single vertex
/// is a clique; so is the empty set.
pub fn is_clique(adj: &BitMatrix, vertices: &[usize]) -> bool {
    vertices
        .iter()
        .enumerate()
        .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| adj.get(u, v)))
}

/// `N[v]` restricted to a presence state: `{v}` plus every present vertex
/// joined to `v` by a present edge. `edges` must only hold present edges.
pub fn closed_neighborhood(
    edges: &BitMatrix,
    present: &[u64],
    v: usize,
) -> Result<Vec<u64>, GraphError> {
    if v >= edges.len() || !bits::get(present, v) {
        return Err(GraphError::AbsentVertex { vertex: v });
    }
    let mut out: Vec<u64> = edges
        .row(v)
        .iter()
        .zip(present)
        .map(|(e, p)| e & p)
        .collect();
    bits::set(&mut out, v);
    Ok(out)
}
