//! Exact minimum vertex cover, independent of the staged engine.
//!
//! Orders up to 20 are solved by enumerating subsets in ascending
//! cardinality. Larger orders (up to 40) use branch and bound with degree-0
//! and degree-1 reductions, branching on a maximum-degree vertex. Both return
//! the lexicographically smallest minimum cover.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::LabeledGraph;
use crate::labels::LabelSet;

pub const ORACLE_MAX_ORDER: u32 = 40;
pub const EXHAUSTIVE_MAX_ORDER: u32 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("order {0} exceeds the oracle limit of {ORACLE_MAX_ORDER}")]
    TooLarge(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exhaustive,
    BranchAndBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub min_size: usize,
    pub witness: LabelSet,
    pub method: Method,
    pub elapsed: Duration,
}

pub fn min_vertex_cover_exact(g: &LabeledGraph) -> Result<OracleResult, OracleError> {
    let method = if g.order() <= EXHAUSTIVE_MAX_ORDER {
        Method::Exhaustive
    } else {
        Method::BranchAndBound
    };
    min_vertex_cover_with(g, method)
}

/// Runs a specific method; branch and bound also accepts small orders.
pub fn min_vertex_cover_with(g: &LabeledGraph, method: Method) -> Result<OracleResult, OracleError> {
    let start = Instant::now();
    let witness = match method {
        Method::Exhaustive => {
            if g.order() > EXHAUSTIVE_MAX_ORDER {
                return Err(OracleError::TooLarge(g.order()));
            }
            exhaustive(g)
        }
        Method::BranchAndBound => {
            if g.order() > ORACLE_MAX_ORDER {
                return Err(OracleError::TooLarge(g.order()));
            }
            lex_smallest_bnb(&Adjacency::of(g))
        }
    };
    Ok(OracleResult {
        min_size: witness.len(),
        witness,
        method,
        elapsed: start.elapsed(),
    })
}

/// Minimum cover size only (branch and bound, no witness search).
pub fn min_vertex_cover_size(g: &LabeledGraph) -> Result<usize, OracleError> {
    if g.order() > ORACLE_MAX_ORDER {
        return Err(OracleError::TooLarge(g.order()));
    }
    let adj = Adjacency::of(g);
    Ok(adj.min_cover(adj.all()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutputCheck {
    pub is_cover: bool,
    pub is_minimum: bool,
    pub oracle_size: usize,
}

pub fn verify_output(g: &LabeledGraph, labels: LabelSet) -> Result<OutputCheck, OracleError> {
    let oracle_size = min_vertex_cover_size(g)?;
    let is_cover = g.is_vertex_cover(labels);
    Ok(OutputCheck {
        is_cover,
        is_minimum: is_cover && labels.len() == oracle_size,
        oracle_size,
    })
}

fn exhaustive(g: &LabeledGraph) -> LabelSet {
    let n = g.order();
    for size in 0..=n {
        let mut best: Option<LabelSet> = None;
        for mask in Combinations::new(n, size) {
            let s = LabelSet::from_bits(mask);
            if g.is_vertex_cover(s) && best.is_none_or(|b| s.lex_cmp(b).is_lt()) {
                best = Some(s);
            }
        }
        if let Some(b) = best {
            return b;
        }
    }
    unreachable!("the full vertex set is always a cover")
}

/// All `size`-subsets of `n` bits in increasing numeric order (Gosper's hack).
struct Combinations {
    next: Option<u64>,
    limit: u64,
}

impl Combinations {
    fn new(n: u32, size: u32) -> Self {
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let first = if size == 0 {
            0
        } else if size > n {
            return Combinations { next: None, limit };
        } else if size == 64 {
            u64::MAX
        } else {
            (1u64 << size) - 1
        };
        Combinations {
            next: Some(first),
            limit,
        }
    }
}

impl Iterator for Combinations {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            if r == 0 {
                None
            } else {
                let nxt = (((r ^ cur) >> 2) / c) | r;
                (nxt & !self.limit == 0).then_some(nxt)
            }
        };
        Some(cur)
    }
}

/// 0-based adjacency bitmasks.
struct Adjacency {
    rows: Vec<u64>,
}

impl Adjacency {
    fn of(g: &LabeledGraph) -> Self {
        Adjacency {
            rows: (1..=g.order()).map(|v| g.neighbors(v).bits()).collect(),
        }
    }

    fn all(&self) -> u64 {
        if self.rows.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rows.len()) - 1
        }
    }

    /// Minimum cover of the subgraph induced by `alive`.
    fn min_cover(&self, alive: u64) -> usize {
        let mut best = alive.count_ones() as usize + 1;
        self.branch(alive, 0, &mut best);
        best
    }

    fn branch(&self, mut alive: u64, mut taken: usize, best: &mut usize) {
        // Reductions: drop isolated vertices, take the neighbour of a leaf.
        loop {
            let mut changed = false;
            let mut rest = alive;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if alive >> v & 1 == 0 {
                    continue;
                }
                let nb = self.rows[v] & alive;
                match nb.count_ones() {
                    0 => {
                        alive &= !(1 << v);
                        changed = true;
                    }
                    1 => {
                        let u = nb.trailing_zeros();
                        alive &= !(1 << v) & !(1 << u);
                        taken += 1;
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        if taken >= *best {
            return;
        }
        if alive == 0 {
            *best = taken;
            return;
        }
        if taken + self.matching_bound(alive) >= *best {
            return;
        }
        let mut pick = 0;
        let mut deg = 0;
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.rows[v] & alive).count_ones();
            if d > deg {
                deg = d;
                pick = v;
            }
        }
        let nb = self.rows[pick] & alive;
        self.branch(alive & !(1 << pick), taken + 1, best);
        self.branch(alive & !(1 << pick) & !nb, taken + deg as usize, best);
    }

    /// Size of a greedy maximal matching: a lower bound on any cover.
    fn matching_bound(&self, alive: u64) -> usize {
        let mut free = alive;
        let mut size = 0;
        while free != 0 {
            let v = free.trailing_zeros() as usize;
            free &= !(1 << v);
            let nb = self.rows[v] & free;
            if nb != 0 {
                free &= !(1 << nb.trailing_zeros());
                size += 1;
            }
        }
        size
    }

    /// Smallest cover containing `forced_in` and avoiding `forced_out`, or
    /// `None` when `forced_out` spans an edge.
    fn constrained_min(&self, forced_in: u64, forced_out: u64) -> Option<usize> {
        let mut must = forced_in;
        let mut rest = forced_out;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.rows[v] & forced_out != 0 {
                return None;
            }
            must |= self.rows[v];
        }
        if must & forced_out != 0 {
            return None;
        }
        let alive = self.all() & !must & !forced_out;
        Some(must.count_ones() as usize + self.min_cover(alive))
    }
}

/// Decides labels in ascending order, keeping each one whenever a minimum
/// cover still exists with it; that yields the lexicographically smallest
/// minimum cover.
fn lex_smallest_bnb(adj: &Adjacency) -> LabelSet {
    let target = adj.min_cover(adj.all());
    let mut forced_in = 0u64;
    let mut forced_out = 0u64;
    for v in 0..adj.rows.len() {
        if forced_in.count_ones() as usize == target {
            break;
        }
        let bit = 1u64 << v;
        if adj.constrained_min(forced_in | bit, forced_out) == Some(target) {
            forced_in |= bit;
        } else {
            forced_out |= bit;
        }
    }
    LabelSet::from_bits(forced_in)
}
