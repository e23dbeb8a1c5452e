//! Hyperedge engine for stage `t`.
//!
//! Hyperedges of size `s <= t + 1` start as the vertex sets of all
//! `s`-cliques. For `|e| <= t`, `N[e]` is every `x` with `{x} ∪ e` inside a
//! present hyperedge; for `|e| = t + 1` it is the intersection of the
//! `N[{v}]`, `v ∈ e`. Hyperedges whose `L(N[e])` is not a cover's label set
//! are deleted, together with every present hyperedge containing them, until
//! nothing changes. At `t = 1` this is exactly the stage-1 fixpoint.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::engine::{CoverTest, Found, SubgraphState};
use crate::graph;
use crate::labels::LabelSet;
use crate::mcc::{Component, MccGraph};

pub const DEFAULT_HYPEREDGE_LIMIT: usize = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HyperError {
    #[error("stage parameter t must be at least 1")]
    ZeroStage,
    #[error("more than {limit} hyperedges of size <= {max_size} in component {component}")]
    GuardExceeded {
        component: String,
        max_size: usize,
        limit: usize,
    },
}

/// Present hyperedges over one component. Sizes 1 and 2 live in bit form;
/// larger sizes as sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperState<'h> {
    comp: &'h Component,
    t: usize,
    present: Vec<u64>,
    adj: BitMatrix,
    /// `higher[s - 3]` holds the present hyperedges of size `s`.
    higher: Vec<BTreeSet<Vec<u32>>>,
}

impl<'h> HyperState<'h> {
    /// All cliques of size `<= t + 1` in the whole component.
    pub fn from_component(comp: &'h Component, t: usize, limit: usize) -> Result<Self, HyperError> {
        Self::from_subgraph(&SubgraphState::full(comp), t, limit)
    }

    /// All cliques of size `<= t + 1` among the present vertices and edges.
    pub fn from_subgraph(state: &SubgraphState<'h>, t: usize, limit: usize) -> Result<Self, HyperError> {
        if t == 0 {
            return Err(HyperError::ZeroStage);
        }
        let comp = state.component();
        let adj = state.edges().clone();
        let mut total = state.vertex_count() + adj.edge_count();
        let guard = |total: usize| {
            if total > limit {
                Err(HyperError::GuardExceeded {
                    component: comp.name(),
                    max_size: t + 1,
                    limit,
                })
            } else {
                Ok(())
            }
        };
        guard(total)?;
        let mut higher: Vec<BTreeSet<Vec<u32>>> = Vec::new();
        let mut frontier: Vec<Vec<u32>> = state
            .edge_list()
            .into_iter()
            .map(|(u, v)| vec![u as u32, v as u32])
            .collect();
        let mut common = vec![0u64; adj.stride()];
        for _size in 3..=t + 1 {
            let mut next = Vec::new();
            for e in &frontier {
                common.copy_from_slice(adj.row(e[0] as usize));
                for &v in &e[1..] {
                    for (c, r) in common.iter_mut().zip(adj.row(v as usize)) {
                        *c &= r;
                    }
                }
                let last = *e.last().unwrap() as usize;
                for x in bits::ones(&common).filter(|&x| x > last) {
                    let mut f = e.clone();
                    f.push(x as u32);
                    next.push(f);
                    total += 1;
                }
                guard(total)?;
            }
            higher.push(next.iter().cloned().collect());
            frontier = next;
        }
        Ok(HyperState {
            comp,
            t,
            present: state.present_mask().to_vec(),
            adj,
            higher,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn component(&self) -> &'h Component {
        self.comp
    }

    pub fn is_empty(&self) -> bool {
        bits::is_empty(&self.present)
    }

    pub fn vertices(&self) -> Vec<usize> {
        bits::ones(&self.present).collect()
    }

    pub fn vertex_count(&self) -> usize {
        bits::count(&self.present)
    }

    /// Size-2 hyperedges `(u, v)`, `u < v`.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in bits::ones(&self.present) {
            out.extend(bits::ones(self.adj.row(u)).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn hyperedges_of_size(&self, s: usize) -> Vec<Vec<u32>> {
        match s {
            0 => Vec::new(),
            1 => self.vertices().into_iter().map(|v| vec![v as u32]).collect(),
            2 => self
                .edge_list()
                .into_iter()
                .map(|(u, v)| vec![u as u32, v as u32])
                .collect(),
            s if s <= self.t + 1 => self.higher[s - 3].iter().cloned().collect(),
            _ => Vec::new(),
        }
    }

    pub fn hyperedge_count(&self) -> usize {
        self.vertex_count() + self.adj.edge_count() + self.higher.iter().map(BTreeSet::len).sum::<usize>()
    }

    pub fn labels(&self) -> LabelSet {
        self.comp.labels_of(&self.present)
    }

    pub fn is_clique(&self) -> bool {
        graph::is_clique(&self.adj, &self.vertices())
    }

    /// Whether the sorted vertex list `e` is a present hyperedge.
    pub fn contains(&self, e: &[u32]) -> bool {
        match e.len() {
            0 => false,
            1 => bits::get(&self.present, e[0] as usize),
            2 => self.adj.get(e[0] as usize, e[1] as usize),
            s if s <= self.t + 1 => self.higher[s - 3].contains(e),
            _ => false,
        }
    }

    /// Vertices adjacent (by present edges) to every member of `e`.
    fn common_neighbors(&self, e: &[u32]) -> Vec<u64> {
        let mut c = self.adj.row(e[0] as usize).to_vec();
        for &v in &e[1..] {
            for (a, b) in c.iter_mut().zip(self.adj.row(v as usize)) {
                *a &= b;
            }
        }
        c
    }

    /// `N[e]` as a local vertex set. `e` must be present.
    pub fn neighborhood(&self, e: &[u32]) -> Vec<u64> {
        let mut out = if e.len() <= self.t {
            let cand = self.common_neighbors(e);
            if e.len() == 1 {
                cand
            } else {
                let mut keep = vec![0u64; cand.len()];
                let mut f = Vec::with_capacity(e.len() + 1);
                for x in bits::ones(&cand) {
                    f.clear();
                    f.extend_from_slice(e);
                    let at = f.partition_point(|&y| y < x as u32);
                    f.insert(at, x as u32);
                    if self.contains(&f) {
                        bits::set(&mut keep, x);
                    }
                }
                keep
            }
        } else {
            // |e| = t + 1: members are mutually adjacent, so the
            // intersection of closed neighbourhoods is common ∪ e.
            self.common_neighbors(e)
        };
        for &v in e {
            bits::set(&mut out, v as usize);
        }
        out
    }

    /// Deletes `e` and every present hyperedge containing it.
    pub fn delete(&mut self, e: &[u32]) -> usize {
        if !self.contains(e) {
            return 0;
        }
        let mut removed = 0;
        if e.len() < self.t + 1 {
            let cand = self.common_neighbors(e);
            let mut f = Vec::with_capacity(e.len() + 1);
            for x in bits::ones(&cand) {
                f.clear();
                f.extend_from_slice(e);
                let at = f.partition_point(|&y| y < x as u32);
                f.insert(at, x as u32);
                removed += self.delete(&f);
            }
        }
        match e.len() {
            1 => {
                self.adj.isolate(e[0] as usize);
                bits::clear(&mut self.present, e[0] as usize);
            }
            2 => self.adj.clear_sym(e[0] as usize, e[1] as usize),
            s => {
                self.higher[s - 3].remove(e);
            }
        }
        removed + 1
    }
}

/// Greatest hyperedge subfamily satisfying the cover condition.
pub fn stage_t_fixpoint<'h>(mut state: HyperState<'h>, cover: &mut CoverTest<'_>) -> HyperState<'h> {
    loop {
        let mut changed = false;
        for s in 1..=state.t + 1 {
            for e in state.hyperedges_of_size(s) {
                if !state.contains(&e) {
                    continue;
                }
                let labels = state.comp.labels_of(&state.neighborhood(&e));
                if !cover.check(labels) {
                    state.delete(&e);
                    changed = true;
                }
            }
        }
        if !changed {
            return state;
        }
    }
}

/// Step 4 with the hyperedge engine.
pub fn step4_scan<'h>(
    h: &'h MccGraph,
    t: usize,
    cover: &mut CoverTest<'_>,
    from_grade: u32,
    skip_grade_one: bool,
    limit: usize,
) -> Result<Option<Found<HyperState<'h>>>, HyperError> {
    let start = h.first_of_grade(from_grade);
    for (id, comp) in h.components().iter().enumerate().skip(start) {
        if skip_grade_one && comp.grade() == 1 {
            continue;
        }
        let state = stage_t_fixpoint(HyperState::from_component(comp, t, limit)?, cover);
        if !state.is_empty() {
            return Ok(Some(Found {
                component: id,
                grade: comp.grade(),
                state,
                components_scanned: id + 1 - start,
                stats: Default::default(),
            }));
        }
    }
    Ok(None)
}

/// Step 5 with the hyperedge engine: same cursor discipline as stage 1.
pub fn step5_minimize<'h>(s: HyperState<'h>, cover: &mut CoverTest<'_>) -> HyperState<'h> {
    let mut current = s;
    let mut pos = 0;
    loop {
        let vertices = current.vertices();
        let Some(&v) = vertices.get(pos) else { break };
        let mut trial = current.clone();
        trial.delete(&[v as u32]);
        let ss = stage_t_fixpoint(trial, cover);
        if ss.is_empty() {
            pos += 1;
        } else {
            current = ss;
        }
    }
    current
}
