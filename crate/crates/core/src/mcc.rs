//! Construction of the dyadic family `Z` and the minimum-covering-computation
//! graph `H`.
//!
//! `H` is a disjoint union of components. Grade-1 components are single
//! labelled vertices. Every other component `P(A, b1, b2)` is a fresh copy of
//! the same-grade union `U(A1, b1)` joined to a fresh copy of `U(A2, b2)`,
//! where `A1`/`A2` are the lower/upper halves of a dyadic block `A`.

use std::collections::HashMap;

use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::labels::LabelSet;

/// Largest `k` that fits in a [`LabelSet`].
pub const MAX_K: u32 = 6;
/// Largest `k` built without an explicit override (k = 6 needs ~13 GB).
pub const DEFAULT_MAX_K: u32 = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("k must be in 1..={max}, got {k}")]
    KOutOfRange { k: u32, max: u32 },
    #[error("k = {k} exceeds the memory guard (k <= {DEFAULT_MAX_K}); pass the large-build override")]
    ResourceGuard { k: u32 },
}

/// The dyadic family: level `r` holds the `2^(k-r)` consecutive blocks of
/// size `2^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZFamily {
    k: u32,
    levels: Vec<Vec<LabelSet>>,
}

impl ZFamily {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn level(&self, r: u32) -> &[LabelSet] {
        &self.levels[r as usize]
    }

    pub fn levels(&self) -> &[Vec<LabelSet>] {
        &self.levels
    }

    /// All members, smallest blocks first.
    pub fn members(&self) -> impl Iterator<Item = LabelSet> + '_ {
        self.levels.iter().flatten().copied()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Builds `Z` bottom-up: singletons, then unions of adjacent pairs.
pub fn build_z_family(k: u32) -> Result<ZFamily, BuildError> {
    if !(1..=MAX_K).contains(&k) {
        return Err(BuildError::KOutOfRange { k, max: MAX_K });
    }
    let mut levels = vec![(1..=1u32 << k).map(LabelSet::singleton).collect::<Vec<_>>()];
    for r in 1..=k as usize {
        let prev = &levels[r - 1];
        let next = prev.chunks(2).map(|p| p[0].union(p[1])).collect();
        levels.push(next);
    }
    Ok(ZFamily { k, levels })
}

/// Lookup key for a component: `(grade, b1, lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentKey {
    pub grade: u16,
    pub b1: u16,
    pub lo: u16,
    pub hi: u16,
}

/// One component `P(A, b1, b2)` of `H`, or `P({l})` when `b2 == 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub(crate) lo: u16,
    pub(crate) hi: u16,
    pub(crate) b1: u16,
    pub(crate) b2: u16,
    pub(crate) labels: Vec<u16>,
    pub(crate) adj: BitMatrix,
}

impl Component {
    /// The label span `A` as an interval `[lo, hi]`.
    pub fn span_bounds(&self) -> (u32, u32) {
        (self.lo as u32, self.hi as u32)
    }

    pub fn span(&self) -> LabelSet {
        LabelSet::interval(self.lo as u32, self.hi as u32)
    }

    pub fn b1(&self) -> u32 {
        self.b1 as u32
    }

    /// Zero for grade-1 components.
    pub fn b2(&self) -> u32 {
        self.b2 as u32
    }

    pub fn grade(&self) -> u32 {
        if self.b2 == 0 {
            1
        } else {
            (self.b1 + self.b2) as u32
        }
    }

    pub fn key(&self) -> ComponentKey {
        ComponentKey {
            grade: self.grade() as u16,
            b1: self.b1,
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn label(&self, v: usize) -> u32 {
        self.labels[v] as u32
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    /// Label set of a local vertex set.
    #[inline]
    pub fn labels_of(&self, vertices: &[u64]) -> LabelSet {
        let mut bits = 0u64;
        for v in bits::ones(vertices) {
            bits |= 1 << (self.labels[v] - 1);
        }
        LabelSet::from_bits(bits)
    }

    /// Canonical sort key: grade, then b1, then span size, then span start.
    fn order_key(&self) -> (u32, u32, u32, u32) {
        (self.grade(), self.b1(), (self.hi - self.lo) as u32, self.lo as u32)
    }

    /// Display name, e.g. `P({1..4},1,2)` or `P({3})`.
    pub fn name(&self) -> String {
        if self.b2 == 0 {
            format!("P({{{}}})", self.lo)
        } else if self.hi == self.lo + 1 {
            format!("P({{{},{}}},{},{})", self.lo, self.hi, self.b1, self.b2)
        } else {
            format!("P({{{}..{}}},{},{})", self.lo, self.hi, self.b1, self.b2)
        }
    }

    fn singleton(label: u16) -> Self {
        Component {
            lo: label,
            hi: label,
            b1: 1,
            b2: 0,
            labels: vec![label],
            adj: BitMatrix::new(1),
        }
    }

    /// Joins fresh copies of two vertex-disjoint component lists.
    fn join(lo: u16, hi: u16, b1: u16, b2: u16, first: &[&Component], second: &[&Component]) -> Self {
        let n1: usize = first.iter().map(|c| c.vertex_count()).sum();
        let n2: usize = second.iter().map(|c| c.vertex_count()).sum();
        let n = n1 + n2;
        let mut labels = Vec::with_capacity(n);
        let mut adj = BitMatrix::new(n);
        let mut offset = 0;
        for part in first.iter().chain(second) {
            for u in 0..part.vertex_count() {
                labels.push(part.labels[u]);
                for v in bits::ones(part.adj.row(u)) {
                    bits::set(adj.row_mut(offset + u), offset + v);
                }
            }
            offset += part.vertex_count();
        }
        for u in 0..n1 {
            set_range(adj.row_mut(u), n1, n);
        }
        for u in n1..n {
            set_range(adj.row_mut(u), 0, n1);
        }
        Component {
            lo,
            hi,
            b1,
            b2,
            labels,
            adj,
        }
    }
}

fn set_range(row: &mut [u64], from: usize, to: usize) {
    for i in from..to {
        bits::set(row, i);
    }
}

/// The auxiliary graph `H` for labels `{1..2^k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MccGraph {
    k: u32,
    components: Vec<Component>,
    index: HashMap<ComponentKey, usize>,
    grade_starts: Vec<usize>,
}

impl MccGraph {
    pub(crate) fn from_components(k: u32, components: Vec<Component>) -> Self {
        let index = components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.key(), i))
            .collect();
        let top = 1usize << k;
        let mut grade_starts = vec![components.len(); top + 2];
        for (i, c) in components.iter().enumerate().rev() {
            grade_starts[c.grade() as usize] = i;
        }
        for g in (1..=top).rev() {
            grade_starts[g] = grade_starts[g].min(grade_starts[g + 1]);
        }
        MccGraph {
            k,
            components,
            index,
            grade_starts,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn label_count(&self) -> u32 {
        1 << self.k
    }

    /// Components in canonical order.
    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, id: usize) -> &Component {
        &self.components[id]
    }

    pub fn find(&self, key: ComponentKey) -> Option<usize> {
        self.index.get(&key).copied()
    }

    /// Index of the first component whose grade is at least `grade`.
    pub fn first_of_grade(&self, grade: u32) -> usize {
        let g = (grade.max(1) as usize).min(self.grade_starts.len() - 1);
        self.grade_starts[g]
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(Component::vertex_count).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.components.iter().map(|c| c.adj.edge_count()).sum()
    }

    /// Component ids of the same-grade union `U(span, grade)` in canonical order.
    pub fn union_members(&self, span: LabelSet, grade: u32) -> Vec<usize> {
        let end = self.first_of_grade(grade + 1);
        (self.first_of_grade(grade)..end)
            .filter(|&i| self.components[i].span().is_subset(span))
            .collect()
    }

    /// Test hook: removes one edge from a component.
    #[doc(hidden)]
    pub fn remove_edge_for_testing(&mut self, component: usize, u: usize, v: usize) {
        self.components[component].adj.clear_sym(u, v);
    }
}

/// Expected `|V(H)|`: the product of `2^i + 2` for `i = 1..=k`.
pub fn expected_vertex_count(k: u32) -> u64 {
    (1..=k).map(|i| (1u64 << i) + 2).product()
}

/// Expected component count: `c(1) = 3`, `c(k) = 2 c(k-1) + 4^(k-1)`.
pub fn expected_component_count(k: u32) -> u64 {
    (2..=k).fold(3, |c, i| 2 * c + (1u64 << (2 * (i - 1))))
}

/// Builds `H` for `k <= 5`, or `k = 6` when `allow_large` is set.
pub fn build_h(k: u32, allow_large: bool) -> Result<MccGraph, BuildError> {
    if !(1..=MAX_K).contains(&k) {
        return Err(BuildError::KOutOfRange { k, max: MAX_K });
    }
    if k > DEFAULT_MAX_K && !allow_large {
        return Err(BuildError::ResourceGuard { k });
    }
    let top = 1u16 << k;
    let half_top = top / 2;
    let mut components: Vec<Component> = (1..=top).map(Component::singleton).collect();
    // by_grade[b] lists component ids of grade b in canonical order.
    let mut by_grade: Vec<Vec<usize>> = vec![Vec::new(); top as usize + 1];
    by_grade[1] = (0..top as usize).collect();

    for b in 2..=top {
        for b1 in b.saturating_sub(half_top).max(1)..=(b - 1).min(half_top) {
            let b2 = b - b1;
            for r in 1..=k {
                let half = 1u16 << (r - 1);
                if b1 > half || b2 > half {
                    continue;
                }
                let width = 2 * half;
                for block in 0..(top / width) {
                    let lo = block * width + 1;
                    let mid = lo + half - 1;
                    let hi = lo + width - 1;
                    let part = |grade: u16, from: u16, to: u16| -> Vec<&Component> {
                        by_grade[grade as usize]
                            .iter()
                            .map(|&i| &components[i])
                            .filter(|c| c.lo >= from && c.hi <= to)
                            .collect()
                    };
                    let first = part(b1, lo, mid);
                    let second = part(b2, mid + 1, hi);
                    debug_assert!(!first.is_empty() && !second.is_empty());
                    let comp = Component::join(lo, hi, b1, b2, &first, &second);
                    by_grade[b as usize].push(components.len());
                    components.push(comp);
                }
            }
        }
    }
    debug_assert!(components
        .windows(2)
        .all(|w| w[0].order_key() < w[1].order_key()));
    Ok(MccGraph::from_components(k, components))
}

/// Components in canonical order: grade, then `b1`, then `|span|`, then
/// smallest span label.
pub fn enumerate_components(h: &MccGraph) -> impl Iterator<Item = (usize, &Component)> {
    h.components().iter().enumerate()
}
