//! Structural checks on a built `H`: distinct labels across every edge,
//! uniform maximal-clique size per component, a witness maximal clique for
//! every nonempty label subset, and the closed-form vertex/component counts.

use std::collections::HashMap;
use std::fmt;

use crate::bits::{self, BitMatrix};
use crate::labels::LabelSet;
use crate::mcc::{expected_component_count, expected_vertex_count, MccGraph};

pub const DEFAULT_EXHAUSTIVE_LIMIT: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// An edge whose endpoints share a label.
    SameLabelEdge { component: usize, u: usize, v: usize, label: u32 },
    /// A maximal clique whose size differs from the component grade.
    NonUniformClique { component: usize, clique_size: usize, grade: u32 },
    /// A nonempty label subset with no maximal clique carrying it.
    MissingWitness { labels: LabelSet },
    VertexCount { expected: u64, actual: u64 },
    ComponentCount { expected: u64, actual: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SameLabelEdge { component, u, v, label } => write!(
                f,
                "component {component}: edge ({u},{v}) joins two vertices labelled {label}"
            ),
            Violation::NonUniformClique { component, clique_size, grade } => write!(
                f,
                "component {component}: maximal clique of size {clique_size} in grade {grade}"
            ),
            Violation::MissingWitness { labels } => {
                write!(f, "no maximal clique carries label set {labels}")
            }
            Violation::VertexCount { expected, actual } => {
                write!(f, "vertex count {actual}, expected {expected}")
            }
            Violation::ComponentCount { expected, actual } => {
                write!(f, "component count {actual}, expected {expected}")
            }
        }
    }
}

/// A maximal clique witnessing one label subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub component: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct StructureReport {
    pub k: u32,
    pub edges_checked: usize,
    /// Whether the maximal-clique checks ran.
    pub exhaustive: bool,
    pub maximal_cliques: usize,
    pub witnesses: HashMap<LabelSet, Witness>,
    pub violations: Vec<Violation>,
}

impl StructureReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every structural check. The clique-based checks only run when
/// `k <= exhaustive_limit`.
pub fn verify_h_structure(h: &MccGraph, exhaustive_limit: u32) -> StructureReport {
    let mut report = StructureReport {
        k: h.k(),
        ..Default::default()
    };

    let expected = expected_vertex_count(h.k());
    let actual = h.vertex_count() as u64;
    if expected != actual {
        report.violations.push(Violation::VertexCount { expected, actual });
    }
    let expected = expected_component_count(h.k());
    let actual = h.components().len() as u64;
    if expected != actual {
        report.violations.push(Violation::ComponentCount { expected, actual });
    }

    for (id, comp) in h.components().iter().enumerate() {
        let adj = comp.adjacency();
        for u in 0..comp.vertex_count() {
            for v in bits::ones(adj.row(u)).filter(|&v| v > u) {
                report.edges_checked += 1;
                if comp.label(u) == comp.label(v) {
                    report.violations.push(Violation::SameLabelEdge {
                        component: id,
                        u,
                        v,
                        label: comp.label(u),
                    });
                }
            }
        }
    }

    if h.k() > exhaustive_limit {
        return report;
    }
    report.exhaustive = true;

    for (id, comp) in h.components().iter().enumerate() {
        let grade = comp.grade();
        let mut bad_sizes = Vec::new();
        for_each_maximal_clique(comp.adjacency(), |clique| {
            report.maximal_cliques += 1;
            if clique.len() != grade as usize {
                bad_sizes.push(clique.len());
            }
            let labels: LabelSet = clique.iter().map(|&v| comp.label(v)).collect();
            // Maximal cliques of U(full, |T|) are exactly those in components of grade |T|.
            if labels.len() == clique.len() && clique.len() == grade as usize {
                report.witnesses.entry(labels).or_insert_with(|| Witness {
                    component: id,
                    vertices: clique.to_vec(),
                });
            }
        });
        bad_sizes.sort_unstable();
        bad_sizes.dedup();
        for clique_size in bad_sizes {
            report.violations.push(Violation::NonUniformClique {
                component: id,
                clique_size,
                grade,
            });
        }
    }

    let top = h.label_count();
    let full = LabelSet::full(top).bits();
    for mask in 1..=full {
        let labels = LabelSet::from_bits(mask);
        if !report.witnesses.contains_key(&labels) {
            report.violations.push(Violation::MissingWitness { labels });
        }
    }
    report
}

/// Bron–Kerbosch with Tomita pivoting over a bit-row adjacency.
pub fn for_each_maximal_clique(adj: &BitMatrix, mut visit: impl FnMut(&[usize])) {
    let n = adj.len();
    if n == 0 {
        return;
    }
    let words = adj.stride();
    let mut p = vec![0u64; words];
    for v in 0..n {
        bits::set(&mut p, v);
    }
    let x = vec![0u64; words];
    let mut r = Vec::new();
    expand(adj, &mut r, p, x, &mut visit);
}

fn expand(
    adj: &BitMatrix,
    r: &mut Vec<usize>,
    mut p: Vec<u64>,
    mut x: Vec<u64>,
    visit: &mut impl FnMut(&[usize]),
) {
    if bits::is_empty(&p) {
        if bits::is_empty(&x) {
            visit(r);
        }
        return;
    }
    let pivot = bits::ones(&p)
        .chain(bits::ones(&x))
        .max_by_key(|&u| {
            adj.row(u)
                .iter()
                .zip(&p)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
        })
        .expect("p is nonempty");
    let candidates: Vec<usize> = bits::ones(&p)
        .filter(|&v| !adj.get(pivot, v))
        .collect();
    for v in candidates {
        let row = adj.row(v);
        let np: Vec<u64> = p.iter().zip(row).map(|(a, b)| a & b).collect();
        let nx: Vec<u64> = x.iter().zip(row).map(|(a, b)| a & b).collect();
        r.push(v);
        expand(adj, r, np, nx, visit);
        r.pop();
        bits::clear(&mut p, v);
        bits::set(&mut x, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcc::build_h;

    fn brute_maximal_cliques(adj: &BitMatrix) -> Vec<Vec<usize>> {
        let n = adj.len();
        let is_clique = |m: u32| {
            (0..n).all(|u| {
                m >> u & 1 == 0 || (u + 1..n).all(|v| m >> v & 1 == 0 || adj.get(u, v))
            })
        };
        let mut out = Vec::new();
        for m in 1u32..(1 << n) {
            if is_clique(m) && (0..n).all(|w| m >> w & 1 == 1 || !is_clique(m | 1 << w)) {
                out.push((0..n).filter(|&v| m >> v & 1 == 1).collect());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn bron_kerbosch_matches_brute_force_on_small_components() {
        let h = build_h(3, false).unwrap();
        for comp in h.components().iter().filter(|c| c.vertex_count() <= 12) {
            let mut got = Vec::new();
            for_each_maximal_clique(comp.adjacency(), |c| {
                let mut c = c.to_vec();
                c.sort();
                got.push(c);
            });
            got.sort();
            assert_eq!(got, brute_maximal_cliques(comp.adjacency()), "{}", comp.name());
        }
    }

    #[test]
    fn k2_k22_cliques_are_its_edges() {
        let h = build_h(2, false).unwrap();
        let mut cliques = Vec::new();
        for_each_maximal_clique(h.component(6).adjacency(), |c| {
            let mut c = c.to_vec();
            c.sort();
            cliques.push(c)
        });
        cliques.sort();
        assert_eq!(cliques, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn clean_for_small_k() {
        for k in 1..=3 {
            let report = verify_h_structure(&build_h(k, false).unwrap(), 3);
            assert!(report.is_clean(), "k={k}: {:?}", report.violations);
            assert_eq!(report.witnesses.len(), (1usize << (1 << k)) - 1);
        }
    }

    #[test]
    fn counts_only_above_limit() {
        let report = verify_h_structure(&build_h(4, false).unwrap(), 3);
        assert!(!report.exhaustive);
        assert!(report.is_clean());
    }

    #[test]
    fn removed_edge_breaks_uniform_grade() {
        let mut h = build_h(2, false).unwrap();
        // K4 = P({1..4},2,2); drop the cross-join edge between local 0 and 2.
        h.remove_edge_for_testing(9, 0, 2);
        let report = verify_h_structure(&h, 3);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::NonUniformClique { component: 9, clique_size: 3, grade: 4 }
        )));
    }
}
