use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mcc_cover::harness::random_graph;
use mcc_cover::oracle::{min_vertex_cover_exact, min_vertex_cover_with, Method};
use mcc_cover::LabeledGraph;

fn random_order(n: u32, d: f64, rng: &mut ChaCha8Rng) -> LabeledGraph {
    let mut g = LabeledGraph::empty(n).unwrap();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.random::<f64>() < d {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Largest independent set by brute force over vertex masks.
fn max_independent_set(g: &LabeledGraph) -> u32 {
    let n = g.order();
    let mut best = 0;
    for mask in 0u64..1 << n {
        if mask.count_ones() <= best {
            continue;
        }
        let independent = g.edges().iter().all(|&(u, v)| mask >> (u - 1) & 1 == 0 || mask >> (v - 1) & 1 == 0);
        if independent {
            best = mask.count_ones();
        }
    }
    best
}

#[test]
fn exhaustive_and_branch_and_bound_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for _ in 0..500 {
        let n = rng.random_range(1..=16);
        let d = rng.random_range(0.05..0.95);
        let g = random_order(n, d, &mut rng);
        let a = min_vertex_cover_with(&g, Method::Exhaustive).unwrap();
        let b = min_vertex_cover_with(&g, Method::BranchAndBound).unwrap();
        assert_eq!(a.min_size, b.min_size, "{g:?}");
        assert_eq!(a.witness, b.witness, "lex-smallest witnesses differ on {g:?}");
        assert!(g.is_vertex_cover(a.witness));
    }
}

#[test]
fn complement_of_independent_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.random_range(1..=12);
        let d = rng.random_range(0.05..0.95);
        let g = random_order(n, d, &mut rng);
        let r = min_vertex_cover_exact(&g).unwrap();
        assert_eq!(r.min_size as u32, n - max_independent_set(&g));
    }
}

#[test]
fn adding_edges_never_shrinks_the_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.random_range(2..=24);
        let mut g = random_order(n, rng.random_range(0.05..0.6), &mut rng);
        let mut prev = min_vertex_cover_exact(&g).unwrap().min_size;
        for _ in 0..5 {
            let u = rng.random_range(1..=n);
            let v = rng.random_range(1..=n);
            if u == v {
                continue;
            }
            g.add_edge(u, v).unwrap();
            let now = min_vertex_cover_exact(&g).unwrap().min_size;
            assert!(now >= prev);
            prev = now;
        }
    }
}

#[test]
fn branch_and_bound_handles_order_32() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10 {
        let d = rng.random_range(0.1..0.9);
        let g = random_graph(5, d, &mut rng);
        let r = min_vertex_cover_exact(&g).unwrap();
        assert_eq!(r.method, Method::BranchAndBound);
        assert!(g.is_vertex_cover(r.witness));
        assert_eq!(r.witness.len(), r.min_size);
    }
}
