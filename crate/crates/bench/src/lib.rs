//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mpgame::graph::{GameGraph, GraphBuilder, Owner};
use mpgame::rational::q;
use mpgame::reduction::ConstraintSystem5;

/// Random strongly connected graph: a ring through all `n` vertices plus
/// `extra` random edges, integer weights in `-9..=9`. Vertex `i` is owned by
/// `owner(i)`.
pub fn ring_graph(n: usize, extra: usize, k: usize, seed: u64, owner: impl Fn(usize) -> Owner) -> GameGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(k);
    let v: Vec<usize> = (0..n).map(|i| b.vertex(format!("v{i}"), owner(i))).collect();
    let weight = |rng: &mut ChaCha8Rng| (0..k).map(|_| q(rng.gen_range(-9..=9))).collect();
    for i in 0..n {
        let w = weight(&mut rng);
        b.edge(v[i], v[(i + 1) % n], w);
    }
    for _ in 0..extra {
        let (from, to) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let w = weight(&mut rng);
        b.edge(v[from], v[to], w);
    }
    b.finish(v[0]).expect("ring gives every vertex an out-edge")
}

/// `q₁ − 2q₂ ≤ 0`, `2p₁ − 3p₂ ≤ 0`, `q₁p₁ = q₂p₂`.
pub fn small_constraints() -> ConstraintSystem5 {
    ConstraintSystem5 {
        n: 2,
        q_rows: vec![vec![(1, q(1)), (2, q(-2))]],
        p_rows: vec![vec![(1, q(2)), (2, q(-3))]],
        bilinear: vec![[1, 1, 2, 2]],
    }
}
