//! Proptest generators shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;

use mpgame::expr::{li, ls, max, min, neg, sum, Expression};
use mpgame::graph::{GameGraph, GraphBuilder, Owner};
use mpgame::rational::{frac, Q};

pub fn arb_q() -> impl Strategy<Value = Q> {
    (-30i64..=30, 1i64..=6).prop_map(|(n, d)| frac(n, d))
}

pub fn arb_vec(k: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(arb_q(), k)
}

/// Expressions over dimensions `1..=k`, with or without lim-sup and negation.
pub fn arb_expr(k: usize, general: bool) -> impl Strategy<Value = Expression> {
    let leaf = (1..=k, any::<bool>()).prop_map(move |(d, s)| if general && s { ls(d) } else { li(d) });
    leaf.prop_recursive(3, 8, 3, move |inner| {
        let kids = prop::collection::vec(inner.clone(), 2..=3);
        let mut ops = vec![
            kids.clone().prop_map(min).boxed(),
            kids.clone().prop_map(max).boxed(),
            kids.prop_map(sum).boxed(),
        ];
        if general {
            ops.push(inner.prop_map(neg).boxed());
        }
        prop::strategy::Union::new(ops)
    })
}

/// Graph on `n` vertices: vertex `i` gets an edge to `targets[i]`, then
/// `extra` holds further `(from, to)` pairs. Weights are small integers.
pub fn build_graph(k: usize, owners: &[Owner], targets: &[usize], extra: &[(usize, usize)], weights: &[Vec<i64>]) -> GameGraph {
    let n = owners.len();
    let mut b = GraphBuilder::new(k);
    let v: Vec<usize> = owners.iter().enumerate().map(|(i, o)| b.vertex(format!("v{i}"), *o)).collect();
    let pairs = targets.iter().enumerate().map(|(i, t)| (i, t % n)).chain(extra.iter().map(|(a, t)| (a % n, t % n)));
    for (j, (from, to)) in pairs.enumerate() {
        let w = weights[j % weights.len()].iter().map(|x| Q::from_integer((*x).into())).collect();
        b.edge(v[from], v[to], w);
    }
    b.finish(v[0]).expect("every vertex has an out-edge")
}

/// Random graph with `n ≤ max_n` vertices, each owned per `owner`.
pub fn arb_graph(max_n: usize, max_extra: usize, k: usize, owner: fn(usize) -> Owner) -> impl Strategy<Value = GameGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..n, n),
            prop::collection::vec((0..n, 0..n), 0..=max_extra),
            prop::collection::vec(prop::collection::vec(-5i64..=5, k), n + max_extra),
        )
            .prop_map(move |(t, x, w)| {
                let owners: Vec<Owner> = (0..n).map(owner).collect();
                build_graph(k, &owners, &t, &x, &w)
            })
    })
}
