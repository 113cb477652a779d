//! Small games that the documentation and tests refer to by name.

use crate::graph::{GameGraph, GraphBuilder, MooreStrategy, Owner};
use crate::rational::{q, Q};

fn w(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|x| q(*x)).collect()
}

/// Four vertices, three dimensions; `v0` and `v2` belong to player 1.
pub fn figure1() -> GameGraph {
    let mut b = GraphBuilder::new(3);
    let v: Vec<usize> = [Owner::P1, Owner::P2, Owner::P1, Owner::P2]
        .iter()
        .enumerate()
        .map(|(i, o)| b.vertex(format!("v{i}"), *o))
        .collect();
    b.edge(v[0], v[1], w(&[1, -2, 3]));
    b.edge(v[1], v[2], w(&[-6, 1, 1]));
    b.edge(v[2], v[3], w(&[12, 3, 1]));
    b.edge(v[3], v[2], w(&[2, -2, 2]));
    b.edge(v[3], v[0], w(&[-3, 4, 7]));
    b.edge(v[2], v[1], w(&[-9, 5, -6]));
    b.finish(v[0]).expect("well-formed")
}

/// Two memory states on [`figure1`]: at `v2` go to `v3` in state 0 and
/// back to `v1` in state 1, switching state on either move.
pub fn figure1_strategy() -> MooreStrategy {
    let mut s = MooreStrategy { memory: 2, initial: 0, ..MooreStrategy::default() };
    for m in 0..2 {
        s.next.insert((m, 0), 0);
    }
    s.next.insert((0, 2), 2);
    s.next.insert((1, 2), 5);
    s.update.insert((0, 2), 1);
    s.update.insert((1, 5), 0);
    s
}

/// One player-1 vertex with self-loops `(9, 1)` and `(1, 9)`.
pub fn two_loops() -> GameGraph {
    let mut b = GraphBuilder::new(2);
    let v = b.vertex("v", Owner::P1);
    b.edge(v, v, w(&[9, 1]));
    b.edge(v, v, w(&[1, 9]));
    b.finish(v).expect("well-formed")
}

/// Player 2 at `v0` chooses between the triangle `v1 v2 v3` and the
/// component `v4 v5 v6`; everything else belongs to player 1.
pub fn figure3() -> GameGraph {
    let mut b = GraphBuilder::new(2);
    let v: Vec<usize> = (0..7)
        .map(|i| b.vertex(format!("v{i}"), if i == 0 { Owner::P2 } else { Owner::P1 }))
        .collect();
    b.edge(v[0], v[1], w(&[0, 0]));
    b.edge(v[0], v[4], w(&[0, 0]));
    b.edge(v[1], v[2], w(&[1, 3]));
    b.edge(v[2], v[3], w(&[1, 3]));
    b.edge(v[3], v[1], w(&[1, 3]));
    b.edge(v[2], v[2], w(&[3, 2]));
    b.edge(v[3], v[3], w(&[2, 1]));
    b.edge(v[4], v[5], w(&[-3, -2]));
    b.edge(v[5], v[6], w(&[-1, -7]));
    b.edge(v[5], v[4], w(&[-3, -2]));
    b.edge(v[5], v[5], w(&[-2, -1]));
    b.edge(v[6], v[6], w(&[-1, -3]));
    b.finish(v[0]).expect("well-formed")
}
