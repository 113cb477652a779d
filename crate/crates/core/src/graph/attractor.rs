//! Attractors: the vertices from which a player can force a visit to a target set.

use std::collections::{BTreeMap, VecDeque};

use super::{GameGraph, MemorylessStrategy, Owner};

/// Least fixpoint of the controllable predecessor operator, together with a
/// memoryless strategy that reaches `target` from every attractor vertex
/// outside it in at most `|V|` steps.
pub fn attractor(g: &GameGraph, player: Owner, target: &[bool]) -> (Vec<bool>, MemorylessStrategy) {
    let n = g.num_vertices();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, edge) in g.edges().iter().enumerate() {
        preds[edge.to].push(e);
    }
    let mut inside = target.to_vec();
    let mut escapes: Vec<usize> = (0..n).map(|v| g.out_edges(v).len()).collect();
    let mut choice = BTreeMap::new();
    let mut queue: VecDeque<usize> = (0..n).filter(|v| target[*v]).collect();
    while let Some(u) = queue.pop_front() {
        for &e in &preds[u] {
            let v = g.edge(e).from;
            if inside[v] {
                continue;
            }
            if g.owner(v) == player {
                inside[v] = true;
                choice.insert(v, e);
                queue.push_back(v);
            } else {
                escapes[v] -= 1;
                if escapes[v] == 0 {
                    inside[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    (inside, MemorylessStrategy { choice })
}

#[cfg(test)]
mod tests {
    use super::super::GraphBuilder;
    use super::*;
    use crate::rational::q;

    #[test]
    fn everything_points_to_target() {
        let mut b = GraphBuilder::new(1);
        let vs: Vec<usize> = (0..3).map(|i| b.vertex(format!("v{i}"), if i == 1 { Owner::P2 } else { Owner::P1 })).collect();
        for &v in &vs {
            b.edge(v, vs[2], vec![q(0)]);
        }
        let g = b.finish(0).unwrap();
        let (attr, _) = attractor(&g, Owner::P1, &[false, false, true]);
        assert_eq!(attr, vec![true; 3]);
    }

    #[test]
    fn opponent_can_avoid() {
        let mut b = GraphBuilder::new(1);
        let a = b.vertex("a", Owner::P2);
        let t = b.vertex("t", Owner::P1);
        b.edge(a, a, vec![q(0)]);
        b.edge(a, t, vec![q(0)]);
        b.edge(t, t, vec![q(0)]);
        let g = b.finish(a).unwrap();
        let (attr, strat) = attractor(&g, Owner::P1, &[false, true]);
        assert_eq!(attr, vec![false, true]);
        assert!(strat.choice.is_empty());
        let (attr, strat) = attractor(&g, Owner::P2, &[false, true]);
        assert_eq!(attr, vec![true, true]);
        assert_eq!(strat.choice.get(&a), Some(&1));
    }
}
