mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::build_graph;
use proptest::prelude::*;

use mpgame::certificate::{Feasibility, LinearSystem, RowKind};
use mpgame::fixtures::{figure1, figure1_strategy, figure3};
use mpgame::graph::{
    attractor, cycle_average, euler_circuit, eulerian_cycle_sets, memoryless_strategies, product, reachable_sccs,
    scc_decompose, GameGraph, MooreStrategy, Owner,
};
use mpgame::rational::{q, Q};

fn arb_owned_graph(max_n: usize, max_extra: usize, k: usize) -> impl Strategy<Value = GameGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(0..n, n),
            prop::collection::vec((0..n, 0..n), 0..=max_extra),
            prop::collection::vec(prop::collection::vec(-5i64..=5, k), n + max_extra),
        )
            .prop_map(move |(o, t, x, w)| {
                let owners: Vec<Owner> = o.iter().map(|p1| if *p1 { Owner::P1 } else { Owner::P2 }).collect();
                build_graph(k, &owners, &t, &x, &w)
            })
    })
}

fn one_player(max_n: usize, max_extra: usize, k: usize) -> impl Strategy<Value = GameGraph> {
    common::arb_graph(max_n, max_extra, k, |_| Owner::P2)
}

/// A two-state strategy from raw choices: `moves` picks out-edges, `flips`
/// picks the memory after each edge.
fn two_state(g: &GameGraph, moves: &[usize], flips: &[bool]) -> MooreStrategy {
    let mut next = BTreeMap::new();
    let mut update = BTreeMap::new();
    for m in 0..2 {
        for v in 0..g.num_vertices() {
            if g.owner(v) == Owner::P1 {
                let out = g.out_edges(v);
                next.insert((m, v), out[moves[(m * 7 + v) % moves.len()] % out.len()]);
            }
        }
        for e in 0..g.num_edges() {
            update.insert((m, e), usize::from(flips[(m * 11 + e) % flips.len()]));
        }
    }
    MooreStrategy { memory: 2, initial: 0, next, update }
}

/// Whether `player` can force a visit to `target` from `v` within `depth` moves.
fn forces(g: &GameGraph, player: Owner, target: &[bool], v: usize, depth: usize) -> bool {
    if target[v] {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mut succ = g.out_edges(v).iter().map(|e| forces(g, player, target, g.edge(*e).to, depth - 1));
    if g.owner(v) == player {
        succ.any(|b| b)
    } else {
        succ.all(|b| b)
    }
}

/// Averages of all closed walks of length at most `len`, per component.
fn closed_walk_averages(g: &GameGraph, scc: &[usize], len: usize) -> BTreeSet<Vec<Q>> {
    let inside: BTreeSet<usize> = scc.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &s in scc {
        let mut layer: Vec<BTreeSet<Vec<Q>>> = vec![BTreeSet::new(); g.num_vertices()];
        layer[s].insert(vec![Q::from_integer(0.into()); g.k()]);
        for steps in 1..=len {
            let mut next: Vec<BTreeSet<Vec<Q>>> = vec![BTreeSet::new(); g.num_vertices()];
            for v in inside.iter().copied() {
                for &e in g.out_edges(v) {
                    let to = g.edge(e).to;
                    if !inside.contains(&to) {
                        continue;
                    }
                    for acc in &layer[v] {
                        next[to].insert(acc.iter().zip(&g.edge(e).weight).map(|(a, b)| a + b).collect());
                    }
                }
            }
            let n = Q::from_integer((steps as i64).into());
            out.extend(next[s].iter().map(|acc| acc.iter().map(|a| a / &n).collect::<Vec<Q>>()));
            layer = next;
        }
    }
    out
}

/// `x > 0, Σx = 1, A x = p`.
fn interior_mixture(averages: &[Vec<Q>], p: &[Q]) -> bool {
    let n = averages.len();
    let mut sys = LinearSystem::new(n);
    for j in 0..n {
        sys.push(vec![(j, q(-1))], RowKind::Lt, q(0));
    }
    sys.push((0..n).map(|j| (j, q(1))).collect(), RowKind::Eq, q(1));
    for d in 0..p.len() {
        sys.push((0..n).map(|j| (j, averages[j][d].clone())).collect(), RowKind::Eq, p[d].clone());
    }
    matches!(sys.decide(), Feasibility::Feasible(_))
}

#[test]
fn figure2_is_one_component_over_both_memory_states() {
    let p = product(&figure1(), &figure1_strategy()).unwrap();
    let sccs = scc_decompose(&p.graph);
    let big: Vec<_> = sccs.iter().filter(|s| s.vertices.len() > 1).collect();
    assert_eq!(big.len(), 1);
    let memories: BTreeSet<usize> = big[0].vertices.iter().map(|v| p.states[*v].1).collect();
    assert_eq!(memories, BTreeSet::from([0, 1]));
    // Only (v3, 0) leads back to the start, and it is unreachable.
    let outside: Vec<(usize, usize)> =
        (0..p.graph.num_vertices()).filter(|v| !big[0].vertices.contains(v)).map(|v| p.states[v]).collect();
    assert_eq!(outside, vec![(0, 0)]);
}

#[test]
fn figure3_player_two_has_two_strategies_and_the_expected_bases() {
    let g = figure3();
    assert_eq!(memoryless_strategies(&g, Owner::P2).count(), 2);
    let mut seen = Vec::new();
    for tau in memoryless_strategies(&g, Owner::P2) {
        let (h, _) = tau.restrict(&g);
        let mut families: Vec<BTreeSet<Vec<Q>>> = Vec::new();
        for scc in reachable_sccs(&h).into_iter().filter(|s| s.nontrivial) {
            let bases = eulerian_cycle_sets(&h, &scc.vertices);
            families.push(bases[0].averages.iter().cloned().collect());
        }
        seen.push(families);
    }
    let pts = |xs: &[(i64, i64)]| xs.iter().map(|(a, b)| vec![q(*a), q(*b)]).collect::<BTreeSet<_>>();
    let def = pts(&[(1, 3), (2, 1), (3, 2)]);
    let ab = pts(&[(-3, -2), (-2, -1)]);
    let c = pts(&[(-1, -3)]);
    assert!(seen.contains(&vec![def]));
    let mut second = seen.into_iter().find(|f| f.len() == 2).expect("two families for the second strategy");
    second.sort();
    let mut expected = vec![ab, c];
    expected.sort();
    assert_eq!(second, expected);
}

#[test]
fn memoryless_counts_are_products_of_out_degrees() {
    let g = build_graph(1, &[Owner::P2, Owner::P2, Owner::P2], &[1, 2, 0], &[(0, 0), (1, 1), (2, 2)], &[vec![1]]);
    assert_eq!(memoryless_strategies(&g, Owner::P2).count(), 8);
    assert_eq!(memoryless_strategies(&g, Owner::P1).count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_edges_project_to_sigma_moves(
        g in arb_owned_graph(4, 4, 1),
        moves in prop::collection::vec(0usize..4, 16),
        flips in prop::collection::vec(any::<bool>(), 24),
    ) {
        let sigma = two_state(&g, &moves, &flips);
        let p = product(&g, &sigma).unwrap();
        prop_assert_eq!(p.states[0], (g.initial(), 0));
        for (i, e) in p.graph.edges().iter().enumerate() {
            let o = p.edge_origin[i];
            let (v, m) = p.states[e.from];
            let (t, m2) = p.states[e.to];
            prop_assert_eq!((g.edge(o).from, g.edge(o).to), (v, t));
            prop_assert_eq!(&g.edge(o).weight, &e.weight);
            prop_assert_eq!(m2, sigma.step(m, o));
            if g.owner(v) == Owner::P1 {
                prop_assert_eq!(sigma.next[&(m, v)], o);
            }
        }
        for u in 0..p.graph.num_vertices() {
            let (v, _) = p.states[u];
            let expected = if g.owner(v) == Owner::P1 { 1 } else { g.out_edges(v).len() };
            prop_assert_eq!(p.graph.out_edges(u).len(), expected);
        }
    }

    #[test]
    fn attractor_matches_game_tree_search(
        g in arb_owned_graph(6, 5, 1),
        pick in prop::collection::vec(any::<bool>(), 6),
        p1 in any::<bool>(),
    ) {
        let player = if p1 { Owner::P1 } else { Owner::P2 };
        let mut target: Vec<bool> = (0..g.num_vertices()).map(|v| pick[v]).collect();
        target[0] = true;
        let (attr, strategy) = attractor(&g, player, &target);
        for v in 0..g.num_vertices() {
            prop_assert_eq!(attr[v], forces(&g, player, &target, v, g.num_vertices()));
            if attr[v] && !target[v] && g.owner(v) == player {
                let e = strategy.choice[&v];
                prop_assert_eq!(g.edge(e).from, v);
                prop_assert!(attr[g.edge(e).to]);
            }
        }
    }

    #[test]
    fn attractor_grows_with_the_target(g in arb_owned_graph(6, 5, 1), a in prop::collection::vec(any::<bool>(), 6), b in prop::collection::vec(any::<bool>(), 6)) {
        let n = g.num_vertices();
        let t1: Vec<bool> = (0..n).map(|v| a[v]).collect();
        let t12: Vec<bool> = (0..n).map(|v| a[v] || b[v]).collect();
        let (x, _) = attractor(&g, Owner::P1, &t1);
        let (y, _) = attractor(&g, Owner::P1, &t12);
        prop_assert!((0..n).all(|v| !x[v] || y[v]));
    }

    #[test]
    fn bases_cover_every_cyclic_path(g in one_player(4, 2, 2)) {
        for scc in reachable_sccs(&g).into_iter().filter(|s| s.nontrivial) {
            let bases = eulerian_cycle_sets(&g, &scc.vertices);
            for avg in closed_walk_averages(&g, &scc.vertices, 12) {
                prop_assert!(
                    bases.iter().any(|b| interior_mixture(&b.averages, &avg)),
                    "cyclic path average {:?} outside every basis", avg
                );
            }
            for b in &bases {
                // Walking every cycle once is a single cyclic path over the edge set.
                let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
                b.cycles.iter().flatten().for_each(|e| *uses.entry(*e).or_default() += 1);
                prop_assert_eq!(uses.keys().copied().collect::<Vec<_>>(), b.edges.clone());
                let start = g.edge(b.edges[0]).from;
                let walk = euler_circuit(&g, &uses, start).expect("basis cycles form a cyclic path");
                prop_assert_eq!(walk.len(), b.cycles.iter().map(Vec::len).sum::<usize>());
                for c in &b.cycles {
                    prop_assert_eq!(&cycle_average(&g, c), &b.averages[b.cycles.iter().position(|x| x == c).unwrap()]);
                }
            }
        }
    }
}
