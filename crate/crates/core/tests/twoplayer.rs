use mpgame::expr::{li, ls, max};
use mpgame::fixtures::{figure1, figure1_strategy, figure3, two_loops};
use mpgame::graph::{product_full, GraphBuilder, Owner};
use mpgame::rational::{frac, q, Q};
use mpgame::twoplayer::{
    epsilon_optimal_strategy, eval_strategy, inf_value, verify_lower_bound, winning_region, SolverConfig, Verdict,
};
use mpgame::{oneplayer, Expression};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn max12() -> Expression {
    max(vec![li(1), li(2)])
}

#[test]
fn two_loops_value_is_five_at_half() {
    let g = two_loops();
    let nf = max12().normalize(2).unwrap();
    let iv = inf_value(&g, &nf, &frac(1, 100), &cfg()).unwrap();
    assert_eq!((iv.lo.clone(), iv.hi.clone()), (q(5), q(5)));
    let w = iv.witness.unwrap();
    assert_eq!(w.families[0].mixing, vec![frac(1, 2), frac(1, 2)]);
    assert_eq!(verify_lower_bound(&g, &nf, &iv.certificate, 1000), Some(q(5)));
}

#[test]
fn two_loops_strategy_alternates() {
    let g = two_loops();
    let nf = max12().normalize(2).unwrap();
    let s = epsilon_optimal_strategy(&g, &nf, &Q::from_integer(0.into()), &cfg()).unwrap();
    assert_eq!(s.value, q(5));
    assert_eq!(s.strategy.memory, 2);
    assert_eq!(eval_strategy(&g, &s.strategy, &nf).unwrap(), q(5));
}

#[test]
fn two_loops_thresholds() {
    let g = two_loops();
    let nf = max12().normalize(2).unwrap();
    let yes = winning_region(&g, &nf, &q(5), &frac(1, 100), &cfg()).unwrap();
    assert!(yes.verdicts[0].is_yes());
    let no = winning_region(&g, &nf, &frac(49, 10), &frac(1, 100), &cfg()).unwrap();
    match &no.verdicts[0] {
        Verdict::No { lo, certificate } => {
            assert!(*lo > frac(49, 10));
            assert_eq!(verify_lower_bound(&g, &nf, certificate, 1000).as_ref(), Some(lo));
        }
        other => panic!("expected No, got {other:?}"),
    }
}

#[test]
fn single_cycle_is_exact() {
    let mut b = GraphBuilder::new(1);
    let a = b.vertex("a", Owner::P1);
    let c = b.vertex("c", Owner::P2);
    b.edge(a, c, vec![q(1)]);
    b.edge(c, a, vec![q(4)]);
    let g = b.finish(a).unwrap();
    let nf = li(1).normalize(1).unwrap();
    let iv = inf_value(&g, &nf, &frac(1, 10), &cfg()).unwrap();
    assert_eq!((iv.lo, iv.hi), (frac(5, 2), frac(5, 2)));
}

#[test]
fn figure1_strategy_value_matches_product_cycles() {
    let g = figure1();
    let s = figure1_strategy();
    let nf = li(1).normalize(3).unwrap();
    let v = eval_strategy(&g, &s, &nf).unwrap();
    let p = product_full(&g, &s).unwrap();
    assert_eq!(p.graph.num_vertices(), 8);
    // Player 2 maximizes over the cycles reachable in the product.
    let reach = mpgame::graph::reachable_from(&p.graph, p.graph.initial());
    let best = mpgame::graph::simple_cycles(&p.graph)
        .iter()
        .filter(|c| reach[p.graph.edge(c[0]).from])
        .map(|c| mpgame::graph::cycle_average(&p.graph, c)[0].clone())
        .max()
        .unwrap();
    assert_eq!(v, best);
}

#[test]
fn figure3_value_and_strategy() {
    let g = figure3();
    let nf = max(vec![li(1), li(2)]).normalize(2).unwrap();
    let iv = inf_value(&g, &nf, &frac(1, 100), &cfg()).unwrap();
    assert!(iv.hi.clone() - iv.lo.clone() <= frac(1, 100));
    let s = epsilon_optimal_strategy(&g, &nf, &frac(1, 100), &cfg()).unwrap();
    assert!(s.value <= iv.hi.clone() + frac(1, 100));
    assert!(s.value >= iv.lo);
}

#[test]
fn modes_agree_on_two_loops() {
    let g = two_loops();
    let e = max(vec![li(1), ls(1)]);
    let mut c = cfg();
    let a = inf_value(&g, &c.normal_form(&e, 2).unwrap(), &frac(1, 100), &c).unwrap();
    c.set_mode(true);
    let b = inf_value(&g, &c.normal_form(&e, 2).unwrap(), &frac(1, 100), &c).unwrap();
    assert_eq!((a.lo, a.hi), (b.lo, b.hi));
    let one = oneplayer::solve(&g, &li(1).normalize(2).unwrap()).unwrap();
    assert_eq!(one, q(9));
}

/// Two player-2 vertices with two moves each, so realizing strategies are
/// composed twice; the inner composition must ignore the masked edge.
#[test]
fn nested_composition_in_regions() {
    let mut b = GraphBuilder::new(1);
    let v: Vec<usize> = (0..5).map(|i| b.vertex(format!("v{i}"), if i < 3 { Owner::P1 } else { Owner::P2 })).collect();
    for (from, to, w) in [(0, 4, -2), (0, 2, 0), (1, 1, -1), (1, 3, 1), (2, 1, -4), (3, 4, -2), (3, 2, 1), (4, 1, -2), (4, 4, -2)] {
        b.edge(v[from], v[to], vec![q(w)]);
    }
    let g = b.finish(v[0]).unwrap();
    let nf = mpgame::expr::sum(vec![li(1), li(1)]).normalize(1).unwrap();
    let region = winning_region(&g, &nf, &q(-1), &frac(1, 100), &cfg()).unwrap();
    for (u, verdict) in region.verdicts.iter().enumerate() {
        if let Verdict::Yes { hi, strategy: Some(s), .. } = verdict {
            let value = eval_strategy(&g.with_initial(u), s, &nf).unwrap();
            assert!(value <= hi + frac(1, 100), "vertex {u}: {value} above {hi}");
        }
    }
}
