//! Strategy evaluation and ε-optimal synthesis.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::ControlFlow;

use super::{inf_value, SolverConfig, ValueInterval};
use crate::error::{Error, Result};
use crate::expr::NormalForm;
use crate::geometry::Polytope;
use crate::graph::{product, GameGraph, MooreStrategy, Owner};
use crate::oneplayer;
use crate::rational::Q;
use crate::realizability::realizing_strategy;

/// Value player 2 can force against σ: the best component of the product.
pub fn eval_strategy(g: &GameGraph, sigma: &MooreStrategy, nf: &NormalForm) -> Result<Q> {
    let p = product(g, sigma)?;
    oneplayer::solve(&p.graph, nf)
}

#[derive(Debug, Clone)]
pub struct Synthesized {
    pub strategy: MooreStrategy,
    /// Exact value of `strategy`.
    pub value: Q,
    pub interval: ValueInterval,
    /// Whether the strategy came from the enumeration fallback.
    pub enumerated: bool,
}

/// A strategy whose exact value is at most `hi + eps` for the bracket `[lo,
/// hi]` of the infimum. Built from the bracket's witness when possible,
/// otherwise found by bounded enumeration.
pub fn epsilon_optimal_strategy(g: &GameGraph, nf: &NormalForm, eps: &Q, cfg: &SolverConfig) -> Result<Synthesized> {
    let interval = inf_value(g, nf, eps, cfg)?;
    let target = &interval.hi + eps;
    if let Some(w) = &interval.witness {
        let hull = Polytope::new(w.points())?;
        if let Ok(strategy) = realizing_strategy(g, &hull) {
            let value = eval_strategy(g, &strategy, nf)?;
            if value <= target {
                return Ok(Synthesized { strategy, value, interval, enumerated: false });
            }
        }
    }
    let mut found = None;
    enumerate_strategies(g, 3, cfg.enumeration_budget, |s| match eval_strategy(g, s, nf) {
        Ok(v) if v <= target => {
            found = Some((s.clone(), v));
            ControlFlow::Break(())
        }
        _ => ControlFlow::Continue(()),
    })?;
    match found {
        Some((strategy, value)) => Ok(Synthesized { strategy, value, interval, enumerated: true }),
        None => Err(Error::Budget { what: "strategy enumeration".into(), best: Some(Box::new(interval)) }),
    }
}

enum Decision {
    Move(usize, usize),
    Update(usize, usize),
}

/// Visits every Moore strategy with at most `max_memory` states, up to
/// renaming of memory states and up to choices at unreachable states.
/// Fails once more than `budget` strategies have been produced.
pub fn enumerate_strategies(
    g: &GameGraph,
    max_memory: usize,
    budget: usize,
    mut visit: impl FnMut(&MooreStrategy) -> ControlFlow<()>,
) -> Result<()> {
    let mut sigma = MooreStrategy { memory: 1, initial: 0, next: BTreeMap::new(), update: BTreeMap::new() };
    let mut count = 0usize;
    let _ = descend(g, max_memory.max(1), budget, &mut sigma, &mut count, &mut visit)?;
    Ok(())
}

fn open_decision(g: &GameGraph, sigma: &MooreStrategy) -> Option<Decision> {
    let start = (g.initial(), 0);
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((v, m)) = queue.pop_front() {
        let edges: Vec<usize> = if g.owner(v) == Owner::P1 {
            match sigma.next.get(&(m, v)) {
                Some(e) => vec![*e],
                None => return Some(Decision::Move(m, v)),
            }
        } else {
            g.out_edges(v).to_vec()
        };
        for e in edges {
            let Some(&m2) = sigma.update.get(&(m, e)) else { return Some(Decision::Update(m, e)) };
            let s = (g.edge(e).to, m2);
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    None
}

fn descend(
    g: &GameGraph,
    max_memory: usize,
    budget: usize,
    sigma: &mut MooreStrategy,
    count: &mut usize,
    visit: &mut impl FnMut(&MooreStrategy) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    match open_decision(g, sigma) {
        None => {
            *count += 1;
            if *count > budget {
                return Err(Error::budget(format!("more than {budget} enumerated strategies")));
            }
            Ok(visit(sigma))
        }
        Some(Decision::Move(m, v)) => {
            for &e in g.out_edges(v) {
                sigma.next.insert((m, v), e);
                if descend(g, max_memory, budget, sigma, count, visit)?.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
            sigma.next.remove(&(m, v));
            Ok(ControlFlow::Continue(()))
        }
        Some(Decision::Update(m, e)) => {
            let used = sigma.memory;
            for to in 0..(used + 1).min(max_memory) {
                sigma.update.insert((m, e), to);
                sigma.memory = used.max(to + 1);
                if descend(g, max_memory, budget, sigma, count, visit)?.is_break() {
                    return Ok(ControlFlow::Break(()));
                }
            }
            sigma.update.remove(&(m, e));
            sigma.memory = used;
            Ok(ControlFlow::Continue(()))
        }
    }
}
