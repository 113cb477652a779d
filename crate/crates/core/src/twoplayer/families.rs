//! The search space behind the finite-memory infimum: for every player-2
//! memoryless strategy `τ` (a factor), player 1 picks a reachable nontrivial
//! component of `G^τ` (an option) and a mixture of its simple cycles.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::expr::NormalForm;
use crate::graph::{
    cycle_average, memoryless_over, reachable_from, reachable_sccs, simple_cycles_within, GameGraph, MemorylessStrategy,
    Owner,
};
use crate::rational::Q;

/// All simple cycles of one strongly connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleFamily {
    /// Internal edges of the component (sorted edge ids of the game graph).
    pub edges: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    pub averages: Vec<Vec<Q>>,
    /// Averages in the extended coordinates of the normal form.
    pub lifted: Vec<Vec<Q>>,
}

impl CycleFamily {
    pub fn is_point(&self) -> bool {
        self.cycles.len() == 1
    }
}

/// Player-2 strategies that leave player 1 the same options.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub taus: Vec<MemorylessStrategy>,
    pub options: Vec<CycleFamily>,
}

/// Factors of `g` from its initial vertex. Player-2 strategies are taken over
/// the player-2 vertices reachable from there; strategies inducing the same
/// option list are merged. `budget` caps the number of strategies examined.
pub fn factors(g: &GameGraph, nf: &NormalForm, budget: usize) -> Result<Vec<Factor>> {
    let reach = reachable_from(g, g.initial());
    let p2: Vec<usize> = (0..g.num_vertices()).filter(|v| reach[*v] && g.owner(*v) == Owner::P2).collect();
    let mut families: HashMap<Vec<usize>, CycleFamily> = HashMap::new();
    let mut by_options: BTreeMap<Vec<Vec<usize>>, usize> = BTreeMap::new();
    let mut out: Vec<Factor> = Vec::new();
    for (count, tau) in memoryless_over(g, p2).enumerate() {
        if count >= budget {
            return Err(Error::budget(format!("more than {budget} player-2 memoryless strategies")));
        }
        let (h, kept) = tau.restrict(g);
        let mut keys = Vec::new();
        for scc in reachable_sccs(&h).into_iter().filter(|s| s.nontrivial) {
            let mut inside = vec![false; g.num_vertices()];
            scc.vertices.iter().for_each(|v| inside[*v] = true);
            let mut edges: Vec<usize> =
                kept.iter().copied().filter(|e| inside[g.edge(*e).from] && inside[g.edge(*e).to]).collect();
            edges.sort_unstable();
            families.entry(edges.clone()).or_insert_with(|| family(g, nf, &edges));
            keys.push(edges);
        }
        keys.sort();
        match by_options.get(&keys) {
            Some(&i) => out[i].taus.push(tau),
            None => {
                by_options.insert(keys.clone(), out.len());
                let options = keys.iter().map(|k| families[k].clone()).collect();
                out.push(Factor { taus: vec![tau], options });
            }
        }
    }
    Ok(out)
}

fn family(g: &GameGraph, nf: &NormalForm, edges: &[usize]) -> CycleFamily {
    let mut allowed = vec![false; g.num_edges()];
    edges.iter().for_each(|e| allowed[*e] = true);
    let cycles = simple_cycles_within(g, &allowed);
    let averages: Vec<Vec<Q>> = cycles.iter().map(|c| cycle_average(g, c)).collect();
    let lifted = averages.iter().map(|a| nf.lift(a)).collect();
    CycleFamily { edges: edges.to_vec(), cycles, averages, lifted }
}

/// Whether the cycles with positive weight share vertices transitively, so
/// that one cyclic path can traverse exactly them.
pub fn support_connected(g: &GameGraph, cycles: &[Vec<usize>], mixing: &[Q]) -> bool {
    use num_traits::Signed;
    let support: Vec<Vec<usize>> = cycles
        .iter()
        .zip(mixing)
        .filter(|(_, x)| x.is_positive())
        .map(|(c, _)| {
            let mut vs: Vec<usize> = c.iter().map(|e| g.edge(*e).from).collect();
            vs.sort_unstable();
            vs
        })
        .collect();
    if support.is_empty() {
        return false;
    }
    let mut reached = vec![false; support.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..support.len() {
            if !reached[j] && support[i].iter().any(|v| support[j].binary_search(v).is_ok()) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}
