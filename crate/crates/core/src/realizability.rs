//! Realizability of a vector set: is there a finite-memory player-1 strategy
//! `σ` with `CONV(G^σ) ⊆ CONV(V)`? Decided per player-2 memoryless strategy
//! over Eulerian cycle families, and made constructive by pumping a rational
//! cycle mixture along an Euler circuit and composing the per-edge-split
//! strategies.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::certificate::{verify, Feasibility, LinearSystem, MotzkinCertificate, RowKind};
use crate::error::{Error, Result};
use crate::geometry::{combine, member, Polytope};
use crate::graph::{
    cycle_average, euler_circuit, eulerian_cycle_sets, memoryless_over, product, reachable_from, reachable_sccs,
    simple_cycles, Edge, GameGraph, MemorylessStrategy, MooreStrategy, Owner,
};
use crate::rational::Q;

/// Per player-2 strategy: an Eulerian cyclic path and an interior mixture of
/// its simple cycles that lands in `CONV(V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyWitness {
    pub tau: MemorylessStrategy,
    /// Closed walk through every cycle of the family once (original edge ids).
    pub path: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
    pub averages: Vec<Vec<Q>>,
    pub mixing: Vec<Q>,
    pub point: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizabilityWitness {
    pub families: Vec<FamilyWitness>,
}

/// One refuted cycle family: the system "interior mixture of the family's
/// averages equals a point of `CONV(V)`" with its Motzkin certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRefutation {
    pub cycles: Vec<Vec<usize>>,
    pub system: LinearSystem,
    pub certificate: MotzkinCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blocking {
    pub tau: MemorylessStrategy,
    pub refutations: Vec<BasisRefutation>,
}

impl Blocking {
    pub fn verify(&self) -> bool {
        self.refutations.iter().all(|r| verify(&r.system, &r.certificate))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Realizability {
    Yes(RealizabilityWitness),
    No(Blocking),
}

/// Edge-filtered view of `g` that keeps vertex ids and remembers edge ids.
fn masked(g: &GameGraph, allowed: &[bool]) -> (GameGraph, Vec<usize>) {
    let origin: Vec<usize> = (0..g.num_edges()).filter(|e| allowed[*e]).collect();
    let edges: Vec<Edge> = origin.iter().map(|e| g.edge(*e).clone()).collect();
    let h = GameGraph::new(g.k(), g.vertices().to_vec(), edges, g.initial()).expect("mask keeps an edge per vertex");
    (h, origin)
}

/// `x > 0, Σx = 1, μ ≥ 0, Σμ = 1, A x = V μ` over variables `(x, μ)`.
fn mixture_system(averages: &[Vec<Q>], target: &Polytope) -> LinearSystem {
    let nx = averages.len();
    let nm = target.points().len();
    let mut sys = LinearSystem::new(nx + nm);
    for j in 0..nx {
        sys.push(vec![(j, -Q::one())], RowKind::Lt, Q::zero());
    }
    for j in 0..nm {
        sys.push(vec![(nx + j, -Q::one())], RowKind::Le, Q::zero());
    }
    sys.push((0..nx).map(|j| (j, Q::one())).collect(), RowKind::Eq, Q::one());
    sys.push((0..nm).map(|j| (nx + j, Q::one())).collect(), RowKind::Eq, Q::one());
    for d in 0..target.dim() {
        let mut row: Vec<(usize, Q)> = (0..nx).map(|j| (j, averages[j][d].clone())).collect();
        row.extend((0..nm).map(|j| (nx + j, -target.points()[j][d].clone())));
        row.retain(|(_, c)| !c.is_zero());
        sys.push(row, RowKind::Eq, Q::zero());
    }
    sys
}

fn realizable_masked(g: &GameGraph, allowed: &[bool], target: &Polytope) -> Result<Realizability> {
    if target.dim() != g.k() {
        return Err(Error::Input(format!("polytope dimension {} differs from graph dimension {}", target.dim(), g.k())));
    }
    let (h, origin) = masked(g, allowed);
    let reach = reachable_from(&h, h.initial());
    let p2: Vec<usize> = (0..h.num_vertices()).filter(|v| reach[*v] && h.owner(*v) == Owner::P2).collect();
    let mut families = Vec::new();
    for tau in memoryless_over(&h, p2) {
        let (ht, kept) = tau.restrict(&h);
        let to_orig = |e: usize| origin[kept[e]];
        let mut refutations = Vec::new();
        let mut found = None;
        'sccs: for scc in reachable_sccs(&ht).into_iter().filter(|s| s.nontrivial) {
            for basis in eulerian_cycle_sets(&ht, &scc.vertices) {
                let sys = mixture_system(&basis.averages, target);
                let cycles: Vec<Vec<usize>> =
                    basis.cycles.iter().map(|c| c.iter().map(|e| to_orig(*e)).collect()).collect();
                match sys.decide() {
                    Feasibility::Feasible(sol) => {
                        let mixing = sol[..basis.averages.len()].to_vec();
                        let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
                        basis.cycles.iter().flatten().for_each(|e| *uses.entry(*e).or_default() += 1);
                        let start = ht.edge(basis.edges[0]).from;
                        let path = euler_circuit(&ht, &uses, start).expect("union of cycles is Eulerian");
                        let point = combine(&basis.averages, &mixing);
                        found = Some(FamilyWitness {
                            tau: MemorylessStrategy {
                                choice: tau.choice.iter().map(|(v, e)| (*v, origin[*e])).collect(),
                            },
                            path: path.into_iter().map(to_orig).collect(),
                            cycles,
                            averages: basis.averages,
                            mixing,
                            point,
                        });
                        break 'sccs;
                    }
                    Feasibility::Infeasible(certificate) => {
                        refutations.push(BasisRefutation { cycles, system: sys, certificate })
                    }
                }
            }
        }
        match found {
            Some(w) => families.push(w),
            None => {
                let tau = MemorylessStrategy { choice: tau.choice.iter().map(|(v, e)| (*v, origin[*e])).collect() };
                return Ok(Realizability::No(Blocking { tau, refutations }));
            }
        }
    }
    Ok(Realizability::Yes(RealizabilityWitness { families }))
}

pub fn is_realizable(g: &GameGraph, target: &Polytope) -> Result<Realizability> {
    realizable_masked(g, &vec![true; g.num_edges()], target)
}

/// Integer cycle repetitions `n_c` with `n_c · |c| ∝ mixing[c]`, so that
/// walking every cycle `n_c` times averages exactly to the mixture.
pub fn pump_counts(cycles: &[Vec<usize>], mixing: &[Q]) -> Vec<usize> {
    let shares: Vec<Q> = cycles
        .iter()
        .zip(mixing)
        .map(|(c, x)| x / Q::from_integer(BigInt::from(c.len())))
        .collect();
    let lcm = shares.iter().fold(BigInt::one(), |acc, s| acc.lcm(s.denom()));
    let counts: Vec<BigInt> = shares.iter().map(|s| (s * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = counts.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    counts.iter().map(|c| (c / &g).to_usize().expect("pump counts fit in memory")).collect()
}

/// Strategy that walks from the initial vertex to the pumped walk and then
/// repeats it forever. Memory counts positions along the lasso. Player-2
/// vertices on the way must have a single allowed edge.
fn lasso_strategy(g: &GameGraph, allowed: &[bool], w: &FamilyWitness) -> MooreStrategy {
    let counts = pump_counts(&w.cycles, &w.mixing);
    let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
    for (c, n) in w.cycles.iter().zip(&counts) {
        for e in c {
            *mult.entry(*e).or_default() += n;
        }
    }
    let support: BTreeSet<usize> = mult.keys().map(|e| g.edge(*e).from).collect();
    // Shortest allowed path from v0 into the support.
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([g.initial()]);
    let mut seen = vec![false; g.num_vertices()];
    seen[g.initial()] = true;
    let mut entry = None;
    while let Some(v) = queue.pop_front() {
        if support.contains(&v) {
            entry = Some(v);
            break;
        }
        for &e in g.out_edges(v).iter().filter(|e| allowed[**e]) {
            let t = g.edge(e).to;
            if !seen[t] {
                seen[t] = true;
                prev.insert(t, e);
                queue.push_back(t);
            }
        }
    }
    let entry = entry.expect("witness component is reachable");
    let mut prefix = Vec::new();
    let mut v = entry;
    while v != g.initial() {
        let e = prev[&v];
        prefix.push(e);
        v = g.edge(e).from;
    }
    prefix.reverse();
    let circuit = euler_circuit(g, &mult, entry).expect("connected balanced support");

    let p = prefix.len();
    let l = circuit.len();
    let mut next = BTreeMap::new();
    let mut update = BTreeMap::new();
    for (i, &e) in prefix.iter().chain(&circuit).enumerate() {
        let from = g.edge(e).from;
        if g.owner(from) == Owner::P1 {
            next.insert((i, from), e);
        }
        let after = if i + 1 < p + l { i + 1 } else { p };
        update.insert((i, e), after);
    }
    MooreStrategy { memory: p + l, initial: 0, next, update }
}

/// States `(vertex, memory)` reachable under `sigma` using allowed edges only.
fn reachable_states(g: &GameGraph, allowed: &[bool], sigma: &MooreStrategy) -> Result<BTreeSet<(usize, usize)>> {
    let start = (g.initial(), sigma.initial);
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((v, m)) = queue.pop_front() {
        let moves: Vec<usize> = if g.owner(v) == Owner::P1 {
            vec![sigma.choose(g, m, v)?]
        } else {
            g.out_edges(v).iter().copied().filter(|e| allowed[*e]).collect()
        };
        for e in moves {
            let s = (g.edge(e).to, sigma.step(m, e));
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
    }
    Ok(seen)
}

/// Combines `sigma1` (for `G − e1`) and `sigma2` (for `G − e2`), where `e1`
/// and `e2` leave the same player-2 vertex `u`. Play starts with `sigma2`;
/// when player 2 takes `e2` the play continues with `sigma1`, and when it
/// takes `e1` it returns to `sigma2`. The inactive component keeps the
/// memory it had at `u`. `sigma1` enters from a memory state it can be in at `u`.
pub fn compose_strategies(
    g: &GameGraph,
    sigma1: &MooreStrategy,
    sigma2: &MooreStrategy,
    e1: usize,
    e2: usize,
) -> Result<MooreStrategy> {
    let u = g.edge(e1).from;
    if g.edge(e2).from != u || e1 == e2 {
        return Err(Error::Input("composed edges must be distinct and share their source".into()));
    }
    let mut without_e1 = vec![true; g.num_edges()];
    without_e1[e1] = false;
    let m_u = reachable_states(g, &without_e1, sigma1)?
        .into_iter()
        .find(|(v, _)| *v == u)
        .map(|(_, m)| m)
        .unwrap_or(sigma1.initial);
    compose_from(g, &vec![true; g.num_edges()], sigma1, sigma2, e1, e2, m_u)
}

/// Composition restricted to the edges in `allowed`; player-2 moves outside
/// it are never explored.
fn compose_from(
    g: &GameGraph,
    allowed: &[bool],
    sigma1: &MooreStrategy,
    sigma2: &MooreStrategy,
    e1: usize,
    e2: usize,
    m_u: usize,
) -> Result<MooreStrategy> {
    type State = (u8, usize, usize);
    let transition = |s: State, e: usize| -> State {
        let (mode, m1, m2) = s;
        match mode {
            2 if e == e2 => (1, sigma1.step(m1, e), m2),
            2 => (2, m1, sigma2.step(m2, e)),
            _ if e == e1 => (2, m1, sigma2.step(m2, e)),
            _ => (1, sigma1.step(m1, e), m2),
        }
    };
    let start: State = (2, m_u, sigma2.initial);
    let mut ids: HashMap<State, usize> = HashMap::from([(start, 0)]);
    let mut states = vec![start];
    let mut seen = BTreeSet::from([(g.initial(), 0usize)]);
    let mut queue = VecDeque::from([(g.initial(), 0usize)]);
    let mut next = BTreeMap::new();
    let mut update = BTreeMap::new();
    while let Some((v, id)) = queue.pop_front() {
        let s = states[id];
        let moves: Vec<usize> = if g.owner(v) == Owner::P1 {
            let e = if s.0 == 2 { sigma2.choose(g, s.2, v)? } else { sigma1.choose(g, s.1, v)? };
            next.insert((id, v), e);
            vec![e]
        } else {
            g.out_edges(v).iter().copied().filter(|e| allowed[*e]).collect()
        };
        for e in moves {
            let t = transition(s, e);
            let tid = *ids.entry(t).or_insert_with(|| {
                states.push(t);
                states.len() - 1
            });
            if tid != id {
                update.insert((id, e), tid);
            }
            let nv = (g.edge(e).to, tid);
            if seen.insert(nv) {
                queue.push_back(nv);
            }
        }
    }
    Ok(MooreStrategy { memory: states.len(), initial: 0, next, update })
}

fn realize(g: &GameGraph, allowed: &[bool], target: &Polytope) -> Result<MooreStrategy> {
    let (h, _) = masked(g, allowed);
    let reach = reachable_from(&h, h.initial());
    let split = (0..g.num_vertices())
        .find(|v| reach[*v] && g.owner(*v) == Owner::P2 && g.out_edges(*v).iter().filter(|e| allowed[**e]).count() >= 2);
    let Some(u) = split else {
        return match realizable_masked(g, allowed, target)? {
            Realizability::Yes(w) => Ok(lasso_strategy(g, allowed, &w.families[0])),
            Realizability::No(_) => Err(Error::Precondition("vector set is not realizable".into())),
        };
    };
    let mut choices = g.out_edges(u).iter().copied().filter(|e| allowed[*e]);
    let (e1, e2) = (choices.next().unwrap(), choices.next().unwrap());
    let mut a1 = allowed.to_vec();
    a1[e1] = false;
    let mut a2 = allowed.to_vec();
    a2[e2] = false;
    let sigma1 = realize(g, &a1, target)?;
    let sigma2 = realize(g, &a2, target)?;
    if !reachable_states(g, &a2, &sigma2)?.iter().any(|(v, _)| *v == u) {
        return Ok(sigma2);
    }
    let reach1 = reachable_states(g, &a1, &sigma1)?;
    let Some(&(_, m_u)) = reach1.iter().find(|(v, _)| *v == u) else {
        return Ok(sigma1);
    };
    compose_from(g, allowed, &sigma1, &sigma2, e1, e2, m_u)
}

/// A finite-memory strategy whose product graph has every simple-cycle
/// average inside `CONV(target)`. The result is checked before it is returned.
pub fn realizing_strategy(g: &GameGraph, target: &Polytope) -> Result<MooreStrategy> {
    if let Realizability::No(_) = is_realizable(g, target)? {
        return Err(Error::Precondition("vector set is not realizable".into()));
    }
    let sigma = realize(g, &vec![true; g.num_edges()], target)?;
    if !strategy_stays_inside(g, &sigma, target)? {
        return Err(Error::Precondition("composed strategy escaped the target hull".into()));
    }
    Ok(sigma)
}

/// `CONV(G^σ) ⊆ CONV(target)`, by enumerating the simple cycles of the product.
pub fn strategy_stays_inside(g: &GameGraph, sigma: &MooreStrategy, target: &Polytope) -> Result<bool> {
    let p = product(g, sigma)?;
    Ok(simple_cycles(&p.graph).iter().all(|c| member(&cycle_average(&p.graph, c), target).is_some()))
}
