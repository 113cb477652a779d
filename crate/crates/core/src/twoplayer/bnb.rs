//! Certified bracketing of the finite-memory infimum.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_traits::{One, Signed, Zero};

use super::certify::{
    bisect, corner, image, selection_system, selections, term_forms, ComboCertificate, FloorCertificate, Leaf,
    LeafProof, LowerBoundCertificate, PartitionCertificate, SelectionRefutation, Split,
};
use super::families::{factors, support_connected, Factor};
use super::{SolverConfig, ValueInterval, Witness, WitnessFamily};
use crate::certificate::LinearSystem;
use crate::error::{Error, Result};
use crate::expr::{LinearForm, NormalForm};
use crate::graph::GameGraph;
use crate::lp::{Cmp, LinearProgram, LpResult};
use crate::oneplayer::{value_of_point_set, value_with_proof};
use crate::rational::{frac, Q};

/// `[lo, hi]` with `hi − lo ≤ eps` for the infimum over player-1
/// finite-memory strategies from the initial vertex of `g`.
pub fn inf_value(g: &GameGraph, nf: &NormalForm, eps: &Q, cfg: &SolverConfig) -> Result<ValueInterval> {
    bracket(g, nf, eps, None, cfg)
}

/// As [`inf_value`]; with a threshold `nu` the search also stops as soon as
/// `hi ≤ nu` or `lo > nu`.
pub fn bracket(g: &GameGraph, nf: &NormalForm, eps: &Q, nu: Option<&Q>, cfg: &SolverConfig) -> Result<ValueInterval> {
    if eps.is_negative() {
        return Err(Error::Precondition("eps must be nonnegative".into()));
    }
    if nf.source_k > g.k() {
        return Err(Error::DimensionOutOfRange { dim: nf.source_k, k: g.k() });
    }
    let fs = factors(g, nf, cfg.enumeration_budget)?;
    let forms = term_forms(nf);
    let mut trace = vec![format!("{} player-2 factor(s)", fs.len())];
    let mut best_floor: Option<(usize, Q, usize, Vec<Q>)> = None;
    let mut minimizers = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let (v, o, x) = floor_of(f, &forms);
        minimizers.push(family(f, i, o, x.clone()));
        if best_floor.as_ref().is_none_or(|b| v > b.1) {
            best_floor = Some((i, v, o, x));
        }
    }
    let (fi, floor, fo, fx) = best_floor.expect("at least one factor");
    trace.push(format!("floor {floor} from factor {fi}"));
    let floor_cert = floor_certificate(&fs[fi], fi, &forms, &floor);
    if fs.len() == 1 {
        return exact(g, nf, &fs[0], fo, fx, floor, floor_cert, eps, trace);
    }
    // Every factor at its own floor minimizer is often already optimal.
    let seed = minimizers
        .iter()
        .all(|m| support_connected(g, &m.cycles, &m.mixing))
        .then(|| {
            let w = Witness { families: minimizers };
            (value_of_point_set(&w.points(), nf), w)
        });
    search(nf, &fs, floor, floor_cert, eps, nu, cfg, seed, trace)
}

/// `min` over options and selections of `min_x max_T f_{s(T)}(A x)`, with the
/// minimizing option and mixture.
fn floor_of(f: &Factor, forms: &[Vec<LinearForm>]) -> (Q, usize, Vec<Q>) {
    let mut best: Option<(Q, usize, Vec<Q>)> = None;
    for (o, opt) in f.options.iter().enumerate() {
        for s in selections(forms) {
            let (v, x) = selection_min(forms, &opt.lifted, &s);
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, o, x));
            }
        }
    }
    best.expect("factor has options")
}

fn selection_min(forms: &[Vec<LinearForm>], lifted: &[Vec<Q>], selection: &[usize]) -> (Q, Vec<Q>) {
    let n = lifted.len();
    let mut lp = LinearProgram::new();
    let z = lp.add_var(false);
    let xs = lp.add_vars(n, true);
    for (t, &s) in selection.iter().enumerate() {
        let mut row = vec![(z, -Q::one())];
        for (j, p) in lifted.iter().enumerate() {
            let c: Q = forms[t][s].iter().map(|(d, c)| &p[*d - 1] * Q::from_integer((*c).into())).sum();
            if !c.is_zero() {
                row.push((xs[j], c));
            }
        }
        lp.add_constraint(row, Cmp::Le, Q::zero());
    }
    lp.add_constraint(xs.iter().map(|x| (*x, Q::one())).collect(), Cmp::Eq, Q::one());
    lp.set_objective(vec![(z, -Q::one())]);
    match lp.solve() {
        LpResult::Optimal { x, value } => (-value, xs.iter().map(|i| x[*i].clone()).collect()),
        other => unreachable!("selection LP is feasible and bounded: {other:?}"),
    }
}

fn floor_certificate(f: &Factor, index: usize, forms: &[Vec<LinearForm>], bound: &Q) -> FloorCertificate {
    let mut refutations = Vec::new();
    for (o, opt) in f.options.iter().enumerate() {
        for s in selections(forms) {
            let sys: LinearSystem = selection_system(forms, &opt.lifted, &s, bound);
            let certificate = sys.find_certificate().expect("no mixture goes below the floor");
            refutations.push(SelectionRefutation { option: o, selection: s, certificate });
        }
    }
    FloorCertificate { factor: index, bound: bound.clone(), refutations }
}

fn family(f: &Factor, factor: usize, option: usize, mixing: Vec<Q>) -> WitnessFamily {
    let opt = &f.options[option];
    let point = image(&opt.averages, &mixing);
    WitnessFamily { factor, option, cycles: opt.cycles.clone(), mixing, point }
}

/// One factor: the floor is the value. The minimizer is moved toward the
/// uniform mixture until its support is a single cyclic path.
#[allow(clippy::too_many_arguments)]
fn exact(
    g: &GameGraph,
    nf: &NormalForm,
    f: &Factor,
    option: usize,
    x: Vec<Q>,
    floor: Q,
    floor_cert: FloorCertificate,
    eps: &Q,
    mut trace: Vec<String>,
) -> Result<ValueInterval> {
    let certificate = LowerBoundCertificate { floor: Some(floor_cert), partition: None };
    let cycles = &f.options[option].cycles;
    let n = x.len();
    let uniform = frac(1, n as i64);
    let mut delta = Q::zero();
    let mut best: Option<ValueInterval> = None;
    for step in 0..64 {
        let mix: Vec<Q> = x.iter().map(|xi| (Q::one() - &delta) * xi + &delta * &uniform).collect();
        if support_connected(g, cycles, &mix) {
            let fam = family(f, 0, option, mix);
            let hi = value_of_point_set(std::slice::from_ref(&fam.point), nf);
            let done = &hi - &floor <= *eps;
            let iv = ValueInterval {
                lo: floor.clone(),
                hi,
                witness: Some(Witness { families: vec![fam] }),
                certificate: certificate.clone(),
                trace: trace.clone(),
            };
            if done {
                let mut iv = iv;
                iv.trace.push(format!("single factor, witness after {step} perturbation step(s)"));
                return Ok(iv);
            }
            best = Some(iv);
        }
        delta = if step == 0 { Q::one() } else { delta / Q::from_integer(2.into()) };
    }
    trace.push("perturbation did not reach eps".into());
    Err(Error::Budget { what: "witness perturbation".into(), best: best.map(Box::new) })
}

struct Node {
    combo: Vec<usize>,
    simplices: Vec<Vec<Vec<Q>>>,
    path: Vec<Split>,
    bound: Q,
    proof: LeafProof,
}

fn lifted_of<'a>(fs: &'a [Factor], combo: &[usize], i: usize) -> &'a [Vec<Q>] {
    &fs[i].options[combo[i]].lifted
}

fn evaluate(fs: &[Factor], nf: &NormalForm, combo: Vec<usize>, simplices: Vec<Vec<Vec<Q>>>, path: Vec<Split>) -> Node {
    let corners: Vec<Vec<Q>> = (0..fs.len()).map(|i| corner(lifted_of(fs, &combo, i), &simplices[i])).collect();
    let (bound, term, solution) = value_with_proof(&corners, nf);
    Node { combo, simplices, path, bound, proof: LeafProof { term, solution } }
}

fn centroid(vertices: &[Vec<Q>]) -> Vec<Q> {
    let n = Q::from_integer((vertices.len() as i64).into());
    let mut out = vec![Q::zero(); vertices[0].len()];
    for v in vertices {
        for (o, c) in out.iter_mut().zip(v) {
            *o += c;
        }
    }
    out.into_iter().map(|c| c / &n).collect()
}

fn upper(nf: &NormalForm, fs: &[Factor], node: &Node) -> (Q, Witness) {
    let families: Vec<WitnessFamily> = (0..fs.len())
        .map(|i| family(&fs[i], i, node.combo[i], centroid(&node.simplices[i])))
        .collect();
    let points: Vec<Vec<Q>> = families.iter().map(|f| f.point.clone()).collect();
    (value_of_point_set(&points, nf), Witness { families })
}

/// Vertex pair whose lifted images are farthest apart, over all factors.
fn widest(fs: &[Factor], node: &Node) -> Option<(usize, usize, usize)> {
    let mut best: Option<(Q, usize, usize, usize)> = None;
    for i in 0..fs.len() {
        let imgs: Vec<Vec<Q>> =
            node.simplices[i].iter().map(|v| image(lifted_of(fs, &node.combo, i), v)).collect();
        for a in 0..imgs.len() {
            for b in a + 1..imgs.len() {
                let d = imgs[a]
                    .iter()
                    .zip(&imgs[b])
                    .map(|(x, y)| (x - y).abs())
                    .max()
                    .unwrap_or_else(Q::zero);
                if best.as_ref().is_none_or(|w| d > w.0) {
                    best = Some((d, i, a, b));
                }
            }
        }
    }
    best.filter(|w| w.0.is_positive()).map(|w| (w.1, w.2, w.3))
}

fn partition(nodes: &[Node]) -> PartitionCertificate {
    let mut by: BTreeMap<Vec<usize>, Vec<Leaf>> = BTreeMap::new();
    for n in nodes {
        by.entry(n.combo.clone()).or_default().push(Leaf {
            path: n.path.clone(),
            bound: n.bound.clone(),
            proof: n.proof.clone(),
        });
    }
    PartitionCertificate { combos: by.into_iter().map(|(combo, leaves)| ComboCertificate { combo, leaves }).collect() }
}

#[allow(clippy::too_many_arguments)]
fn search(
    nf: &NormalForm,
    fs: &[Factor],
    floor: Q,
    floor_cert: FloorCertificate,
    eps: &Q,
    nu: Option<&Q>,
    cfg: &SolverConfig,
    seed: Option<(Q, Witness)>,
    mut trace: Vec<String>,
) -> Result<ValueInterval> {
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for f in fs {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                (0..f.options.len()).map(move |o| {
                    let mut d = c.clone();
                    d.push(o);
                    d
                })
            })
            .collect();
        if combos.len() > cfg.node_budget {
            return Err(Error::budget(format!("more than {} option combinations", cfg.node_budget)));
        }
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(Q, usize)>> = BinaryHeap::new();
    let mut hi: Option<(Q, Witness)> = seed;
    let consider = |node: &Node, hi: &mut Option<(Q, Witness)>| {
        let (v, w) = upper(nf, fs, node);
        if hi.as_ref().is_none_or(|h| v < h.0) {
            *hi = Some((v, w));
        }
    };
    for combo in combos {
        let simplices = fs.iter().zip(&combo).map(|(f, o)| super::certify::unit_simplex(f.options[*o].cycles.len())).collect();
        let node = evaluate(fs, nf, combo, simplices, Vec::new());
        consider(&node, &mut hi);
        heap.push(Reverse((node.bound.clone(), nodes.len())));
        nodes.push(node);
    }
    // Leaves live in `nodes`; split parents are tombstoned by `alive`.
    let mut alive = vec![true; nodes.len()];
    let mut expanded = 0usize;
    let finish = |nodes: &[Node], alive: &[bool], hi: &(Q, Witness), trace: Vec<String>| {
        let leaves: Vec<Node> = nodes
            .iter()
            .zip(alive)
            .filter(|(_, a)| **a)
            .map(|(n, _)| Node {
                combo: n.combo.clone(),
                simplices: Vec::new(),
                path: n.path.clone(),
                bound: n.bound.clone(),
                proof: n.proof.clone(),
            })
            .collect();
        let certificate = LowerBoundCertificate { floor: Some(floor_cert.clone()), partition: Some(partition(&leaves)) };
        let lo = certificate.bound().expect("certificate has a bound");
        ValueInterval { lo, hi: hi.0.clone(), witness: Some(hi.1.clone()), certificate, trace }
    };
    loop {
        let Reverse((bound, id)) = heap.peek().cloned().expect("partition is never empty");
        let lo = if bound > floor { bound.clone() } else { floor.clone() };
        let h = hi.as_ref().expect("root nodes give an upper bound");
        let stop = &h.0 - &lo <= *eps || nu.is_some_and(|nu| h.0 <= *nu || lo > *nu);
        if stop {
            trace.push(format!("branch-and-bound: {expanded} split(s)"));
            return Ok(finish(&nodes, &alive, h, trace));
        }
        if expanded >= cfg.node_budget {
            trace.push(format!("branch-and-bound: node budget {} exhausted", cfg.node_budget));
            let best = finish(&nodes, &alive, h, trace);
            return Err(Error::Budget { what: "branch-and-bound nodes".into(), best: Some(Box::new(best)) });
        }
        heap.pop();
        let Some((factor, a, b)) = widest(fs, &nodes[id]) else {
            // Degenerate leaf: every vertex has the same image, so the corner
            // is the exact value there. Nothing below it remains to refine.
            let n = &nodes[id];
            let (v, w) = upper(nf, fs, n);
            if hi.as_ref().is_none_or(|h| v < h.0) {
                hi = Some((v, w));
            }
            trace.push(format!("branch-and-bound: {expanded} split(s), exhausted leaf"));
            heap.push(Reverse((bound, id)));
            let h = hi.as_ref().expect("upper bound");
            let best = finish(&nodes, &alive, h, trace);
            return if &best.hi - &best.lo <= *eps {
                Ok(best)
            } else {
                Err(Error::Budget { what: "branch-and-bound stalled".into(), best: Some(Box::new(best)) })
            };
        };
        alive[id] = false;
        expanded += 1;
        for side in 0..2u8 {
            let parent = &nodes[id];
            let mut simplices = parent.simplices.clone();
            simplices[factor] = bisect(&parent.simplices[factor], a, b, side);
            let mut path = parent.path.clone();
            path.push(Split { factor, a, b, side });
            let child = evaluate(fs, nf, parent.combo.clone(), simplices, path);
            consider(&child, &mut hi);
            heap.push(Reverse((child.bound.clone(), nodes.len())));
            nodes.push(child);
            alive.push(true);
        }
    }
}
