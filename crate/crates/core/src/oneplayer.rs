//! One-player values: the largest threshold `ν` for which the max-free
//! constraints of some normal-form term are feasible.
//!
//! For a term with lim-inf dimensions `L` and lim-sup dimensions `S`, every
//! `i ∈ S` gets its own mixing vector `Xⁱ` over the generators (cycle averages
//! or normalized edge flows), with `Σ_c Xⁱ_c p_c[m] ≥ r_m` for `m ∈ L ∪ {i}`.
//! A term without lim-sup atoms uses a single shared mixing vector. The atom
//! values `r` then have to clear `ν` in every row of [`min_of_sums`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::certificate::{verify, Feasibility, LinearSystem, MotzkinCertificate};
use crate::error::{Error, Result};
use crate::expr::{min_of_sums, AtomKind, MaxFreeTerm, NormalForm};
use crate::graph::{reachable_sccs, GameGraph};
use crate::lp::{Cmp, LinearProgram, LpResult};
use crate::rational::Q;

/// The threshold: a fixed value, or an LP variable that gets maximized.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    Fixed(Q),
    Var(usize),
}

#[derive(Debug, Clone)]
pub struct MaxFreeConstraintSystem {
    pub lp: LinearProgram,
    /// One mixing vector per lim-sup atom, or a single shared one.
    pub mixing: Vec<Vec<usize>>,
    /// Extended dimension (1-based) → atom-value variable.
    pub r: BTreeMap<usize, usize>,
    pub nu: Threshold,
}

/// What a mixing vector ranges over: explicit points, or unit-mass
/// circulations on a strongly connected edge set.
enum Generators<'a> {
    Points(&'a [Vec<Q>]),
    Flow { heads: &'a [(usize, usize)], weights: &'a [Vec<Q>] },
}

impl Generators<'_> {
    fn count(&self) -> usize {
        match self {
            Generators::Points(p) => p.len(),
            Generators::Flow { weights, .. } => weights.len(),
        }
    }

    fn coord(&self, j: usize, m: usize) -> &Q {
        match self {
            Generators::Points(p) => &p[j][m - 1],
            Generators::Flow { weights, .. } => &weights[j][m - 1],
        }
    }

    fn add_mixing(&self, lp: &mut LinearProgram) -> Vec<usize> {
        let x = lp.add_vars(self.count(), true);
        lp.add_constraint(x.iter().map(|v| (*v, Q::one())).collect(), Cmp::Eq, Q::one());
        if let Generators::Flow { heads, .. } = self {
            let mut balance: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
            for (j, (from, to)) in heads.iter().enumerate() {
                if from != to {
                    balance.entry(*from).or_default().push((x[j], Q::one()));
                    balance.entry(*to).or_default().push((x[j], -Q::one()));
                }
            }
            for (_, row) in balance {
                lp.add_constraint(row, Cmp::Eq, Q::zero());
            }
        }
        x
    }
}

fn build(term: &MaxFreeTerm, gens: &Generators<'_>, nu: Option<&Q>) -> MaxFreeConstraintSystem {
    let atoms = term.atoms();
    let inf_dims: Vec<usize> = atoms.iter().filter(|a| a.0 == AtomKind::LimInf).map(|a| a.1).collect();
    let sup_dims: Vec<usize> = atoms.iter().filter(|a| a.0 == AtomKind::LimSup).map(|a| a.1).collect();
    let mut lp = LinearProgram::new();
    let r: BTreeMap<usize, usize> = atoms.iter().map(|a| (a.1, lp.add_var(false))).collect();

    let mut mixing = Vec::new();
    let mut bound = |lp: &mut LinearProgram, dims: &[usize]| {
        let x = gens.add_mixing(lp);
        for &m in dims {
            let mut row: Vec<(usize, Q)> = x
                .iter()
                .enumerate()
                .filter(|(j, _)| !gens.coord(*j, m).is_zero())
                .map(|(j, v)| (*v, gens.coord(j, m).clone()))
                .collect();
            row.push((r[&m], -Q::one()));
            lp.add_constraint(row, Cmp::Ge, Q::zero());
        }
        mixing.push(x);
    };
    if sup_dims.is_empty() {
        bound(&mut lp, &inf_dims);
    } else {
        for &i in &sup_dims {
            let mut dims = inf_dims.clone();
            dims.push(i);
            bound(&mut lp, &dims);
        }
    }

    let nu = match nu {
        Some(v) => Threshold::Fixed(v.clone()),
        None => Threshold::Var(lp.add_var(false)),
    };
    for form in min_of_sums(term) {
        let mut row: Vec<(usize, Q)> = form.iter().map(|(d, c)| (r[d], Q::from_integer((*c).into()))).collect();
        match &nu {
            Threshold::Fixed(v) => lp.add_constraint(row, Cmp::Ge, v.clone()),
            Threshold::Var(t) => {
                row.push((*t, -Q::one()));
                lp.add_constraint(row, Cmp::Ge, Q::zero());
            }
        }
    }
    if let Threshold::Var(t) = nu {
        lp.set_objective(vec![(t, Q::one())]);
    }
    MaxFreeConstraintSystem { lp, mixing, r, nu }
}

/// Max-free constraints of `term` at threshold `nu` over the given points
/// (coordinates in the extended space of the normal form).
pub fn build_constraints(term: &MaxFreeTerm, points: &[Vec<Q>], nu: &Q) -> MaxFreeConstraintSystem {
    build(term, &Generators::Points(points), Some(nu))
}

pub enum Answer {
    Yes(Vec<Q>),
    No(MotzkinCertificate),
}

/// Exact feasibility with a solution or a Motzkin certificate.
pub fn feasible(system: &MaxFreeConstraintSystem) -> Answer {
    match LinearSystem::from_lp(&system.lp).decide() {
        Feasibility::Feasible(x) => Answer::Yes(x),
        Feasibility::Infeasible(c) => Answer::No(c),
    }
}

/// Checks a No answer for `system` independently of the solver.
pub fn verify_infeasible(system: &MaxFreeConstraintSystem, cert: &MotzkinCertificate) -> bool {
    verify(&LinearSystem::from_lp(&system.lp), cert)
}

fn optimum(sys: &MaxFreeConstraintSystem) -> Q {
    match sys.lp.solve() {
        LpResult::Optimal { value, .. } => value,
        other => unreachable!("threshold LP is feasible and bounded: {other:?}"),
    }
}

/// Best term on lifted points, with a feasible solution of that term's
/// max-free system at the returned value (the layout [`build_constraints`] uses).
pub fn value_with_proof(lifted: &[Vec<Q>], nf: &NormalForm) -> (Q, usize, Vec<Q>) {
    let mut best: Option<(Q, usize, Vec<Q>)> = None;
    for (i, t) in nf.terms.iter().enumerate() {
        let sys = build(t, &Generators::Points(lifted), None);
        let LpResult::Optimal { mut x, value } = sys.lp.solve() else {
            unreachable!("threshold LP is feasible and bounded")
        };
        x.pop();
        if best.as_ref().is_none_or(|b| value > b.0) {
            best = Some((value, i, x));
        }
    }
    best.expect("normal form has terms")
}

/// Value of one max-free term on `CONV(points)` (extended coordinates).
pub fn term_value(term: &MaxFreeTerm, points: &[Vec<Q>]) -> Q {
    optimum(&build(term, &Generators::Points(points), None))
}

/// `f(CONV(points))` for points in the source space of `nf`.
pub fn value_of_point_set(points: &[Vec<Q>], nf: &NormalForm) -> Q {
    assert!(!points.is_empty(), "value of an empty point set");
    let lifted: Vec<Vec<Q>> = points.iter().map(|p| nf.lift(p)).collect();
    value_of_lifted(&lifted, nf)
}

/// As [`value_of_point_set`] for points already in extended coordinates.
pub fn value_of_lifted(lifted: &[Vec<Q>], nf: &NormalForm) -> Q {
    nf.terms
        .iter()
        .map(|t| term_value(t, lifted))
        .reduce(|a, b| if b > a { b } else { a })
        .expect("normal form has terms")
}

/// Value of `nf` on the strongly connected edge set `edges` of `g`, via
/// normalized circulations instead of cycle enumeration.
pub fn scc_value(g: &GameGraph, edges: &[usize], nf: &NormalForm) -> Q {
    let heads: Vec<(usize, usize)> = edges.iter().map(|e| (g.edge(*e).from, g.edge(*e).to)).collect();
    let weights: Vec<Vec<Q>> = edges.iter().map(|e| nf.lift(&g.edge(*e).weight)).collect();
    let gens = Generators::Flow { heads: &heads, weights: &weights };
    nf.terms
        .iter()
        .map(|t| optimum(&build(t, &gens, None)))
        .reduce(|a, b| if b > a { b } else { a })
        .expect("normal form has terms")
}

/// Value of a one-player graph for the player who has the choices (or of
/// the unique play when nobody has one): the best component value over the
/// nontrivial components reachable from the initial vertex.
pub fn solve(g: &GameGraph, nf: &NormalForm) -> Result<Q> {
    g.chooser()?;
    if nf.source_k > g.k() {
        return Err(Error::DimensionOutOfRange { dim: nf.source_k, k: g.k() });
    }
    let mut comp = vec![usize::MAX; g.num_vertices()];
    let sccs = reachable_sccs(g);
    for (i, s) in sccs.iter().enumerate() {
        s.vertices.iter().for_each(|v| comp[*v] = i);
    }
    let mut best: Option<Q> = None;
    for (i, s) in sccs.iter().enumerate().filter(|(_, s)| s.nontrivial) {
        let edges: Vec<usize> = s
            .vertices
            .iter()
            .flat_map(|v| g.out_edges(*v).iter().copied())
            .filter(|e| comp[g.edge(*e).to] == i)
            .collect();
        let v = scc_value(g, &edges, nf);
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("a finite graph with out-degree >= 1 reaches a cycle"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{li, ls, max, min, Expression};
    use crate::graph::{GraphBuilder, Owner};
    use crate::rational::{frac, q};

    fn pt(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|x| q(*x)).collect()
    }

    fn example3() -> GameGraph {
        let mut b = GraphBuilder::new(2);
        let v = b.vertex("v", Owner::P1);
        b.edge(v, v, pt(&[9, 1]));
        b.edge(v, v, pt(&[1, 9]));
        b.finish(v).unwrap()
    }

    #[test]
    fn maximizer_takes_the_best_loop() {
        let nf = max(vec![li(1), li(2)]).normalize(2).unwrap();
        assert_eq!(solve(&example3(), &nf).unwrap(), q(9));
        assert_eq!(value_of_point_set(&[pt(&[9, 1]), pt(&[1, 9])], &nf), q(9));
    }

    #[test]
    fn min_of_atoms_mixes() {
        let nf = min(vec![li(1), li(2)]).normalize(2).unwrap();
        assert_eq!(value_of_point_set(&[pt(&[9, 1]), pt(&[1, 9])], &nf), q(5));
        assert_eq!(solve(&example3(), &nf).unwrap(), q(5));
    }

    #[test]
    fn limsup_atoms_mix_independently() {
        // Two lim-sup atoms can each be driven to their best point.
        let nf = min(vec![ls(1), ls(2)]).normalize(2).unwrap();
        assert_eq!(value_of_point_set(&[pt(&[9, 1]), pt(&[1, 9])], &nf), q(9));
        // A lim-inf atom pins the mixing shared with each lim-sup row.
        let nf = min(vec![li(1), ls(2)]).normalize(2).unwrap();
        assert_eq!(value_of_point_set(&[pt(&[9, 1]), pt(&[1, 9])], &nf), q(5));
    }

    #[test]
    fn single_point_is_pointwise() {
        let e = Expression::parse("(sum (li 1) (min (li 2) (neg (li 3))))").unwrap();
        let nf = e.normalize(3).unwrap();
        assert_eq!(value_of_point_set(&[pt(&[1, 2, 6])], &nf), q(-5));
    }

    #[test]
    fn shared_mixing_structure() {
        let nf = min(vec![li(1), ls(2)]).normalize(2).unwrap();
        let sys = build_constraints(&nf.terms[0], &[pt(&[1, 1])], &q(0));
        assert_eq!(sys.mixing.len(), 1);
        let nf = min(vec![ls(1), ls(2), li(3)]).normalize(3).unwrap();
        let sys = build_constraints(&nf.terms[0], &[pt(&[1, 1, 1]), pt(&[0, 0, 0])], &q(0));
        assert_eq!(sys.mixing.len(), 2);
        assert_eq!(sys.r.len(), 3);
    }

    #[test]
    fn infeasible_threshold_has_certificate() {
        let nf = li(1).normalize(1).unwrap();
        let pts = [pt(&[3]), pt(&[-1])];
        let sys = build_constraints(&nf.terms[0], &pts, &frac(7, 2));
        match feasible(&sys) {
            Answer::No(c) => assert!(verify_infeasible(&sys, &c)),
            Answer::Yes(_) => panic!("threshold above every point"),
        }
        let sys = build_constraints(&nf.terms[0], &pts, &q(3));
        assert!(matches!(feasible(&sys), Answer::Yes(_)));
    }

    #[test]
    fn lasso_value() {
        let mut b = GraphBuilder::new(1);
        let a = b.vertex("a", Owner::P1);
        let c = b.vertex("c", Owner::P1);
        b.edge(a, c, pt(&[100]));
        b.edge(c, c, pt(&[3]));
        let g = b.finish(a).unwrap();
        assert_eq!(solve(&g, &li(1).normalize(1).unwrap()).unwrap(), q(3));
    }
}
