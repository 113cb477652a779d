//! Lower-bound certificates for the finite-memory infimum, and their checker.
//!
//! A bound is proved in one of two ways (the stronger one counts):
//! - floor: for one factor, every choice of one linear form per term has a
//!   Motzkin certificate that no mixture of one option brings all chosen
//!   forms below the bound;
//! - partition: the product of mixture simplices is cut by recorded
//!   bisections, and on each leaf the coordinate-wise minimum of the lifted
//!   vertex images (the corner point) admits a feasible max-free system at
//!   the leaf bound. The value is monotone in the lifted coordinates, so the
//!   corner value bounds the whole leaf.

use num_traits::{One, Zero};
use serde::Serialize;

use super::families::{factors, Factor};
use crate::certificate::{verify, LinearSystem, MotzkinCertificate, RowKind};
use crate::expr::{min_of_sums, LinearForm, NormalForm};
use crate::graph::GameGraph;
use crate::oneplayer::build_constraints;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Split {
    pub factor: usize,
    pub a: usize,
    pub b: usize,
    /// 0 keeps vertex `b` and moves `a` to the midpoint, 1 the other way round.
    pub side: u8,
}

/// Feasible solution of the max-free system of `term` at the leaf bound.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafProof {
    pub term: usize,
    pub solution: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub path: Vec<Split>,
    pub bound: Q,
    pub proof: LeafProof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComboCertificate {
    /// Option chosen for every factor.
    pub combo: Vec<usize>,
    pub leaves: Vec<Leaf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCertificate {
    pub combos: Vec<ComboCertificate>,
}

impl PartitionCertificate {
    pub fn bound(&self) -> Option<Q> {
        self.combos.iter().flat_map(|c| c.leaves.iter().map(|l| l.bound.clone())).min()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRefutation {
    pub option: usize,
    pub selection: Vec<usize>,
    pub certificate: MotzkinCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloorCertificate {
    pub factor: usize,
    pub bound: Q,
    pub refutations: Vec<SelectionRefutation>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LowerBoundCertificate {
    pub floor: Option<FloorCertificate>,
    pub partition: Option<PartitionCertificate>,
}

impl LowerBoundCertificate {
    /// The proved bound: the larger of the two parts.
    pub fn bound(&self) -> Option<Q> {
        let f = self.floor.as_ref().map(|f| f.bound.clone());
        let p = self.partition.as_ref().and_then(PartitionCertificate::bound);
        match (f, p) {
            (Some(a), Some(b)) => Some(if a > b { a } else { b }),
            (a, b) => a.or(b),
        }
    }
}

/// Linear forms of every term, in term order.
pub fn term_forms(nf: &NormalForm) -> Vec<Vec<LinearForm>> {
    nf.terms.iter().map(min_of_sums).collect()
}

/// Every way to pick one form per term, in odometer order.
pub fn selections(forms: &[Vec<LinearForm>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for f in forms {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..f.len()).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

fn form_on(form: &LinearForm, p: &[Q]) -> Q {
    form.iter().map(|(d, c)| &p[*d - 1] * Q::from_integer((*c).into())).sum()
}

/// Variables `(z, x_1..x_n)`: `z < bound`, `f_T · lift(A x) ≤ z` for the
/// selected form of every term, `x ≥ 0`, `Σx = 1`. Infeasible iff every
/// mixture keeps some selected form at or above `bound`.
pub fn selection_system(forms: &[Vec<LinearForm>], lifted: &[Vec<Q>], selection: &[usize], bound: &Q) -> LinearSystem {
    let n = lifted.len();
    let mut sys = LinearSystem::new(n + 1);
    sys.push(vec![(0, Q::one())], RowKind::Lt, bound.clone());
    for (t, &s) in selection.iter().enumerate() {
        let form = &forms[t][s];
        let mut row: Vec<(usize, Q)> = vec![(0, -Q::one())];
        for (j, p) in lifted.iter().enumerate() {
            let c = form_on(form, p);
            if !c.is_zero() {
                row.push((j + 1, c));
            }
        }
        sys.push(row, RowKind::Le, Q::zero());
    }
    for j in 0..n {
        sys.push(vec![(j + 1, -Q::one())], RowKind::Le, Q::zero());
    }
    sys.push((1..=n).map(|j| (j, Q::one())).collect(), RowKind::Eq, Q::one());
    sys
}

/// Lifted image of a mixture.
pub fn image(lifted: &[Vec<Q>], mixing: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); lifted[0].len()];
    for (p, x) in lifted.iter().zip(mixing) {
        if x.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(p) {
            *o += x * c;
        }
    }
    out
}

/// Coordinate-wise minimum of the images of the simplex vertices.
pub fn corner(lifted: &[Vec<Q>], vertices: &[Vec<Q>]) -> Vec<Q> {
    let mut it = vertices.iter().map(|v| image(lifted, v));
    let mut out = it.next().expect("simplex has a vertex");
    for img in it {
        for (o, c) in out.iter_mut().zip(img) {
            if c < *o {
                *o = c;
            }
        }
    }
    out
}

pub fn unit_simplex(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn bisect(vertices: &[Vec<Q>], a: usize, b: usize, side: u8) -> Vec<Vec<Q>> {
    let two = Q::from_integer(2.into());
    let mid: Vec<Q> = vertices[a].iter().zip(&vertices[b]).map(|(x, y)| (x + y) / &two).collect();
    let mut out = vertices.to_vec();
    out[if side == 0 { a } else { b }] = mid;
    out
}

/// Checks a lower-bound certificate for `g` against a fresh extraction of
/// its factors. Returns the proved bound, or `None` if anything fails.
pub fn verify_lower_bound(g: &GameGraph, nf: &NormalForm, cert: &LowerBoundCertificate, budget: usize) -> Option<Q> {
    let fs = factors(g, nf, budget).ok()?;
    let forms = term_forms(nf);
    if let Some(floor) = &cert.floor {
        if !check_floor(&fs, &forms, floor) {
            return None;
        }
    }
    if let Some(part) = &cert.partition {
        if !check_partition(&fs, nf, part) {
            return None;
        }
    }
    cert.bound()
}

fn check_floor(fs: &[Factor], forms: &[Vec<LinearForm>], floor: &FloorCertificate) -> bool {
    let Some(factor) = fs.get(floor.factor) else { return false };
    let sels = selections(forms);
    let mut expected: Vec<(usize, Vec<usize>)> = Vec::new();
    for o in 0..factor.options.len() {
        for s in &sels {
            expected.push((o, s.clone()));
        }
    }
    if expected.len() != floor.refutations.len() {
        return false;
    }
    expected.iter().zip(&floor.refutations).all(|((o, s), r)| {
        r.option == *o
            && r.selection == *s
            && verify(&selection_system(forms, &factor.options[*o].lifted, s, &floor.bound), &r.certificate)
    })
}

fn check_partition(fs: &[Factor], nf: &NormalForm, part: &PartitionCertificate) -> bool {
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
    }
    let mut given: Vec<&Vec<usize>> = part.combos.iter().map(|c| &c.combo).collect();
    given.sort();
    let mut want: Vec<&Vec<usize>> = combos.iter().collect();
    want.sort();
    if given != want {
        return false;
    }
    part.combos.iter().all(|cc| {
        let leaves: Vec<&Leaf> = cc.leaves.iter().collect();
        let roots: Vec<Vec<Vec<Q>>> = fs
            .iter()
            .zip(&cc.combo)
            .map(|(f, o)| unit_simplex(f.options[*o].cycles.len()))
            .collect();
        check_tree(fs, nf, &cc.combo, &leaves, 0, roots)
    })
}

fn check_tree(
    fs: &[Factor],
    nf: &NormalForm,
    combo: &[usize],
    leaves: &[&Leaf],
    depth: usize,
    simplices: Vec<Vec<Vec<Q>>>,
) -> bool {
    if leaves.is_empty() {
        return false;
    }
    if leaves.len() == 1 && leaves[0].path.len() == depth {
        let leaf = leaves[0];
        let corners: Vec<Vec<Q>> = fs
            .iter()
            .zip(combo)
            .zip(&simplices)
            .map(|((f, o), s)| corner(&f.options[*o].lifted, s))
            .collect();
        let Some(term) = nf.terms.get(leaf.proof.term) else { return false };
        let sys = build_constraints(term, &corners, &leaf.bound);
        return sys.lp.satisfied_by(&leaf.proof.solution);
    }
    if leaves.iter().any(|l| l.path.len() <= depth || l.path[depth].side > 1) {
        return false;
    }
    let first = &leaves[0].path[depth];
    if leaves.iter().any(|l| {
        let s = &l.path[depth];
        (s.factor, s.a, s.b) != (first.factor, first.a, first.b)
    }) {
        return false;
    }
    let simplex = &simplices[first.factor];
    if first.a >= simplex.len() || first.b >= simplex.len() || first.a == first.b {
        return false;
    }
    (0..2u8).all(|side| {
        let part: Vec<&Leaf> = leaves.iter().copied().filter(|l| l.path[depth].side == side).collect();
        let mut next = simplices.clone();
        next[first.factor] = bisect(simplex, first.a, first.b, side);
        check_tree(fs, nf, combo, &part, depth + 1, next)
    })
}
