//! Normal form: negation folded into the weights, one fresh dimension per
//! atom occurrence, and MAX pulled to the root.

use std::fmt;

use num_traits::Zero;

use super::{AtomKind, Expression};
use crate::rational::{q_min, Q};

/// A max-free term over the dimensions of the extended weight function
/// (1-based, like source atoms).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MaxFreeTerm {
    Atom(AtomKind, usize),
    Min(Vec<MaxFreeTerm>),
    Sum(Vec<MaxFreeTerm>),
}

/// Sparse non-negative integer combination of atom values, sorted by dimension.
pub type LinearForm = Vec<(usize, u32)>;

impl MaxFreeTerm {
    pub fn atoms(&self) -> Vec<(AtomKind, usize)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<(AtomKind, usize)>) {
        match self {
            MaxFreeTerm::Atom(kind, d) => out.push((*kind, *d)),
            MaxFreeTerm::Min(cs) | MaxFreeTerm::Sum(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Value when every atom of dimension `d` takes `r[d - 1]`.
    pub fn eval(&self, r: &[Q]) -> Q {
        match self {
            MaxFreeTerm::Atom(_, d) => r[*d - 1].clone(),
            MaxFreeTerm::Min(cs) => {
                let mut it = cs.iter().map(|c| c.eval(r));
                let first = it.next().expect("min has children");
                it.fold(first, |a, b| q_min(&a, &b))
            }
            MaxFreeTerm::Sum(cs) => cs.iter().map(|c| c.eval(r)).sum(),
        }
    }
}

/// Distributes Sum over Min: `term(r) = min over forms of form · r`.
pub fn min_of_sums(term: &MaxFreeTerm) -> Vec<LinearForm> {
    match term {
        MaxFreeTerm::Atom(_, d) => vec![vec![(*d, 1)]],
        MaxFreeTerm::Min(cs) => {
            let mut out: Vec<LinearForm> = Vec::new();
            for c in cs {
                for f in min_of_sums(c) {
                    if !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
            out
        }
        MaxFreeTerm::Sum(cs) => {
            let mut acc: Vec<LinearForm> = vec![Vec::new()];
            for c in cs {
                let parts = min_of_sums(c);
                let mut next = Vec::with_capacity(acc.len() * parts.len());
                for a in &acc {
                    for p in &parts {
                        let f = add_forms(a, p);
                        if !next.contains(&f) {
                            next.push(f);
                        }
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

fn add_forms(a: &LinearForm, b: &LinearForm) -> LinearForm {
    let mut out = a.clone();
    for (d, c) in b {
        match out.binary_search_by_key(d, |(x, _)| *x) {
            Ok(i) => out[i].1 += c,
            Err(i) => out.insert(i, (*d, *c)),
        }
    }
    out
}

pub fn eval_form(form: &LinearForm, r: &[Q]) -> Q {
    form.iter().fold(Q::zero(), |acc, (d, c)| acc + &r[*d - 1] * Q::from_integer((*c).into()))
}

/// `MAX` of max-free terms over an extended weight function. Dimension `j`
/// (1-based) of the extension is `sign · w[source]` where
/// `dimension_map[j - 1] = (source, sign)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub terms: Vec<MaxFreeTerm>,
    pub dimension_map: Vec<(usize, i8)>,
    pub source_k: usize,
}

impl NormalForm {
    pub fn dims(&self) -> usize {
        self.dimension_map.len()
    }

    /// Maps a source weight vector into the extended space.
    pub fn lift(&self, w: &[Q]) -> Vec<Q> {
        self.dimension_map
            .iter()
            .map(|(src, sign)| if *sign < 0 { -w[*src - 1].clone() } else { w[*src - 1].clone() })
            .collect()
    }

    /// Value on a play whose averages converge to `avg` (source space).
    pub fn eval_at(&self, avg: &[Q]) -> Q {
        let r = self.lift(avg);
        self.terms
            .iter()
            .map(|t| t.eval(&r))
            .reduce(|a, b| if b > a { b } else { a })
            .expect("normal form has at least one term")
    }

    /// Number of atom occurrences, the Lipschitz constant of the value in
    /// the sup-norm of the source space.
    pub fn lipschitz(&self) -> usize {
        self.dims()
    }
}

/// Expression with negation already pushed into the atoms.
enum Signed {
    Atom(AtomKind, usize, i8),
    Min(Vec<Signed>),
    Max(Vec<Signed>),
    Sum(Vec<Signed>),
}

fn push_negation(e: &Expression, negate: bool) -> Signed {
    match e {
        Expression::Atom(kind, d) if negate => Signed::Atom(kind.flip(), *d, -1),
        Expression::Atom(kind, d) => Signed::Atom(*kind, *d, 1),
        Expression::Neg(c) => push_negation(c, !negate),
        Expression::Min(cs) | Expression::Max(cs) => {
            let children = cs.iter().map(|c| push_negation(c, negate)).collect();
            if matches!(e, Expression::Min(_)) != negate {
                Signed::Min(children)
            } else {
                Signed::Max(children)
            }
        }
        Expression::Sum(cs) => Signed::Sum(cs.iter().map(|c| push_negation(c, negate)).collect()),
    }
}

fn distribute(e: &Signed, map: &mut Vec<(usize, i8)>) -> Vec<MaxFreeTerm> {
    match e {
        Signed::Atom(kind, src, sign) => {
            map.push((*src, *sign));
            vec![MaxFreeTerm::Atom(*kind, map.len())]
        }
        Signed::Max(cs) => cs.iter().flat_map(|c| distribute(c, map)).collect(),
        Signed::Min(cs) | Signed::Sum(cs) => {
            let is_min = matches!(e, Signed::Min(_));
            let parts: Vec<Vec<MaxFreeTerm>> = cs.iter().map(|c| distribute(c, map)).collect();
            let mut combos: Vec<Vec<MaxFreeTerm>> = vec![Vec::new()];
            for choices in &parts {
                combos = combos
                    .iter()
                    .flat_map(|prefix| {
                        choices.iter().map(move |t| {
                            let mut next = prefix.clone();
                            next.push(t.clone());
                            next
                        })
                    })
                    .collect();
            }
            combos
                .into_iter()
                .map(|children| if is_min { MaxFreeTerm::Min(children) } else { MaxFreeTerm::Sum(children) })
                .collect()
        }
    }
}

pub(super) fn normalize(e: &Expression, k: usize) -> NormalForm {
    let mut dimension_map = Vec::new();
    let terms = distribute(&push_negation(e, false), &mut dimension_map);
    NormalForm { terms, dimension_map, source_k: k }
}

impl fmt::Display for MaxFreeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxFreeTerm::Atom(AtomKind::LimInf, d) => write!(f, "(li {d})"),
            MaxFreeTerm::Atom(AtomKind::LimSup, d) => write!(f, "(ls {d})"),
            MaxFreeTerm::Min(cs) | MaxFreeTerm::Sum(cs) => {
                write!(f, "({}", if matches!(self, MaxFreeTerm::Min(_)) { "min" } else { "sum" })?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}
