//! Mean-payoff expressions: syntax, evaluation on ultimately periodic plays,
//! and the normal form (a MAX of max-free terms) the solvers work with.

mod normal;
mod parse;

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{q_max, q_min, Q};

pub use normal::{eval_form, min_of_sums, LinearForm, MaxFreeTerm, NormalForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKind {
    LimInf,
    LimSup,
}

impl AtomKind {
    pub fn flip(self) -> Self {
        match self {
            AtomKind::LimInf => AtomKind::LimSup,
            AtomKind::LimSup => AtomKind::LimInf,
        }
    }
}

/// Expression tree. Atom dimensions are 1-based; `Min`, `Max` and `Sum` take
/// two or more children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Atom(AtomKind, usize),
    Neg(Box<Expression>),
    Min(Vec<Expression>),
    Max(Vec<Expression>),
    Sum(Vec<Expression>),
}

pub fn li(dim: usize) -> Expression {
    Expression::Atom(AtomKind::LimInf, dim)
}

pub fn ls(dim: usize) -> Expression {
    Expression::Atom(AtomKind::LimSup, dim)
}

pub fn neg(e: Expression) -> Expression {
    Expression::Neg(Box::new(e))
}

pub fn min(children: Vec<Expression>) -> Expression {
    Expression::Min(children)
}

pub fn max(children: Vec<Expression>) -> Expression {
    Expression::Max(children)
}

pub fn sum(children: Vec<Expression>) -> Expression {
    Expression::Sum(children)
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self> {
        parse::parse(text)
    }

    pub fn max_dim(&self) -> usize {
        match self {
            Expression::Atom(_, d) => *d,
            Expression::Neg(c) => c.max_dim(),
            Expression::Min(cs) | Expression::Max(cs) | Expression::Sum(cs) => {
                cs.iter().map(Expression::max_dim).max().unwrap_or(0)
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Expression::Atom(..) => 1,
            Expression::Neg(c) => c.atom_count(),
            Expression::Min(cs) | Expression::Max(cs) | Expression::Sum(cs) => {
                cs.iter().map(Expression::atom_count).sum()
            }
        }
    }

    pub fn has_limsup(&self) -> bool {
        match self {
            Expression::Atom(kind, _) => *kind == AtomKind::LimSup,
            Expression::Neg(c) => c.has_limsup(),
            Expression::Min(cs) | Expression::Max(cs) | Expression::Sum(cs) => cs.iter().any(Expression::has_limsup),
        }
    }

    /// Checks structural well-formedness and that every atom fits in `k` dimensions.
    pub fn validate(&self, k: usize) -> Result<()> {
        match self {
            Expression::Atom(_, d) => {
                if *d == 0 || *d > k {
                    return Err(Error::DimensionOutOfRange { dim: *d, k });
                }
                Ok(())
            }
            Expression::Neg(c) => c.validate(k),
            Expression::Min(cs) | Expression::Max(cs) | Expression::Sum(cs) => {
                if cs.len() < 2 {
                    return Err(Error::Input(format!("operator needs at least two operands: {self}")));
                }
                cs.iter().try_for_each(|c| c.validate(k))
            }
        }
    }

    /// Value when every lim-inf and lim-sup average equals `avg` (0-based slice).
    pub fn eval_at(&self, avg: &[Q]) -> Q {
        match self {
            Expression::Atom(_, d) => avg[*d - 1].clone(),
            Expression::Neg(c) => -c.eval_at(avg),
            Expression::Min(cs) => fold(cs, avg, q_min),
            Expression::Max(cs) => fold(cs, avg, q_max),
            Expression::Sum(cs) => cs.iter().map(|c| c.eval_at(avg)).sum(),
        }
    }

    /// Replaces every lim-sup atom by the lim-inf atom of the same dimension.
    pub fn liminf_only_rewrite(&self) -> Expression {
        match self {
            Expression::Atom(_, d) => li(*d),
            Expression::Neg(c) => neg(c.liminf_only_rewrite()),
            Expression::Min(cs) => min(cs.iter().map(Expression::liminf_only_rewrite).collect()),
            Expression::Max(cs) => max(cs.iter().map(Expression::liminf_only_rewrite).collect()),
            Expression::Sum(cs) => sum(cs.iter().map(Expression::liminf_only_rewrite).collect()),
        }
    }

    pub fn normalize(&self, k: usize) -> Result<NormalForm> {
        self.validate(k)?;
        Ok(normal::normalize(self, k))
    }
}

fn fold(cs: &[Expression], avg: &[Q], op: fn(&Q, &Q) -> Q) -> Q {
    let mut it = cs.iter().map(|c| c.eval_at(avg));
    let first = it.next().expect("operators have children");
    it.fold(first, |a, b| op(&a, &b))
}

/// Per-dimension average of a nonempty sequence of equal-length vectors.
pub fn average(vectors: &[Vec<Q>]) -> Vec<Q> {
    let k = vectors[0].len();
    let mut acc = vec![Q::zero(); k];
    for v in vectors {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    let n = Q::from_integer(vectors.len().into());
    acc.into_iter().map(|a| a / &n).collect()
}

/// Value of `expr` on the play `prefix · cycle^ω`. Both lim-inf and lim-sup
/// averages of such a play are the cycle average, so the prefix is irrelevant.
pub fn evaluate_periodic(expr: &Expression, prefix: &[Vec<Q>], cycle: &[Vec<Q>]) -> Result<Q> {
    let Some(first) = cycle.first() else {
        return Err(Error::Input("cycle must be nonempty".into()));
    };
    let k = first.len();
    if cycle.iter().chain(prefix).any(|v| v.len() != k) {
        return Err(Error::Input("play vectors differ in dimension".into()));
    }
    expr.validate(k)?;
    Ok(expr.eval_at(&average(cycle)))
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, cs: &[Expression]| {
            write!(f, "({name}")?;
            for c in cs {
                write!(f, " {c}")?;
            }
            write!(f, ")")
        };
        match self {
            Expression::Atom(AtomKind::LimInf, d) => write!(f, "(li {d})"),
            Expression::Atom(AtomKind::LimSup, d) => write!(f, "(ls {d})"),
            Expression::Neg(c) => write!(f, "(neg {c})"),
            Expression::Min(cs) => list(f, "min", cs),
            Expression::Max(cs) => list(f, "max", cs),
            Expression::Sum(cs) => list(f, "sum", cs),
        }
    }
}

impl std::str::FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse::parse(s)
    }
}
