//! From rational constraint systems to games: the chain of normal forms
//! that ends in separate linear constraints on two variable families
//! coupled by bilinear equations, the five-vertex game built from such a
//! system, and the vector lemma the game relies on.

mod chain;
mod vector;

use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expr::{li, max, min, Expression};
use crate::graph::{GameGraph, GraphBuilder, Owner};
use crate::rational::{fmt_q, parse_q, q, Q};
use crate::twoplayer::Witness;

pub use chain::{
    decompose_monomials, extend_half_sum_solution, extend_products_solution, normalize_hq, reduce_chain, split_equalities, to_half_sums,
    HalfSumSystem, Monomial, Polynomial, ProductSystem, Stage,
};
pub use vector::{vector_lemma_check, VectorLemmaReport};

/// Linear row `Σ coeff · var ≤ 0` over 1-based variable indices.
pub type Row = Vec<(usize, Q)>;

/// Linear constraints on `q` and on `p` separately, and equations
/// `q_i p_j = q_k p_l`; solutions must be strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem5 {
    pub n: usize,
    pub q_rows: Vec<Row>,
    pub p_rows: Vec<Row>,
    pub bilinear: Vec<[usize; 4]>,
}

impl ConstraintSystem5 {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Input("constraint system needs at least one variable".into()));
        }
        let bad = |i: usize| i == 0 || i > self.n;
        for row in self.q_rows.iter().chain(&self.p_rows) {
            if let Some((i, _)) = row.iter().find(|(i, _)| bad(*i)) {
                return Err(Error::Input(format!("variable index {i} outside 1..{}", self.n)));
            }
        }
        if let Some(b) = self.bilinear.iter().find(|b| b.iter().any(|i| bad(*i))) {
            return Err(Error::Input(format!("bilinear equation {b:?} has an index outside 1..{}", self.n)));
        }
        Ok(())
    }

    /// Exact check of a candidate solution (0-based vectors of length `n`).
    pub fn satisfied_by(&self, qv: &[Q], pv: &[Q]) -> bool {
        let row = |r: &Row, x: &[Q]| r.iter().map(|(i, c)| c * &x[*i - 1]).sum::<Q>() <= Q::zero();
        qv.len() == self.n
            && pv.len() == self.n
            && qv.iter().chain(pv).all(Q::is_positive)
            && self.q_rows.iter().all(|r| row(r, qv))
            && self.p_rows.iter().all(|r| row(r, pv))
            && self.bilinear.iter().all(|[i, j, k, l]| &qv[i - 1] * &pv[j - 1] == &qv[k - 1] * &pv[l - 1])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("constraint file: {e}")))?;
        let field = |name: &str| v.get(name).ok_or_else(|| Error::Parse(format!("constraint file: missing field `{name}`")));
        let n = index(field("n")?, "n")?;
        let rows = |name: &str| -> Result<Vec<Row>> {
            let Some(list) = v.get(name) else { return Ok(Vec::new()) };
            let list = list.as_array().ok_or_else(|| Error::Parse(format!("constraint file: `{name}` must be a list")))?;
            list.iter()
                .map(|r| {
                    let r = r.as_array().ok_or_else(|| Error::Parse(format!("constraint file: row of `{name}` must be a list")))?;
                    r.iter()
                        .map(|pair| match pair.as_array().map(Vec::as_slice) {
                            Some([c, i]) => Ok((index(i, name)?, scalar(c, name)?)),
                            _ => Err(Error::Parse(format!("constraint file: `{name}` entries are [coefficient, variable] pairs"))),
                        })
                        .collect()
                })
                .collect()
        };
        let bilinear = match v.get("bilinear") {
            None => Vec::new(),
            Some(b) => b
                .as_array()
                .ok_or_else(|| Error::Parse("constraint file: `bilinear` must be a list".into()))?
                .iter()
                .map(|e| match e.as_array().map(Vec::as_slice) {
                    Some([a, b, c, d]) => Ok([index(a, "bilinear")?, index(b, "bilinear")?, index(c, "bilinear")?, index(d, "bilinear")?]),
                    _ => Err(Error::Parse("constraint file: `bilinear` entries are [i, j, k, l]".into())),
                })
                .collect::<Result<_>>()?,
        };
        let sys = ConstraintSystem5 { n, q_rows: rows("q_rows")?, p_rows: rows("p_rows")?, bilinear };
        sys.validate()?;
        Ok(sys)
    }

    pub fn to_json(&self) -> String {
        let rows = |rs: &[Row]| -> Value {
            rs.iter()
                .map(|r| Value::from(r.iter().map(|(i, c)| Value::from(vec![Value::from(fmt_q(c)), Value::from(i.to_string())])).collect::<Vec<Value>>()))
                .collect()
        };
        let v = serde_json::json!({
            "n": self.n,
            "q_rows": rows(&self.q_rows),
            "p_rows": rows(&self.p_rows),
            "bilinear": self.bilinear,
        });
        serde_json::to_string_pretty(&v).expect("json value")
    }
}

fn index(v: &Value, field: &str) -> Result<usize> {
    let bad = || Error::Parse(format!("constraint file: `{field}` needs a nonnegative integer, got {v}"));
    match v {
        Value::Number(n) => n.as_u64().map(|x| x as usize).ok_or_else(bad),
        Value::String(s) => s.trim().parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn scalar(v: &Value, field: &str) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => parse_q(&n.to_string()),
        _ => Err(Error::Parse(format!("constraint file: `{field}` coefficient must be a rational string"))),
    }
}

/// The game built from a constraint system, with the edges needed to read
/// a solution back from a witness.
#[derive(Debug, Clone)]
pub struct ReductionGame {
    pub graph: GameGraph,
    pub expression: Expression,
    pub nu: Q,
    /// Self-loops of `a2`, one per `q` variable.
    pub q_loops: Vec<usize>,
    /// Self-loops of `b2`, one per `p` variable.
    pub p_loops: Vec<usize>,
}

/// Five vertices: player 2 at `s0` picks the `a` side (carrying `q`) or the
/// `b` side (carrying `p`). Player 1 stays below zero iff the system has a
/// positive rational solution. Dimensions: two balance coordinates, one
/// visit coordinate per variable, one per linear row (the shorter of the
/// two row lists is padded with zero rows), four per bilinear equation.
pub fn constraints_to_game(sys: &ConstraintSystem5) -> Result<ReductionGame> {
    sys.validate()?;
    let n = sys.n;
    let t1 = sys.q_rows.len().max(sys.p_rows.len());
    let t2 = sys.bilinear.len();
    let k = 2 + n + t1 + 4 * t2;
    let zero = || vec![Q::zero(); k];
    let mut b = GraphBuilder::new(k);
    let s0 = b.vertex("s0", Owner::P2);
    let a1 = b.vertex("a1", Owner::P1);
    let a2 = b.vertex("a2", Owner::P1);
    let b1 = b.vertex("b1", Owner::P1);
    let b2 = b.vertex("b2", Owner::P1);
    let mut entry = zero();
    (0..n).for_each(|i| entry[2 + i] = Q::one());
    let mut stay = zero();
    stay[0] = Q::one();
    stay[1] = -Q::one();

    let loop_weight = |i: usize, rows: &[Row], q_side: bool| -> Vec<Q> {
        let mut w = zero();
        w[0] = -Q::one();
        w[1] = Q::one();
        w[2 + i - 1] = -Q::one();
        for (j, r) in rows.iter().enumerate() {
            w[2 + n + j] = r.iter().filter(|(v, _)| *v == i).map(|(_, c)| c.clone()).sum();
        }
        for (j, [m, r, kk, l]) in sys.bilinear.iter().enumerate() {
            let base = 2 + n + t1 + 4 * j;
            let mut add = |pattern: [i64; 4]| {
                for (d, c) in pattern.iter().enumerate() {
                    w[base + d] += q(*c);
                }
            };
            if q_side {
                if i == *m {
                    add([-1, 0, 1, 0]);
                }
                if i == *kk {
                    add([0, 1, 0, -1]);
                }
            } else {
                if i == *l {
                    add([1, 0, -1, 0]);
                }
                if i == *r {
                    add([0, -1, 0, 1]);
                }
            }
        }
        w
    };

    b.edge(s0, a1, entry.clone());
    b.edge(a1, a1, stay.clone());
    b.edge(a1, a2, zero());
    let q_loops: Vec<usize> = (1..=n).map(|i| b.edge(a2, a2, loop_weight(i, &sys.q_rows, true))).collect();
    b.edge(a2, s0, zero());
    b.edge(s0, b1, entry);
    b.edge(b1, b1, stay);
    b.edge(b1, b2, zero());
    let p_loops: Vec<usize> = (1..=n).map(|i| b.edge(b2, b2, loop_weight(i, &sys.p_rows, false))).collect();
    b.edge(b2, s0, zero());
    let graph = b.finish(s0)?;

    let mut terms: Vec<Expression> = (1..=2 + n + t1).map(li).collect();
    for j in 0..t2 {
        let base = 2 + n + t1 + 4 * j;
        terms.push(min(vec![li(base + 1), li(base + 2)]));
        terms.push(min(vec![li(base + 3), li(base + 4)]));
    }
    Ok(ReductionGame { graph, expression: max(terms), nu: Q::zero(), q_loops, p_loops })
}

/// Candidate solution from a witness: each variable is the weight its
/// self-loop carries in the mixture of its side.
pub fn read_back(game: &ReductionGame, witness: &Witness) -> Option<(Vec<Q>, Vec<Q>)> {
    let side = |loops: &[usize]| -> Option<Vec<Q>> {
        witness.families.iter().find_map(|f| {
            loops
                .iter()
                .map(|e| f.cycles.iter().position(|c| c == &vec![*e]).map(|i| f.mixing[i].clone()))
                .collect::<Option<Vec<Q>>>()
        })
    };
    Some((side(&game.q_loops)?, side(&game.p_loops)?))
}
