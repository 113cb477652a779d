//! Linear systems with weak, strict and equality rows, and Motzkin
//! infeasibility certificates for them.
//!
//! A system `A x ≤ b, C x < d, E x = f` has no solution exactly when there are
//! multipliers `y ≥ 0, z ≥ 0, u` with `Aᵀy + Cᵀz + Eᵀu = 0` and either
//! `b·y + d·z + f·u < 0`, or `z ≠ 0` and `b·y + d·z + f·u ≤ 0`.
//! [`verify`] checks such multipliers with nothing but exact arithmetic.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lp::{Cmp, LinearProgram, LpResult};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Le,
    Lt,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(with = "coeff_list")]
    pub coeffs: Vec<(usize, Q)>,
    pub kind: RowKind,
    #[serde(with = "crate::rational::serde_q")]
    pub rhs: Q,
}

impl Row {
    pub fn eval(&self, x: &[Q]) -> Q {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let lhs = self.eval(x);
        match self.kind {
            RowKind::Le => lhs <= self.rhs,
            RowKind::Lt => lhs < self.rhs,
            RowKind::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub rows: Vec<Row>,
}

/// One multiplier per row of the system it refutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotzkinCertificate {
    #[serde(with = "crate::rational::serde_q::vec")]
    pub multipliers: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Q>),
    Infeasible(MotzkinCertificate),
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem { num_vars, rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<(usize, Q)>, kind: RowKind, rhs: Q) {
        self.rows.push(Row { coeffs, kind, rhs });
    }

    /// Every constraint of `lp` as `≤`/`=` rows, plus `-x ≤ 0` for each
    /// non-negative variable. The objective is ignored.
    pub fn from_lp(lp: &LinearProgram) -> Self {
        let mut sys = LinearSystem::new(lp.num_vars());
        for c in &lp.constraints {
            match c.cmp {
                Cmp::Le => sys.push(c.coeffs.clone(), RowKind::Le, c.rhs.clone()),
                Cmp::Eq => sys.push(c.coeffs.clone(), RowKind::Eq, c.rhs.clone()),
                Cmp::Ge => sys.push(
                    c.coeffs.iter().map(|(j, a)| (*j, -a)).collect(),
                    RowKind::Le,
                    -c.rhs.clone(),
                ),
            }
        }
        for j in 0..lp.num_vars() {
            if lp.is_nonneg(j) {
                sys.push(vec![(j, -Q::one())], RowKind::Le, Q::zero());
            }
        }
        sys
    }

    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        x.len() == self.num_vars && self.rows.iter().all(|r| r.holds(x))
    }

    /// Decides the system exactly, returning a solution or a certificate.
    pub fn decide(&self) -> Feasibility {
        let has_strict = self.rows.iter().any(|r| r.kind == RowKind::Lt);
        let mut lp = LinearProgram::new();
        let x = lp.add_vars(self.num_vars, false);
        let t = has_strict.then(|| lp.add_var(false));
        for r in &self.rows {
            let mut coeffs: Vec<(usize, Q)> = r.coeffs.iter().map(|(j, a)| (x[*j], a.clone())).collect();
            match r.kind {
                RowKind::Le => lp.add_constraint(coeffs, Cmp::Le, r.rhs.clone()),
                RowKind::Eq => lp.add_constraint(coeffs, Cmp::Eq, r.rhs.clone()),
                RowKind::Lt => {
                    coeffs.push((t.unwrap(), Q::one()));
                    lp.add_constraint(coeffs, Cmp::Le, r.rhs.clone());
                }
            }
        }
        if let Some(t) = t {
            lp.add_constraint(vec![(t, Q::one())], Cmp::Le, Q::one());
            lp.set_objective(vec![(t, Q::one())]);
        }
        match lp.solve() {
            LpResult::Optimal { x: sol, value } if t.is_none() || value.is_positive() => {
                Feasibility::Feasible(sol[..self.num_vars].to_vec())
            }
            _ => Feasibility::Infeasible(
                self.find_certificate().expect("alternative theorem guarantees a certificate"),
            ),
        }
    }

    /// Searches for Motzkin multipliers; `None` means the system is feasible.
    pub fn find_certificate(&self) -> Option<MotzkinCertificate> {
        let build = |strict_branch: bool| {
            let mut lp = LinearProgram::new();
            let y: Vec<usize> = self.rows.iter().map(|r| lp.add_var(r.kind != RowKind::Eq)).collect();
            let mut cols: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
            for (i, r) in self.rows.iter().enumerate() {
                for (j, a) in &r.coeffs {
                    cols.entry(*j).or_default().push((y[i], a.clone()));
                }
            }
            for (_, col) in cols {
                lp.add_constraint(col, Cmp::Eq, Q::zero());
            }
            let by: Vec<(usize, Q)> = self.rows.iter().enumerate().map(|(i, r)| (y[i], r.rhs.clone())).collect();
            if strict_branch {
                lp.add_constraint(by, Cmp::Le, Q::zero());
                let strict: Vec<(usize, Q)> = self
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.kind == RowKind::Lt)
                    .map(|(i, _)| (y[i], Q::one()))
                    .collect();
                lp.add_constraint(strict, Cmp::Eq, Q::one());
            } else {
                lp.add_constraint(by, Cmp::Eq, -Q::one());
            }
            lp
        };
        let attempt = |lp: LinearProgram| match lp.solve() {
            LpResult::Optimal { x, .. } => Some(MotzkinCertificate { multipliers: x }),
            _ => None,
        };
        attempt(build(false)).or_else(|| {
            self.rows
                .iter()
                .any(|r| r.kind == RowKind::Lt)
                .then(|| attempt(build(true)))
                .flatten()
        })
    }
}

/// Exact check that `cert` proves `sys` has no solution.
pub fn verify(sys: &LinearSystem, cert: &MotzkinCertificate) -> bool {
    let y = &cert.multipliers;
    if y.len() != sys.rows.len() {
        return false;
    }
    let mut combo = vec![Q::zero(); sys.num_vars];
    let mut rhs = Q::zero();
    let mut strict_used = false;
    for (r, m) in sys.rows.iter().zip(y) {
        if r.kind != RowKind::Eq && m.is_negative() {
            return false;
        }
        if r.kind == RowKind::Lt && m.is_positive() {
            strict_used = true;
        }
        for (j, a) in &r.coeffs {
            if *j >= sys.num_vars {
                return false;
            }
            combo[*j] += m * a;
        }
        rhs += m * &r.rhs;
    }
    combo.iter().all(Zero::is_zero) && (rhs.is_negative() || (strict_used && !rhs.is_positive()))
}

mod coeff_list {
    //! Sparse coefficient lists serialized as `[[index, "p/q"], ...]`.
    use super::Q;
    use crate::rational::{fmt_q, parse_q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(usize, Q)], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<(usize, String)> = v.iter().map(|(j, a)| (*j, fmt_q(a))).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(usize, Q)>, D::Error> {
        let raw = Vec::<(usize, String)>::deserialize(d)?;
        raw.into_iter()
            .map(|(j, a)| parse_q(&a).map(|a| (j, a)).map_err(D::Error::custom))
            .collect()
    }
}
