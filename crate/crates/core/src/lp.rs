//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex over [`Q`] with Bland's pivoting rule, so
//! it terminates on degenerate problems and never rounds. The problems the
//! solver builds are small (tens of rows), which keeps the dense tableau cheap.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Q)>,
    pub cmp: Cmp,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LpResult {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpResult::Infeasible)
    }
}

/// `maximize objective · x` subject to the constraints. Variables are free
/// unless declared non-negative.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    nonneg: Vec<bool>,
    pub constraints: Vec<Constraint>,
    objective: Vec<(usize, Q)>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.nonneg.len()
    }

    pub fn add_var(&mut self, nonneg: bool) -> usize {
        self.nonneg.push(nonneg);
        self.nonneg.len() - 1
    }

    pub fn add_vars(&mut self, n: usize, nonneg: bool) -> Vec<usize> {
        (0..n).map(|_| self.add_var(nonneg)).collect()
    }

    pub fn is_nonneg(&self, var: usize) -> bool {
        self.nonneg[var]
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Q)>, cmp: Cmp, rhs: Q) {
        debug_assert!(coeffs.iter().all(|(v, _)| *v < self.nonneg.len()));
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn set_objective(&mut self, objective: Vec<(usize, Q)>) {
        self.objective = objective;
    }

    pub fn solve(&self) -> LpResult {
        Tableau::build(self).run()
    }

    /// Checks `x` against every constraint and sign restriction exactly.
    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        if x.len() != self.nonneg.len() {
            return false;
        }
        if self.nonneg.iter().zip(x).any(|(nn, v)| *nn && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs: Q = c.coeffs.iter().map(|(v, a)| a * &x[*v]).sum();
            match c.cmp {
                Cmp::Le => lhs <= c.rhs,
                Cmp::Ge => lhs >= c.rhs,
                Cmp::Eq => lhs == c.rhs,
            }
        })
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    ncols: usize,
    artificial_from: usize,
    /// Column(s) carrying each original variable: (positive part, negative part).
    var_cols: Vec<(usize, Option<usize>)>,
    cost: Vec<Q>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut var_cols = Vec::with_capacity(lp.nonneg.len());
        let mut ncols = 0;
        for &nn in &lp.nonneg {
            if nn {
                var_cols.push((ncols, None));
                ncols += 1;
            } else {
                var_cols.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
        let structural = ncols;
        let slack_count = lp.constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
        let slack_from = ncols;
        ncols += slack_count;
        let artificial_from = ncols;

        // Row orientation: make every right-hand side non-negative.
        let mut oriented = Vec::with_capacity(lp.constraints.len());
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let cmp = match (c.cmp, flip) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (cmp, _) => cmp,
            };
            oriented.push((c, flip, cmp));
        }
        let art_count = oriented.iter().filter(|(_, _, cmp)| *cmp != Cmp::Le).count();
        ncols += art_count;

        let mut rows = Vec::with_capacity(oriented.len());
        let mut basis = Vec::with_capacity(oriented.len());
        let mut slack = slack_from;
        let mut art = artificial_from;
        for (c, flip, cmp) in oriented {
            let mut row = vec![Q::zero(); ncols + 1];
            let sign = if flip { -Q::one() } else { Q::one() };
            for (v, a) in &c.coeffs {
                let (p, n) = var_cols[*v];
                row[p] += &sign * a;
                if let Some(n) = n {
                    row[n] -= &sign * a;
                }
            }
            row[ncols] = &sign * &c.rhs;
            match cmp {
                Cmp::Le => {
                    row[slack] = Q::one();
                    basis.push(slack);
                    slack += 1;
                }
                Cmp::Ge => {
                    row[slack] = -Q::one();
                    slack += 1;
                    row[art] = Q::one();
                    basis.push(art);
                    art += 1;
                }
                Cmp::Eq => {
                    row[art] = Q::one();
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }

        let mut cost = vec![Q::zero(); ncols];
        for (v, a) in &lp.objective {
            let (p, n) = var_cols[*v];
            cost[p] += a;
            if let Some(n) = n {
                cost[n] -= a;
            }
        }
        debug_assert!(structural <= slack_from);
        Tableau { rows, basis, ncols, artificial_from, var_cols, cost }
    }

    fn reduced_costs(&self, cost: &[Q], allowed: usize) -> Vec<Q> {
        let mut obj = vec![Q::zero(); self.ncols + 1];
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    obj[j] += cb * a;
                }
            }
        }
        for j in 0..allowed {
            obj[j] -= &cost[j];
        }
        obj
    }

    fn pivot(&mut self, obj: &mut [Q], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a /= &p;
                }
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (a, b) in row.iter_mut().zip(&prow) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (a, b) in obj.iter_mut().zip(&prow) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule simplex over columns `< allowed`. Returns false when unbounded.
    fn optimize(&mut self, obj: &mut [Q], allowed: usize) -> bool {
        let rhs = self.ncols;
        loop {
            let Some(enter) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(obj, r, enter),
            }
        }
    }

    fn run(mut self) -> LpResult {
        let rhs = self.ncols;
        if self.artificial_from < self.ncols {
            let mut phase1 = vec![Q::zero(); self.ncols];
            for c in phase1.iter_mut().skip(self.artificial_from) {
                *c = -Q::one();
            }
            let mut obj = self.reduced_costs(&phase1, self.ncols);
            self.optimize(&mut obj, self.ncols);
            if obj[rhs].is_negative() {
                return LpResult::Infeasible;
            }
            // Drive zero-level artificials out of the basis; drop redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => {
                            self.pivot(&mut obj, i, j);
                            i += 1;
                        }
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        let allowed = self.artificial_from;
        let cost = self.cost.clone();
        let mut obj = self.reduced_costs(&cost, allowed);
        if !self.optimize(&mut obj, allowed) {
            return LpResult::Unbounded;
        }
        let mut col_val = vec![Q::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            col_val[b] = self.rows[i][rhs].clone();
        }
        let x: Vec<Q> = self
            .var_cols
            .iter()
            .map(|&(p, n)| match n {
                Some(n) => &col_val[p] - &col_val[n],
                None => col_val[p].clone(),
            })
            .collect();
        LpResult::Optimal { x, value: obj[rhs].clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn small_maximization() {
        // max 3x + 2y st x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new();
        let x = lp.add_var(true);
        let y = lp.add_var(true);
        lp.add_constraint(vec![(x, q(1)), (y, q(1))], Cmp::Le, q(4));
        lp.add_constraint(vec![(x, q(1)), (y, q(3))], Cmp::Le, q(6));
        lp.add_constraint(vec![(x, q(1))], Cmp::Le, q(3));
        lp.set_objective(vec![(x, q(3)), (y, q(2))]);
        match lp.solve() {
            LpResult::Optimal { x: sol, value } => {
                assert_eq!(value, q(11));
                assert_eq!(sol, vec![q(3), q(1)]);
                assert!(lp.satisfied_by(&sol));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_variables_and_equalities() {
        // max -t st t >= x - 1/2, t >= 1/2 - x, x = 1/3 (free t, x)
        let mut lp = LinearProgram::new();
        let t = lp.add_var(false);
        let x = lp.add_var(false);
        lp.add_constraint(vec![(t, q(1)), (x, q(-1))], Cmp::Ge, frac(-1, 2));
        lp.add_constraint(vec![(t, q(1)), (x, q(1))], Cmp::Ge, frac(1, 2));
        lp.add_constraint(vec![(x, q(1))], Cmp::Eq, frac(1, 3));
        lp.set_objective(vec![(t, q(-1))]);
        match lp.solve() {
            LpResult::Optimal { value, x: sol } => {
                assert_eq!(value, frac(-1, 6));
                assert_eq!(sol[1], frac(1, 3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(true);
        lp.add_constraint(vec![(x, q(1))], Cmp::Le, q(-1));
        assert_eq!(lp.solve(), LpResult::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(false);
        lp.add_constraint(vec![(x, q(1))], Cmp::Ge, q(0));
        lp.set_objective(vec![(x, q(1))]);
        assert_eq!(lp.solve(), LpResult::Unbounded);
    }

    #[test]
    fn degenerate_redundant_rows() {
        // x + y = 1 stated twice, x - y = 0
        let mut lp = LinearProgram::new();
        let x = lp.add_var(true);
        let y = lp.add_var(true);
        for _ in 0..2 {
            lp.add_constraint(vec![(x, q(1)), (y, q(1))], Cmp::Eq, q(1));
        }
        lp.add_constraint(vec![(x, q(1)), (y, q(-1))], Cmp::Eq, q(0));
        lp.set_objective(vec![(x, q(1))]);
        match lp.solve() {
            LpResult::Optimal { value, .. } => assert_eq!(value, frac(1, 2)),
            other => panic!("{other:?}"),
        }
    }
}
