//! Exact convex geometry on V-represented polytopes, backed by LP feasibility.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpResult};
use crate::rational::Q;

/// Convex hull of finitely many rational points of equal dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    points: Vec<Vec<Q>>,
}

impl Polytope {
    pub fn new(points: Vec<Vec<Q>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Input("polytope needs at least one point".into()));
        };
        let k = first.len();
        if points.iter().any(|p| p.len() != k) {
            return Err(Error::Input("polytope points differ in dimension".into()));
        }
        Ok(Polytope { points })
    }

    pub fn points(&self) -> &[Vec<Q>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Convex coefficients expressing `p` over the generators, if `p` is in the hull.
pub fn member(p: &[Q], poly: &Polytope) -> Option<Vec<Q>> {
    assert_eq!(p.len(), poly.dim(), "dimension mismatch");
    let mut lp = LinearProgram::new();
    let a = lp.add_vars(poly.points.len(), true);
    lp.add_constraint(a.iter().map(|i| (*i, Q::one())).collect(), Cmp::Eq, Q::one());
    for (d, target) in p.iter().enumerate() {
        let row = a.iter().zip(&poly.points).filter(|(_, g)| !g[d].is_zero()).map(|(i, g)| (*i, g[d].clone())).collect();
        lp.add_constraint(row, Cmp::Eq, target.clone());
    }
    match lp.solve() {
        LpResult::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

pub fn contained(inner: &Polytope, outer: &Polytope) -> bool {
    inner.points.iter().all(|p| member(p, outer).is_some())
}

/// A common point of both hulls, if any.
pub fn intersects(a: &Polytope, b: &Polytope) -> Option<Vec<Q>> {
    assert_eq!(a.dim(), b.dim(), "dimension mismatch");
    let mut lp = LinearProgram::new();
    let x = lp.add_vars(a.points.len(), true);
    let y = lp.add_vars(b.points.len(), true);
    lp.add_constraint(x.iter().map(|i| (*i, Q::one())).collect(), Cmp::Eq, Q::one());
    lp.add_constraint(y.iter().map(|i| (*i, Q::one())).collect(), Cmp::Eq, Q::one());
    for d in 0..a.dim() {
        let mut row: Vec<(usize, Q)> = x.iter().zip(&a.points).map(|(i, p)| (*i, p[d].clone())).collect();
        row.extend(y.iter().zip(&b.points).map(|(i, p)| (*i, -p[d].clone())));
        row.retain(|(_, c)| !c.is_zero());
        lp.add_constraint(row, Cmp::Eq, Q::zero());
    }
    match lp.solve() {
        LpResult::Optimal { x: sol, .. } => Some(combine(&a.points, &sol[..a.points.len()])),
        _ => None,
    }
}

/// `Σ coeffs[i] · points[i]`.
pub fn combine(points: &[Vec<Q>], coeffs: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); points[0].len()];
    for (p, c) in points.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(p) {
            *o += c * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn pts(xs: &[(i64, i64)]) -> Polytope {
        Polytope::new(xs.iter().map(|(a, b)| vec![q(*a), q(*b)]).collect()).unwrap()
    }

    #[test]
    fn generators_and_midpoints_are_members() {
        let p = pts(&[(0, 0), (2, 0)]);
        assert_eq!(member(&[q(0), q(0)], &p), Some(vec![q(1), q(0)]));
        assert_eq!(member(&[q(1), q(0)], &p), Some(vec![frac(1, 2), frac(1, 2)]));
        assert_eq!(member(&[q(1), q(1)], &p), None);
    }

    #[test]
    fn containment() {
        let seg = pts(&[(1, 0), (-1, 0)]);
        assert!(contained(&seg, &seg));
        assert!(contained(&pts(&[(0, 0)]), &seg));
        assert!(!contained(&pts(&[(0, 1)]), &seg));
    }

    #[test]
    fn segments_of_example_four_do_not_meet() {
        let ab = pts(&[(-3, -2), (-2, -1)]);
        let de = pts(&[(1, 3), (2, 1)]);
        assert!(intersects(&ab, &de).is_none());
        let d1 = pts(&[(0, 0), (2, 2)]);
        let d2 = pts(&[(0, 2), (2, 0)]);
        assert_eq!(intersects(&d1, &d2), Some(vec![q(1), q(1)]));
        assert!(intersects(&d1, &pts(&[(2, 2), (5, 5)])).is_some());
    }
}
