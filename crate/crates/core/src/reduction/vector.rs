//! The four-vector lemma behind bilinear equations: with
//! `x(m, n) = m(α₁(−1,0,1,0) + α₂(0,1,0,−1)) + n(β₁(1,0,−1,0) + β₂(0,−1,0,1))`,
//! `MAX(MIN(x₁,x₂), MIN(x₃,x₄)) ≤ 0` for all `m, n ≥ 0` iff `β₁/α₁ = β₂/α₂`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{frac, Q};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorLemmaReport {
    pub equal_ratios: bool,
    /// Pairs `(m, n)` checked.
    pub samples: usize,
    /// Whether every checked pair kept the value nonpositive.
    pub holds_on_samples: bool,
    /// For unequal ratios: `(m, n)` and the point where the value is positive.
    pub violator: Option<(Q, Q, [Q; 4])>,
}

pub fn point(alpha: [&Q; 2], beta: [&Q; 2], m: &Q, n: &Q) -> [Q; 4] {
    let x1 = -(m * alpha[0]) + n * beta[0];
    let x2 = m * alpha[1] - n * beta[1];
    [x1.clone(), x2.clone(), -x1, -x2]
}

pub fn condition(x: &[Q; 4]) -> bool {
    let a = x[0].clone().min(x[1].clone());
    let b = x[2].clone().min(x[3].clone());
    a.max(b) <= Q::zero()
}

/// Next element of the Calkin–Wilf enumeration of the positive rationals.
fn calkin_wilf(r: &Q) -> Q {
    Q::one() / (Q::from_integer(2 * r.floor().to_integer()) - r + Q::one())
}

/// Checks the condition on `samples` pairs (the two axes, then every
/// positive ratio in Calkin–Wilf order) and, when the ratios differ, builds
/// the violating pair with `m/n` halfway between them.
pub fn vector_lemma_check(a1: &Q, a2: &Q, b1: &Q, b2: &Q, samples: usize) -> Result<VectorLemmaReport> {
    if [a1, a2, b1, b2].iter().any(|v| !v.is_positive()) {
        return Err(Error::Precondition("vector lemma needs strictly positive inputs".into()));
    }
    let alpha = [a1, a2];
    let beta = [b1, b2];
    let mut pairs: Vec<(Q, Q)> = vec![(Q::one(), Q::zero()), (Q::zero(), Q::one())];
    let mut r = Q::one();
    while pairs.len() < samples {
        pairs.push((Q::from_integer(r.numer().clone()), Q::from_integer(r.denom().clone())));
        r = calkin_wilf(&r);
    }
    pairs.truncate(samples);
    let holds_on_samples = pairs.iter().all(|(m, n)| condition(&point(alpha, beta, m, n)));
    let r1 = b1 / a1;
    let r2 = b2 / a2;
    let violator = (r1 != r2).then(|| {
        let k = (&r1 + &r2) * frac(1, 2);
        let x = point(alpha, beta, &k, &Q::one());
        (k, Q::one(), x)
    });
    Ok(VectorLemmaReport { equal_ratios: r1 == r2, samples: pairs.len(), holds_on_samples, violator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn equal_ratios_hold() {
        let r = vector_lemma_check(&q(1), &q(1), &q(2), &q(2), 1000).unwrap();
        assert!(r.equal_ratios && r.holds_on_samples && r.violator.is_none());
        assert_eq!(r.samples, 1000);
    }

    #[test]
    fn unequal_ratios_violate_between() {
        let r = vector_lemma_check(&q(1), &q(1), &q(2), &q(3), 10).unwrap();
        let (m, n, x) = r.violator.unwrap();
        assert_eq!(m / n, frac(5, 2));
        assert!(!condition(&x));
        assert!(x[2].is_positive() && x[3].is_positive());
    }

    #[test]
    fn axes_are_sign_checks() {
        let x = point([&q(1), &q(1)], [&q(2), &q(3)], &q(1), &q(0));
        assert_eq!(x, [q(-1), q(1), q(1), q(-1)]);
        assert!(condition(&x));
    }

    #[test]
    fn calkin_wilf_starts_right() {
        let mut r = q(1);
        let mut seen = Vec::new();
        for _ in 0..5 {
            seen.push(r.clone());
            r = calkin_wilf(&r);
        }
        assert_eq!(seen, vec![q(1), frac(1, 2), q(2), frac(1, 3), frac(3, 2)]);
    }
}
