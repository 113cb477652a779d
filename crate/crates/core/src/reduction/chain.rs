//! The normal-form chain. Each step maps a system to the next form so that
//! solvability is preserved under that form's side conditions:
//!
//! 1. `P(x) = 0` over the rationals.
//! 2. `q0 · D(q/q0) = 0` with `1 ≤ q0 ≤ q_i`.
//! 3. one linear equation plus products `x_a x_b = x_c x_d`, `1 ≤ x_0 ≤ x_i`.
//! 4. linear equations on `q`, bilinear `q_i p_j = q_k p_l`, half-sum
//!    equations, `1 ≤ q_1 ≤ q_i`, `p_i ≥ 1`, `Σq = Σp`.
//! 5. [`ConstraintSystem5`]: only `≤ 0` rows and bilinear equations.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{ConstraintSystem5, Row};
use crate::rational::{frac, Q};

/// `coeff · Π x_i^{exps[i]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Q,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub vars: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|m| m.exps.iter().zip(x).fold(m.coeff.clone(), |acc, (e, v)| acc * num_traits::pow(v.clone(), *e as usize)))
            .sum()
    }

    /// `q0 · P(q/q0)` at `(q0, q_1..q_n)`.
    pub fn eval_homogenized(&self, q0: &Q, qs: &[Q]) -> Q {
        let x: Vec<Q> = qs.iter().map(|v| v / q0).collect();
        q0 * self.eval(&x)
    }
}

/// Products `x_a x_b = x_c x_d` (0-based) and at most one linear equation;
/// variable 0 is the normalizer `q0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSystem {
    pub vars: usize,
    pub linear: Option<Row>,
    pub products: Vec<[usize; 4]>,
}

impl ProductSystem {
    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        x.len() == self.vars
            && x[0] >= Q::one()
            && x.iter().all(|v| *v >= x[0])
            && self.linear.as_ref().is_none_or(|r| r.iter().map(|(i, c)| c * &x[*i]).sum::<Q>().is_zero())
            && self.products.iter().all(|[a, b, c, d]| &x[*a] * &x[*b] == &x[*c] * &x[*d])
    }
}

/// Variables `q_1..q_n`, `p_1..p_n` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSumSystem {
    pub n: usize,
    /// `Σ α q = 0`.
    pub linear: Vec<Row>,
    pub bilinear: Vec<[usize; 4]>,
    /// `q_i = ½ Σ_j q_j`.
    pub q_half: Vec<usize>,
    /// `p_i = ½ Σ_j p_j`.
    pub p_half: Vec<usize>,
}

impl HalfSumSystem {
    pub fn satisfied_by(&self, qv: &[Q], pv: &[Q]) -> bool {
        let half = |x: &[Q]| x.iter().sum::<Q>() / Q::from_integer(2.into());
        qv.len() == self.n
            && pv.len() == self.n
            && qv.iter().all(|v| *v >= qv[0] && *v >= Q::one())
            && pv.iter().all(|v| *v >= Q::one())
            && qv.iter().sum::<Q>() == pv.iter().sum::<Q>()
            && self.linear.iter().all(|r| r.iter().map(|(i, c)| c * &qv[*i - 1]).sum::<Q>().is_zero())
            && self.bilinear.iter().all(|[i, j, k, l]| &qv[i - 1] * &pv[j - 1] == &qv[k - 1] * &pv[l - 1])
            && self.q_half.iter().all(|i| qv[i - 1] == half(qv))
            && self.p_half.iter().all(|i| pv[i - 1] == half(pv))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Rational(Polynomial),
    Normalized(Polynomial),
    Products(ProductSystem),
    HalfSums(HalfSumSystem),
    Final(ConstraintSystem5),
}

/// Rational roots of `P` ↔ roots of `D(y) = P(y_1 − y_2, …)` with `y ≥ 1`;
/// the homogenized `D` then carries the normalizer.
pub fn normalize_hq(p: &Polynomial) -> Polynomial {
    // Expand every (y_{2i-1} − y_{2i})^e binomially.
    let mut acc: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    for m in &p.terms {
        let mut parts: Vec<(Vec<u32>, Q)> = vec![(vec![0; 2 * p.vars], m.coeff.clone())];
        for (i, &e) in m.exps.iter().enumerate() {
            let mut next = Vec::new();
            for (exps, c) in &parts {
                for a in 0..=e {
                    let mut ex = exps.clone();
                    ex[2 * i] += a;
                    ex[2 * i + 1] += e - a;
                    let sign = if (e - a) % 2 == 0 { Q::one() } else { -Q::one() };
                    next.push((ex, c * sign * Q::from_integer(binomial(e, a).into())));
                }
            }
            parts = next;
        }
        for (ex, c) in parts {
            *acc.entry(ex).or_insert_with(Q::zero) += c;
        }
    }
    Polynomial {
        vars: 2 * p.vars,
        terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(exps, coeff)| Monomial { coeff, exps }).collect(),
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k as i64).fold(1, |acc, i| acc * (n as i64 - i) / (i + 1))
}

/// `q0 · D(q/q0) = 0` as products and one linear equation. Variables are
/// `q0, q_1..q_n`, then new ones: first the powers `q_i^e / q0^{e-1}` of
/// every variable in index order (`q0²/q0` when there is a constant term),
/// then per monomial the running product of its power variables followed
/// by its linear factors. Shared prefixes are reused.
pub fn decompose_monomials(d: &Polynomial) -> ProductSystem {
    let mut vars = d.vars + 1;
    let mut products: Vec<[usize; 4]> = Vec::new();
    let mut fresh = |products: &mut Vec<[usize; 4]>, a: usize, b: usize| {
        let v = vars;
        vars += 1;
        products.push([v, 0, a, b]);
        v
    };
    let mut power: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    if d.terms.iter().any(|m| m.exps.iter().all(|e| *e == 0)) {
        let v = fresh(&mut products, 0, 0);
        power.insert((0, 2), v);
    }
    for i in 0..d.vars {
        let top = d.terms.iter().map(|m| m.exps[i]).max().unwrap_or(0);
        let x = i + 1;
        let mut prev = x;
        for e in 2..=top {
            prev = fresh(&mut products, prev, x);
            power.insert((x, e), prev);
        }
    }
    let mut combined: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut linear: Row = Vec::new();
    for m in &d.terms {
        let mut factors: Vec<usize> = Vec::new();
        let mut singles: Vec<usize> = Vec::new();
        for (i, &e) in m.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => singles.push(i + 1),
                _ => factors.push(power[&(i + 1, e)]),
            }
        }
        factors.extend(singles);
        let Some((&first, rest)) = factors.split_first() else {
            linear.push((0, m.coeff.clone()));
            continue;
        };
        let mut acc = first;
        for &f in rest {
            acc = match combined.get(&(acc, f)) {
                Some(v) => *v,
                None => {
                    let v = fresh(&mut products, acc, f);
                    combined.insert((acc, f), v);
                    v
                }
            };
        }
        linear.push((acc, m.coeff.clone()));
    }
    ProductSystem { vars, linear: Some(linear), products }
}

/// Values of the new variables of [`decompose_monomials`] from `q0, q_1..q_n`.
pub fn extend_products_solution(sys: &ProductSystem, base: &[Q]) -> Vec<Q> {
    let mut x = base.to_vec();
    x.resize(sys.vars, Q::zero());
    for [v, z, a, b] in &sys.products {
        x[*v] = &x[*a] * &x[*b] / &x[*z];
    }
    x
}

/// Half-sum coupling. `q` holds the `x` variables, one padding variable and
/// the half-sum variable `q_n`; `p` holds two variables per product, slack,
/// and the half-sum variable `p_n`. With `Σq = Σp` the half sums force
/// `q_n = p_n`, and a product `x_a x_b = x_c x_d` becomes
/// `q_b p_n = q_n p_u`, `q_d p_n = q_n p_w`, `q_a p_u = q_c p_w`.
pub fn to_half_sums(sys: &ProductSystem) -> HalfSumSystem {
    let e = sys.products.len();
    let n = (sys.vars + 2).max(2 * e + 2);
    let mut bilinear = Vec::new();
    for (j, [a, b, c, d]) in sys.products.iter().enumerate() {
        let (u, w) = (2 * j + 1, 2 * j + 2);
        bilinear.push([b + 1, n, n, u]);
        bilinear.push([d + 1, n, n, w]);
        bilinear.push([a + 1, u, c + 1, w]);
    }
    let linear = sys.linear.iter().map(|r| r.iter().map(|(i, c)| (i + 1, c.clone())).collect()).collect();
    HalfSumSystem { n, linear, bilinear, q_half: vec![n], p_half: vec![n] }
}

/// Solution of [`to_half_sums`] from a solution `x` of the product system.
pub fn extend_half_sum_solution(sys: &ProductSystem, hs: &HalfSumSystem, x: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let n = hs.n;
    let e = sys.products.len();
    let mut p = vec![Q::zero(); n];
    for (j, [_, b, _, d]) in sys.products.iter().enumerate() {
        p[2 * j] = x[*b].clone();
        p[2 * j + 1] = x[*d].clone();
    }
    let paired: Q = p.iter().sum();
    let slack = n - 1 - 2 * e;
    let pads = n - 1 - sys.vars;
    // Pad q so that the slack p's can take at least 1 each.
    let xs: Q = x.iter().sum();
    let need = &paired + Q::from_integer((slack as i64).into()) - &xs;
    let pad = {
        let share = need / Q::from_integer((pads as i64).into());
        if share > x[0] { share } else { x[0].clone() }
    };
    let mut q: Vec<Q> = x.to_vec();
    q.extend(std::iter::repeat_n(pad, pads));
    let qsum: Q = q.iter().sum();
    let each = (&qsum - &paired) / Q::from_integer((slack as i64).into());
    for v in p.iter_mut().skip(2 * e).take(slack) {
        *v = each.clone();
    }
    q.push(qsum.clone());
    p[n - 1] = qsum;
    (q, p)
}

fn half_rows(n: usize, i: usize) -> [Row; 2] {
    let up: Row = (1..=n).map(|j| (j, if j == i { frac(-1, 2) } else { frac(1, 2) })).collect();
    let down = up.iter().map(|(j, c)| (*j, -c)).collect();
    [up, down]
}

/// Equalities become pairs of `≤` rows, half sums likewise, and
/// `q_1 ≤ q_i` is added for every `i`. The bounds `≥ 1` and `Σq = Σp` are
/// dropped: both families can be rescaled independently.
pub fn split_equalities(hs: &HalfSumSystem) -> ConstraintSystem5 {
    let mut q_rows: Vec<Row> = Vec::new();
    for r in &hs.linear {
        q_rows.push(r.clone());
        q_rows.push(r.iter().map(|(i, c)| (*i, -c)).collect());
    }
    for &i in &hs.q_half {
        q_rows.extend(half_rows(hs.n, i));
    }
    for i in 1..=hs.n {
        q_rows.push(if i == 1 { Vec::new() } else { vec![(1, Q::one()), (i, -Q::one())] });
    }
    let p_rows = hs.p_half.iter().flat_map(|i| half_rows(hs.n, *i)).collect();
    ConstraintSystem5 { n: hs.n, q_rows, p_rows, bilinear: hs.bilinear.clone() }
}

/// Runs the remaining steps from any stage.
pub fn reduce_chain(stage: Stage) -> ConstraintSystem5 {
    match stage {
        Stage::Rational(p) => reduce_chain(Stage::Normalized(normalize_hq(&p))),
        Stage::Normalized(d) => reduce_chain(Stage::Products(decompose_monomials(&d))),
        Stage::Products(s) => reduce_chain(Stage::HalfSums(to_half_sums(&s))),
        Stage::HalfSums(h) => split_equalities(&h),
        Stage::Final(s) => s,
    }
}
