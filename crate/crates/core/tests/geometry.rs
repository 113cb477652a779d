use num_traits::{Signed, Zero};
use proptest::prelude::*;

use mpgame::geometry::{combine, contained, intersects, member, Polytope};
use mpgame::rational::{frac, q, Q};

type P = (Q, Q);

fn arb_p() -> impl Strategy<Value = P> {
    ((-16i64..=16, 1i64..=8), (-16i64..=16, 1i64..=8)).prop_map(|((a, b), (c, d))| (frac(a, b), frac(c, d)))
}

fn poly(ps: &[P]) -> Polytope {
    Polytope::new(ps.iter().map(|(x, y)| vec![x.clone(), y.clone()]).collect()).unwrap()
}

fn cross(o: &P, a: &P, b: &P) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn on_segment(p: &P, a: &P, b: &P) -> bool {
    cross(a, b, p).is_zero()
        && p.0 >= a.0.clone().min(b.0.clone())
        && p.0 <= a.0.clone().max(b.0.clone())
        && p.1 >= a.1.clone().min(b.1.clone())
        && p.1 <= a.1.clone().max(b.1.clone())
}

fn in_triangle(p: &P, a: &P, b: &P, c: &P) -> bool {
    let s = [cross(a, b, p), cross(b, c, p), cross(c, a, p)];
    s.iter().all(|x| !x.is_negative()) || s.iter().all(|x| !x.is_positive())
}

/// Planar hull membership: by Carathéodory, `p` lies in a triangle (possibly
/// degenerate) spanned by three generators.
fn oracle_member(p: &P, gens: &[P]) -> bool {
    let n = gens.len();
    for i in 0..n {
        for j in i..n {
            if on_segment(p, &gens[i], &gens[j]) {
                return true;
            }
            for k in j + 1..n {
                if !cross(&gens[i], &gens[j], &gens[k]).is_zero() && in_triangle(p, &gens[i], &gens[j], &gens[k]) {
                    return true;
                }
            }
        }
    }
    false
}

fn segments_meet(a: &P, b: &P, c: &P, d: &P) -> bool {
    let (d1, d2) = (cross(a, b, c), cross(a, b, d));
    let (d3, d4) = (cross(c, d, a), cross(c, d, b));
    let opposite = |x: &Q, y: &Q| (x.is_positive() && y.is_negative()) || (x.is_negative() && y.is_positive());
    (opposite(&d1, &d2) && opposite(&d3, &d4))
        || on_segment(c, a, b)
        || on_segment(d, a, b)
        || on_segment(a, c, d)
        || on_segment(b, c, d)
}

/// Two planar convex hulls meet iff a generator of one lies in the other or
/// two generator segments cross.
fn oracle_intersects(a: &[P], b: &[P]) -> bool {
    if a.iter().any(|p| oracle_member(p, b)) || b.iter().any(|p| oracle_member(p, a)) {
        return true;
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            for k in 0..b.len() {
                for l in k + 1..b.len() {
                    if segments_meet(&a[i], &a[j], &b[k], &b[l]) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn pt(x: i64, y: i64) -> P {
    (q(x), q(y))
}

#[test]
fn example_four_segments_are_disjoint() {
    let (a, b, d, e) = (pt(-3, -2), pt(-2, -1), pt(1, 3), pt(2, 1));
    assert!(!segments_meet(&a, &b, &d, &e));
    assert!(intersects(&poly(&[a, b]), &poly(&[d, e])).is_none());
}

#[test]
fn square_diagonals_cross_inside() {
    let w = intersects(&poly(&[pt(0, 0), pt(2, 2)]), &poly(&[pt(0, 2), pt(2, 0)])).unwrap();
    assert_eq!(w, vec![q(1), q(1)]);
}

#[test]
fn midpoint_has_half_coefficients() {
    let c = member(&[q(1), q(1)], &poly(&[pt(0, 0), pt(2, 2)])).unwrap();
    assert_eq!(c, vec![frac(1, 2), frac(1, 2)]);
    assert!(contained(&poly(&[pt(0, 0)]), &poly(&[pt(1, 0), pt(-1, 0)])));
}

#[test]
fn figure_four_hull_is_the_pentagon() {
    // Coordinates as drawn: A..G.
    let (a, b, c, d) = (pt(6, 6), pt(12, 20), pt(18, 10), pt(24, 20));
    let (e, f, g) = (pt(36, 14), pt(30, 8), pt(40, -1));
    let pentagon = poly(&[a.clone(), b.clone(), d.clone(), e.clone(), g.clone()]);
    assert!(member(&[c.0.clone(), c.1.clone()], &pentagon).is_some());
    assert!(contained(&poly(&[c.clone(), f.clone()]), &pentagon));
    assert!(!contained(&poly(&[a, b, c.clone(), d, e, f.clone(), g]), &poly(&[c, f])));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_matches_planar_oracle(gens in prop::collection::vec(arb_p(), 1..=4), p in arb_p()) {
        let got = member(&[p.0.clone(), p.1.clone()], &poly(&gens));
        prop_assert_eq!(got.is_some(), oracle_member(&p, &gens));
        if let Some(c) = got {
            let pts: Vec<Vec<Q>> = gens.iter().map(|(x, y)| vec![x.clone(), y.clone()]).collect();
            prop_assert!(c.iter().all(|x| !x.is_negative()));
            prop_assert_eq!(c.iter().sum::<Q>(), q(1));
            prop_assert_eq!(combine(&pts, &c), vec![p.0, p.1]);
        }
    }

    #[test]
    fn generators_are_members(gens in prop::collection::vec(arb_p(), 1..=4), i in 0usize..4) {
        let g = &gens[i % gens.len()];
        prop_assert!(member(&[g.0.clone(), g.1.clone()], &poly(&gens)).is_some());
        prop_assert!(contained(&poly(&gens), &poly(&gens)));
    }

    #[test]
    fn convex_combinations_are_members(gens in prop::collection::vec(arb_p(), 1..=4), raw in prop::collection::vec(0i64..6, 4)) {
        let weights: Vec<Q> = raw[..gens.len()].iter().map(|w| q(*w + 1)).collect();
        let total: Q = weights.iter().sum();
        let coeffs: Vec<Q> = weights.iter().map(|w| w / &total).collect();
        let pts: Vec<Vec<Q>> = gens.iter().map(|(x, y)| vec![x.clone(), y.clone()]).collect();
        let p = combine(&pts, &coeffs);
        prop_assert!(oracle_member(&(p[0].clone(), p[1].clone()), &gens));
        prop_assert!(member(&p, &poly(&gens)).is_some());
    }

    #[test]
    fn containment_matches_planar_oracle(inner in prop::collection::vec(arb_p(), 1..=3), outer in prop::collection::vec(arb_p(), 1..=4)) {
        let expected = inner.iter().all(|p| oracle_member(p, &outer));
        prop_assert_eq!(contained(&poly(&inner), &poly(&outer)), expected);
    }

    #[test]
    fn intersection_matches_planar_oracle(a in prop::collection::vec(arb_p(), 1..=3), b in prop::collection::vec(arb_p(), 1..=3)) {
        let got = intersects(&poly(&a), &poly(&b));
        prop_assert_eq!(got.is_some(), oracle_intersects(&a, &b));
        if let Some(w) = got {
            let p = (w[0].clone(), w[1].clone());
            prop_assert!(oracle_member(&p, &a) && oracle_member(&p, &b));
        }
    }
}
