use geotherm::symbolic::parse_poly;
use geotherm::{Exponent, GenPoly, RationalExpr, VarList};
use proptest::prelude::*;

fn vars() -> VarList {
    VarList::new(&["S", "Q", "l"]).unwrap()
}

fn poly() -> impl Strategy<Value = GenPoly> {
    let term = (prop_oneof![-2.0..-0.5f64, 0.5..2.0f64], prop::array::uniform3(-4i64..=6));
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        let v = vars();
        let mut p = GenPoly::zero(&v);
        for (c, e) in terms {
            let powers = [("S", Exponent::ratio(e[0], 2)), ("Q", Exponent::ratio(e[1], 2)), ("l", Exponent::ratio(e[2], 2))];
            p = p.add(&GenPoly::monomial(&v, c, &powers).unwrap());
        }
        p
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.5..3.0f64)
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn derivative_is_linear(p in poly(), q in poly(), c in -3.0..3.0f64, k in 0usize..3) {
        let lhs = p.add(&q.scale(c)).diff_index(k);
        let rhs = p.diff_index(k).add(&q.diff_index(k).scale(c));
        let scale = p.diff_index(k).max_abs_coeff().max(q.diff_index(k).scale(c).max_abs_coeff());
        prop_assert!(lhs.sub(&rhs).terms().iter().all(|t| t.coeff().abs() <= 1e-12 * scale));
    }

    #[test]
    fn leibniz_rule(p in poly(), q in poly(), k in 0usize..3) {
        let (u, v) = (p.diff_index(k).mul(&q), p.mul(&q.diff_index(k)));
        let lhs = p.mul(&q).diff_index(k);
        let scale = u.max_abs_coeff().max(v.max_abs_coeff());
        prop_assert!(lhs.sub(&u.add(&v)).terms().iter().all(|t| t.coeff().abs() <= 1e-12 * scale));
    }

    #[test]
    fn mixed_partials_commute(p in poly(), a in 0usize..3, b in 0usize..3) {
        prop_assert!(p.diff_index(a).diff_index(b).approx_eq(&p.diff_index(b).diff_index(a), 1e-12));
    }

    #[test]
    fn product_evaluates_to_product(p in poly(), q in poly(), x in point()) {
        let direct = p.eval_slice(&x) * q.eval_slice(&x);
        let scale = p.eval_abs_slice(&x) * q.eval_abs_slice(&x);
        prop_assert!(rel(p.mul(&q).eval_slice(&x), direct, scale) < 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference(p in poly(), x in point(), k in 0usize..3) {
        let h = 1e-5 * x[k];
        let (mut xp, mut xm) = (x, x);
        xp[k] += h;
        xm[k] -= h;
        let fd = (p.eval_slice(&xp) - p.eval_slice(&xm)) / (2.0 * h);
        let dp = p.diff_index(k);
        let sym = dp.eval_slice(&x);
        prop_assert!(rel(fd, sym, sym.abs().max(1e-3 * dp.eval_abs_slice(&x))) < 1e-6, "{fd} vs {sym}");
    }

    #[test]
    fn display_round_trips(p in poly()) {
        let back = parse_poly(&p.to_string(), Some(&vars())).unwrap();
        prop_assert!(back.approx_eq(&p, 1e-15), "{p} -> {back}");
        prop_assert_eq!(back.len(), p.len());
    }

    #[test]
    fn rational_sum_evaluates_to_sum(a in poly(), b in poly(), c in poly(), d in poly(), x in point()) {
        let r1 = RationalExpr::new(a, b).unwrap();
        let r2 = RationalExpr::new(c, d).unwrap();
        let (v1, v2) = (r1.eval_slice(&x), r2.eval_slice(&x));
        prop_assume!(v1.is_finite() && v2.is_finite());
        prop_assume!(r1.den().eval_slice(&x).abs() > 1e-3 * r1.den().eval_abs_slice(&x));
        prop_assume!(r2.den().eval_slice(&x).abs() > 1e-3 * r2.den().eval_abs_slice(&x));
        let sum = r1.add(&r2).eval_slice(&x);
        prop_assert!(rel(sum, v1 + v2, (v1 + v2).abs().max(1e-6 * (v1.abs() + v2.abs()))) < 1e-10, "{sum} vs {}", v1 + v2);
    }

    #[test]
    fn quotient_rule_matches_central_difference(a in poly(), b in poly(), x in point(), k in 0usize..3) {
        let r = RationalExpr::new(a, b).unwrap();
        let den = r.den().eval_slice(&x);
        prop_assume!(den.abs() > 0.1 * r.den().eval_abs_slice(&x));
        let h = 1e-5 * x[k];
        let (mut xp, mut xm) = (x, x);
        xp[k] += h;
        xm[k] -= h;
        let fd = (r.eval_slice(&xp) - r.eval_slice(&xm)) / (2.0 * h);
        let sym = r.diff(["S", "Q", "l"][k]).eval_slice(&x);
        prop_assert!(rel(fd, sym, sym.abs().max(1e-3 * r.eval_slice(&x).abs() / x[k])) < 1e-6, "{fd} vs {sym}");
    }
}

#[test]
fn ten_thousand_structural_identities() {
    let r = geotherm::checks::check_calculus_identities(10_000, 0x5eed);
    assert!(r.passed, "{}", r.detail);
}
