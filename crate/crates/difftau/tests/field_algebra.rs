use difftau::field::*;
use difftau::Error;
use proptest::prelude::*;

fn f(s: &str) -> RatFn<Q> {
    parse_ratfn(s).unwrap()
}

fn m(rows: Vec<Vec<&str>>) -> RatMat<Q> {
    RatMat::from_rows(rows.into_iter().map(|r| r.into_iter().map(f).collect()).collect())
}

#[test]
fn eval_reduces_before_evaluating() {
    assert_eq!(ratfun_eval(&f("(z^2-1)/(z-1)"), &q(2, 1)).unwrap(), q(3, 1));
    assert_eq!(f("(z^2-1)/(z-1)"), f("z+1"));
    assert_eq!(ratfun_eval(&f("z"), &q(0, 1)).unwrap(), q(0, 1));
    assert!(matches!(ratfun_eval(&f("1/(z-3)"), &q(3, 1)), Err(Error::PoleAtPoint(_))));
}

#[test]
fn residues() {
    assert_eq!(residue(&f("1/(z-2)"), &q(2, 1)).unwrap(), q(1, 1));
    assert_eq!(residue(&f("3z/(z-1)"), &q(1, 1)).unwrap(), q(3, 1));
    assert_eq!(residue(&f("z^2"), &q(0, 1)).unwrap(), q(0, 1));
    assert!(matches!(
        residue(&f("1/(z-1)^2"), &q(1, 1)),
        Err(Error::HigherOrderPole { order: 2, .. })
    ));
}

#[test]
fn inverses() {
    let id = RatMat::<Q>::identity(3);
    assert_eq!(mat_inverse(&id).unwrap(), id);
    assert_eq!(mat_inverse(&m(vec![vec!["z", "0"], vec!["0", "1"]])).unwrap(), m(vec![vec!["1/z", "0"], vec!["0", "1"]]));
    assert_eq!(mat_inverse(&m(vec![vec!["z", "z"], vec!["z", "z"]])), Err(Error::SingularMatrix));
    let a = m(vec![
        vec!["z", "1/(z+1)", "2"],
        vec!["z^2", "3", "1/(z-2)"],
        vec!["1", "z", "(z+1)/(z-3)"],
    ]);
    let inv = mat_inverse(&a).unwrap();
    assert_eq!(a.mul(&inv), RatMat::identity(3));
}

#[test]
fn kernels() {
    let d = m(vec![vec!["z", "0"], vec!["0", "1"]]);
    assert_eq!(kernel_at(&d, &q(0, 1)).unwrap(), vec![vec![q(1, 1), q(0, 1)]]);
    assert!(kernel_at(&RatMat::<Q>::identity(2), &q(5, 3)).unwrap().is_empty());
    let nil = m(vec![vec!["z-1", "0"], vec!["1", "z-1"]]);
    assert_eq!(kernel_at(&nil, &q(1, 1)).unwrap(), vec![vec![q(0, 1), q(1, 1)]]);
    assert!(matches!(kernel_at(&m(vec![vec!["1/z"]]), &q(0, 1)), Err(Error::PoleAtPoint(_))));
}

#[test]
fn expansions_at_infinity() {
    let id = RatMat::<Q>::identity(2);
    let e = infinity_expansion(&id, 1).unwrap();
    assert_eq!(e, vec![Matrix::identity(2), Matrix::zeros(2, 2)]);
    let d = m(vec![vec!["(z+3)/z", "0"], vec!["0", "1"]]);
    let e = infinity_expansion(&d, 1).unwrap();
    assert_eq!(e[1], Matrix::diag(vec![q(3, 1), q(0, 1)]));
    let g = m(vec![vec!["z^2", "0"], vec!["0", "1"]]);
    assert_eq!(infinity_expansion(&g, 2), Err(Error::PoleAtInfinity));
    // 1/(z−1) = 1/z + 1/z² + …
    let e = f("1/(z-1)").expand_at_infinity(3).unwrap();
    assert_eq!(e, vec![q(0, 1), q(1, 1), q(1, 1), q(1, 1)]);
}

#[test]
fn laurent_coefficients() {
    // z/(z−1)² at 1: 1/(t²) + 1/t
    let l = f("z/(z-1)^2").laurent_at(&q(1, 1), 3);
    assert_eq!(l.valuation, -2);
    assert_eq!(l.coeffs, vec![q(1, 1), q(1, 1), q(0, 1)]);
    assert_eq!(f("(z-2)^3").order_at(&q(2, 1)), Some(3));
    assert_eq!(f("(z-2)^3").coeff_at(&q(2, 1), 3), q(1, 1));
}

#[test]
fn degree_cap_is_enforced() {
    let big = RatMat::<Q>::diag(vec![RatFn::from_poly(Poly::z().pow(600)), RatFn::one()]);
    assert!(matches!(big.mat_inverse(), Err(Error::DegreeCapExceeded { cap: 512, .. })));
}

#[test]
fn parser_and_rendering() {
    assert_eq!(f("2z + 1/2"), RatFn::from_poly(Poly::new(vec![q(1, 2), q(2, 1)])));
    assert_eq!(f("(z+1)(z-1)"), f("z^2 - 1"));
    assert_eq!(parse_value::<Q>("-1.25").unwrap(), q(-5, 4));
    assert_eq!(q(6, 4).render(), "3/2");
    assert_eq!(q(3, 1).render(), "3/1");
    assert!(parse_ratfn::<Q>("z +* 1").is_err());
    assert!(parse_ratfn::<Q>("1/(z-z)").is_err());
}

#[test]
fn bareiss_matches_cofactor_expansion() {
    let a = Matrix::from_rows(vec![
        vec![q(2, 1), q(-1, 3), q(0, 1), q(5, 1)],
        vec![q(0, 1), q(0, 1), q(7, 2), q(1, 1)],
        vec![q(1, 1), q(4, 1), q(-2, 1), q(0, 1)],
        vec![q(3, 5), q(1, 1), q(1, 1), q(1, 1)],
    ]);
    fn cofactor(a: &Matrix<Q>) -> Q {
        let n = a.rows();
        if n == 1 {
            return a.get(0, 0).clone();
        }
        let mut acc = q(0, 1);
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let term = a.get(0, j).clone() * cofactor(&a.submatrix(&rows, &cols));
            acc = if j % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }
    assert_eq!(a.det(), cofactor(&a));
    let af = a.map(|x| x.to_f64());
    assert!((af.det() - cofactor(&a).to_f64()).abs() < 1e-12);
}

fn small_q() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly<Q>> {
    prop::collection::vec(small_q(), 1..=max_deg + 1).prop_map(Poly::new)
}

fn small_ratfn() -> impl Strategy<Value = RatFn<Q>> {
    (small_poly(3), small_poly(3))
        .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
        .prop_map(|(n, d)| RatFn::new(n, d))
}

/// Rational function with at most a simple pole at `at`.
fn simple_pole_fn(at: Q) -> impl Strategy<Value = RatFn<Q>> {
    (small_poly(2), small_poly(2), small_q()).prop_filter_map("regular denominator", move |(n, d, c)| {
        if d.is_zero() || d.eval(&at) == q(0, 1) {
            return None;
        }
        Some(RatFn::new(n, d) + RatFn::simple_pole(c, at.clone()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_unique(a in small_ratfn(), g in small_ratfn()) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!((a.clone() * g.clone()) / g, a);
    }

    #[test]
    fn denominators_are_monic_and_coprime(a in small_ratfn(), b in small_ratfn()) {
        let s = a + b;
        prop_assert!(s.den().lead() == q(1, 1));
        prop_assert_eq!(s.num().gcd(s.den()).degree(), Some(0));
    }

    #[test]
    fn residue_is_additive(f1 in simple_pole_fn(q(1, 2)), f2 in simple_pole_fn(q(1, 2))) {
        let at = q(1, 2);
        prop_assert_eq!(
            residue(&(f1.clone() + f2.clone()), &at).unwrap(),
            residue(&f1, &at).unwrap() + residue(&f2, &at).unwrap()
        );
    }

    #[test]
    fn inverse_round_trip(entries in prop::collection::vec(small_ratfn(), 4)) {
        let a = RatMat::from_rows(vec![entries[..2].to_vec(), entries[2..].to_vec()]);
        prop_assume!(!a.det().is_zero());
        let inv = mat_inverse(&a).unwrap();
        prop_assert_eq!(a.mul(&inv), RatMat::identity(2));
        prop_assert_eq!(inv.mul(&a), RatMat::identity(2));
    }

    #[test]
    fn exact_and_float_evaluation_agree(a in small_ratfn(), b in small_ratfn(), z0 in small_q()) {
        let expr = a.clone() * b.clone() + a.clone();
        if let Ok(exact) = expr.eval(&z0) {
            let af: RatFn<f64> = RatFn::new(
                Poly::new(a.num().coeffs().iter().map(|c| c.to_f64()).collect()),
                Poly::new(a.den().coeffs().iter().map(|c| c.to_f64()).collect()),
            );
            let bf: RatFn<f64> = RatFn::new(
                Poly::new(b.num().coeffs().iter().map(|c| c.to_f64()).collect()),
                Poly::new(b.den().coeffs().iter().map(|c| c.to_f64()).collect()),
            );
            let zf = z0.to_f64();
            let da = a.den().eval(&z0);
            let db = b.den().eval(&z0);
            prop_assume!(!da.is_zero() && !db.is_zero());
            let fl = (af.clone() * bf + af).eval(&zf).unwrap();
            prop_assert!(fl.close(&exact.to_f64(), 1e-9), "{} vs {}", fl, exact);
        }
    }
}
