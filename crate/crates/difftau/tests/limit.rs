use difftau::engine::SingularityKind;
use difftau::field::{q, Field, Matrix, Poly, RatFn, RatMat, Scalar, Q};
use difftau::instances::{random_limit_sites, rng};
use difftau::limit::*;
use difftau::Error;
use proptest::prelude::*;

fn site(y: Q, alpha: Q, beta: Q, w: [i64; 2], wp: [i64; 2]) -> RankOneSite<Q> {
    let v = |a: [i64; 2]| a.iter().map(|&x| q(x, 1)).collect();
    RankOneSite::new(y, alpha, beta, v(w), v(wp)).unwrap()
}

/// w₁=(1,0), w′₁=(1,1), w₂=(0,1), w′₂=(1,1), β−α=1, y=(0,1).
fn textbook() -> SchlesingerData<Q> {
    let sites = [
        site(q(0, 1), q(0, 1), q(1, 1), [1, 0], [1, 1]),
        site(q(1, 1), q(0, 1), q(1, 1), [0, 1], [1, 1]),
    ];
    SchlesingerData::from_sites(&sites).unwrap()
}

fn mat(rows: [[i64; 2]; 2]) -> Matrix<Q> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect())
}

fn to_float(sites: &[RankOneSite<Q>]) -> Vec<RankOneSite<f64>> {
    let f = |x: &Q| x.to_f64();
    sites
        .iter()
        .map(|s| {
            RankOneSite::new(f(&s.y), f(&s.alpha), f(&s.beta), s.w.iter().map(f).collect(), s.w_prime.iter().map(f).collect())
                .unwrap()
        })
        .collect()
}

#[test]
fn schlesinger_rhs_textbook_pair() {
    let data = textbook();
    // B₁ = [[1,1],[0,0]], B₂ = [[0,0],[1,1]], [B₁,B₂] = [[1,1],[−1,−1]].
    assert_eq!(data.sites()[0].1, mat([[1, 1], [0, 0]]));
    assert_eq!(data.sites()[1].1, mat([[0, 0], [1, 1]]));
    assert_eq!(schlesinger_rhs(&data, 0, 1).unwrap(), mat([[-1, -1], [1, 1]]));
    assert_eq!(schlesinger_rhs(&data, 0, 0).unwrap(), mat([[1, 1], [-1, -1]]));
    assert_eq!(schlesinger_rhs(&data, 1, 0).unwrap(), mat([[-1, -1], [1, 1]]));
}

#[test]
fn tau_curvature_textbook_pair() {
    let data = textbook();
    assert_eq!(tau_curvature(&data, 0, 1).unwrap(), q(1, 1));
    assert_eq!(tau_curvature(&data, 1, 0).unwrap(), q(1, 1));
    assert_eq!(tau_curvature(&data, 0, 0).unwrap(), q(-1, 1));
}

#[test]
fn trivial_schlesinger_cases() {
    let single = SchlesingerData::new(vec![(q(2, 1), mat([[1, 2], [3, 4]]))]).unwrap();
    assert!(schlesinger_rhs(&single, 0, 0).unwrap().is_zero());
    assert_eq!(tau_curvature(&single, 0, 0).unwrap(), q(0, 1));

    let commuting = SchlesingerData::new(vec![(q(0, 1), mat([[1, 0], [0, 0]])), (q(3, 1), mat([[2, 0], [0, 5]]))]).unwrap();
    assert!(schlesinger_rhs(&commuting, 0, 1).unwrap().is_zero());

    let vanishing = SchlesingerData::new(vec![(q(0, 1), mat([[1, 2], [0, 0]])), (q(3, 1), Matrix::zeros(2, 2))]).unwrap();
    assert_eq!(tau_curvature(&vanishing, 0, 1).unwrap(), q(0, 1));
}

#[test]
fn coincident_points_rejected() {
    let err = SchlesingerData::new(vec![(q(1, 1), mat([[1, 0], [0, 0]])), (q(1, 1), mat([[0, 0], [0, 1]]))]);
    assert!(matches!(err, Err(Error::CoincidentPoints(_))));
}

#[test]
fn single_site_family_is_one_factor() {
    let s = site(q(1, 2), q(1, 3), q(3, 4), [2, -1], [1, 5]);
    let eps = q(1, 8);
    let conn = build_connection_family(std::slice::from_ref(&s), &eps).unwrap();
    let b = s.pole_at(&eps);
    let expected = RatMat::identity_plus_pole(&s.residue(), &b);
    assert_eq!(conn.matrix, expected);
    // A(ζ/ε) = I + εB/(ζ − y) + O(ε²): exactly I + ε(β−α)P/(ζ − y + ε(… )), so
    // the residual over ε² stays bounded as ε shrinks.
    let zeta = q(5, 2);
    let data = SchlesingerData::from_sites(std::slice::from_ref(&s)).unwrap();
    let bounded: Vec<f64> = dyadic_eps::<Q>(3, 8)
        .iter()
        .map(|e| {
            let c = build_connection_family(std::slice::from_ref(&s), e).unwrap();
            lim1_residual(&c, &data, e, &zeta).unwrap() / (e.to_f64() * e.to_f64())
        })
        .collect();
    assert!(bounded.windows(2).all(|w| w[1] <= w[0] * 1.5), "{bounded:?}");
}

#[test]
fn family_determinant_and_kernels() {
    for seed in 0..4 {
        let sites = random_limit_sites(&mut rng(seed), 2, 3);
        let eps = q(1, 16);
        let conn = build_connection_family(&sites, &eps).unwrap();
        let det = conn.matrix.det();
        let num = Poly::from_roots(&sites.iter().map(|s| s.zero_at(&eps)).collect::<Vec<_>>());
        let den = Poly::from_roots(&sites.iter().map(|s| s.pole_at(&eps)).collect::<Vec<_>>());
        assert_eq!(det, RatFn::new(num, den));
        for (k, s) in sites.iter().enumerate() {
            let zero = &conn.frames[2 * k];
            assert_eq!(zero.kind, SingularityKind::SimpleZero);
            assert_eq!(conn.matrix.kernel_at(&s.zero_at(&eps)).unwrap().len(), 1);
            assert_eq!(zero.w, s.w);
            assert_eq!(conn.frames[2 * k + 1].w_prime, s.w_prime);
        }
        let at_infinity = conn.matrix.infinity_expansion(1).unwrap();
        assert_eq!(at_infinity[0], Matrix::identity(2));
    }
}

#[test]
fn integer_distinct_offsets_rejected() {
    let sites = [
        site(q(0, 1), q(1, 3), q(4, 3), [1, 0], [1, 1]),
        site(q(1, 1), q(1, 5), q(2, 7), [0, 1], [1, 1]),
    ];
    assert!(matches!(build_connection_family(&sites, &q(1, 8)), Err(Error::NonGeneric(_))));
}

#[test]
fn sweep_rejects_increasing_eps() {
    let sites = random_limit_sites(&mut rng(0), 2, 2);
    let eps = vec![q(1, 16), q(1, 8)];
    assert!(matches!(limit_sweep(&sites, 0, 1, &eps), Err(Error::InvalidInput(_))));
}

#[test]
fn generic_sweep_converges_at_first_order() {
    let sites = random_limit_sites(&mut rng(0), 2, 2);
    let data = SchlesingerData::from_sites(&sites).unwrap();
    for (i, j) in [(0, 1), (0, 0), (1, 1)] {
        let sweep = limit_sweep(&sites, i, j, &dyadic_eps(3, 8)).unwrap();
        assert!(sweep.closed_form_agrees(0.0));
        assert_eq!(sweep.rows[0].target, tau_curvature(&data, i, j).unwrap());
        assert!(sweep.richardson_run(0.3, 0.7) >= 4, "{i}{j}: {:?}", sweep.rows);
        let errors: Vec<f64> = sweep.rows.iter().map(|r| r.error).collect();
        assert!(errors.last().unwrap() < &errors[0]);
        assert!(sweep.lim1_orders().iter().all(|&o| o >= 1.0));
        assert!(sweep.lim2_orders().iter().rev().take(2).all(|&o| o >= 0.9));
    }
}

#[test]
fn diagonal_target_is_minus_off_diagonal_sum() {
    let sites = random_limit_sites(&mut rng(3), 2, 3);
    let data = SchlesingerData::from_sites(&sites).unwrap();
    for i in 0..3 {
        let off: Q = (0..3).filter(|&k| k != i).map(|k| tau_curvature(&data, i, k).unwrap()).fold(Q::zero(), |a, b| a + b);
        assert_eq!(tau_curvature(&data, i, i).unwrap(), -off);
    }
}

#[test]
fn commuting_residues_have_flat_tau() {
    let sites = [
        site(q(0, 1), q(1, 3), q(2, 5), [1, 0], [1, 0]),
        site(q(1, 1), q(1, 7), q(3, 11), [0, 1], [0, 1]),
    ];
    let sweep = limit_sweep(&sites, 0, 1, &dyadic_eps(3, 8)).unwrap();
    for r in &sweep.rows {
        assert_eq!(r.target, q(0, 1));
        assert_eq!(r.measured, q(0, 1));
    }
}

#[test]
fn float_sweep_tracks_exact_sweep() {
    let exact_sites = random_limit_sites(&mut rng(1), 2, 2);
    let exact = limit_sweep(&exact_sites, 0, 1, &dyadic_eps(3, 8)).unwrap();
    let eps: Vec<f64> = dyadic_eps::<Q>(3, 8).iter().map(|e| e.to_f64()).collect();
    let float = limit_sweep_float(&to_float(&exact_sites), 0, 1, &eps).unwrap();
    for (e, f) in exact.rows.iter().zip(&float.rows) {
        assert!(e.measured.to_f64().close(&f.measured, 1e-12));
        assert_eq!(f.engine, f.closed_form);
    }
    // Generic float arithmetic is fine while the singular points stay small.
    let coarse = limit_sweep(&to_float(&exact_sites), 0, 1, &[0.125]).unwrap();
    assert!(coarse.rows[0].measured.close(&exact.rows[0].measured.to_f64(), 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn engine_equals_closed_form(seed in 0u64..10_000, k in 2u32..6, n in 2usize..4) {
        let sites = random_limit_sites(&mut rng(seed), 2, n);
        let eps = Q::from_ratio(1, 1 << k);
        let conn = build_connection_family(&sites, &eps).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(engine_second_ratio(&conn, i, j).unwrap(), closed_form_second_ratio(&conn, i, j).unwrap());
            }
        }
    }

    #[test]
    fn translation_invariance(seed in 0u64..10_000, n in 2usize..5) {
        // Shifting every y_j by the same amount changes nothing: Σ_j ∂/∂y_j = 0.
        let sites = random_limit_sites(&mut rng(seed), 3, n);
        let data = SchlesingerData::from_sites(&sites).unwrap();
        for i in 0..n {
            let mut total = Matrix::zeros(3, 3);
            let mut curvature = Q::zero();
            for j in 0..n {
                total = total.add(&schlesinger_rhs(&data, i, j).unwrap());
                curvature = curvature + tau_curvature(&data, i, j).unwrap();
            }
            prop_assert!(total.is_zero());
            prop_assert!(curvature.is_zero());
        }
    }

    #[test]
    fn frame_rescaling_invariance(seed in 0u64..10_000, c in 1i64..7, d in 1i64..7) {
        let sites = random_limit_sites(&mut rng(seed), 2, 2);
        let mut scaled = sites.clone();
        scaled[0].w = scaled[0].w.iter().map(|x| x.clone() * q(c, d)).collect();
        scaled[1].w_prime = scaled[1].w_prime.iter().map(|x| x.clone() * q(-d, c)).collect();
        let eps = q(1, 8);
        let a = build_connection_family(&sites, &eps).unwrap();
        let b = build_connection_family(&scaled, &eps).unwrap();
        prop_assert_eq!(&a.matrix, &b.matrix);
        prop_assert_eq!(engine_second_ratio(&a, 0, 1).unwrap(), engine_second_ratio(&b, 0, 1).unwrap());
        prop_assert_eq!(engine_second_ratio(&a, 1, 1).unwrap(), engine_second_ratio(&b, 1, 1).unwrap());
    }
}
