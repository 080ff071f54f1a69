use difftau::engine::*;
use difftau::field::*;
use difftau::instances::{self, InstanceRng};
use difftau::Error;
use proptest::prelude::*;

fn f(s: &str) -> RatFn<Q> {
    parse_ratfn(s).unwrap()
}

fn zero_instance(rng: &mut InstanceRng, n: usize) -> DConnection<Q> {
    let zeros = instances::generic_points(rng, n, 0);
    instances::zero_connection(rng, 2, &zeros).unwrap()
}

fn zero_pole_instance(rng: &mut InstanceRng, pairs: usize) -> DConnection<Q> {
    let zeros = instances::generic_points(rng, pairs, 0);
    let poles = instances::generic_points(rng, pairs, pairs);
    instances::zero_pole_connection(rng, 2, &zeros, &poles).unwrap()
}

fn coalesced_instance(rng: &mut InstanceRng, points: usize) -> DConnection<Q> {
    let pts = instances::generic_points(rng, points, 0);
    instances::coalesced_connection(rng, 2, &pts).unwrap()
}

fn locations(c: &DConnection<Q>) -> Vec<Q> {
    c.frames.iter().map(|f| f.location.clone()).collect()
}

#[test]
fn zero_pair_gauge_shape() {
    let mut rng = instances::rng(11);
    let conn = zero_instance(&mut rng, 3);
    let (ui, uj) = (conn.frames[0].location.clone(), conn.frames[2].location.clone());
    let s = shift_simple_zero_pair(&conn, 0, 2).unwrap();
    let expected = RatFn::new(Poly::linear(uj.clone()), Poly::linear(ui.clone() + q(1, 1)));
    assert_eq!(gauge_det(&s), expected);
    // R − I = R₀/(z − u_i − 1) has rank one
    let r0 = s.gauge.sub(&RatMat::identity(2)).residue_at(&(ui.clone() + q(1, 1))).unwrap();
    assert_eq!(r0.rank(), 1);
    assert!(gauge_residual(&conn.matrix, &s).is_zero());
    assert_eq!(s.connection.frames[0].location, ui + q(1, 1));
    assert_eq!(s.connection.frames[2].location, uj - q(1, 1));
    assert!(verify_singularity_structure(&s.connection).is_empty());
}

#[test]
fn zero_pole_gauge_shape_and_round_trip() {
    let mut rng = instances::rng(5);
    let conn = zero_pole_instance(&mut rng, 2);
    let (a, b) = (conn.frames[0].location.clone(), conn.frames[1].location.clone());
    let down = shift_zero_pole_pair(&conn, 0, 1, -1).unwrap();
    assert_eq!(gauge_det(&down), RatFn::new(Poly::linear(a.clone()), Poly::linear(b.clone())));
    assert!(gauge_residual(&conn.matrix, &down).is_zero());
    assert!(verify_singularity_structure(&down.connection).is_empty());
    assert_eq!(down.connection.frames[0].location, a.clone() - q(1, 1));
    assert_eq!(down.connection.frames[1].location, b - q(1, 1));

    let back = shift_zero_pole_pair(&down.connection, 0, 1, 1).unwrap();
    assert!(gauge_residual(&down.connection.matrix, &back).is_zero());
    assert_eq!(back.connection.matrix, conn.matrix);
    assert_eq!(back.connection.frames, conn.frames);
    assert_eq!(down.ratio.clone() * back.ratio.clone(), q(1, 1));

    let up = shift_zero_pole_pair(&conn, 0, 1, 1).unwrap();
    let again = shift_zero_pole_pair(&up.connection, 0, 1, -1).unwrap();
    assert_eq!(again.connection.matrix, conn.matrix);
    assert_eq!(up.ratio * again.ratio, q(1, 1));
}

#[test]
fn coalesced_gauge_shape_and_round_trip() {
    let mut rng = instances::rng(7);
    let conn = coalesced_instance(&mut rng, 2);
    let a = conn.frames[0].location.clone();
    let down = shift_coalesced(&conn, 0, -1).unwrap();
    assert_eq!(gauge_det(&down), RatFn::one());
    assert!(gauge_residual(&conn.matrix, &down).is_zero());
    assert!(verify_singularity_structure(&down.connection).is_empty());
    assert_eq!(down.connection.frames[0].location, a - q(1, 1));
    assert_eq!(down.ratio, conn.frames[0].pairing());

    let back = shift_coalesced(&down.connection, 0, 1).unwrap();
    assert_eq!(gauge_det(&back), RatFn::one());
    assert!(gauge_residual(&down.connection.matrix, &back).is_zero());
    assert_eq!(back.connection.matrix, conn.matrix);
    assert_eq!(down.ratio.clone() * back.ratio.clone(), q(1, 1));
    assert_eq!(back.connection.frames[0].w, conn.frames[0].w);

    let up = shift_coalesced(&conn, 1, 1).unwrap();
    assert!(verify_singularity_structure(&up.connection).is_empty());
    let again = shift_coalesced(&up.connection, 1, -1).unwrap();
    assert_eq!(again.connection.matrix, conn.matrix);
    assert_eq!(up.ratio * again.ratio, q(1, 1));
}

#[test]
fn errors_for_wrong_kinds_and_degenerate_pairings() {
    let mut rng = instances::rng(3);
    let conn = zero_pole_instance(&mut rng, 1);
    assert!(matches!(shift_simple_zero_pair(&conn, 0, 1), Err(Error::FrameKindMismatch { frame: 1, .. })));
    assert!(matches!(shift_coalesced(&conn, 0, 1), Err(Error::FrameKindMismatch { .. })));
    // diagonal zeros: ⟨w₂, w′₁⟩ = ⟨e₂, e₁⟩ = 0
    let diag = RatMat::diag(vec![f("z - 1/3"), f("z - 1/5")]);
    let conn = DConnection::detect(diag, &[(q(1, 3), SingularityKind::SimpleZero), (q(1, 5), SingularityKind::SimpleZero)]).unwrap();
    assert!(matches!(shift_simple_zero_pair(&conn, 0, 1), Err(Error::NonGeneric(_))));
}

#[test]
fn second_ratio_trivial_cases() {
    let mut rng = instances::rng(21);
    let mut walk = Walk::new(zero_instance(&mut rng, 3));
    walk.zero_pair(0, 1).unwrap();
    assert_eq!(tau_second_ratio(&walk.ledger, &[0, 0, 0], &[1, -1, 0]).unwrap(), q(1, 1));
    assert!(matches!(
        tau_second_ratio(&walk.ledger, &[1, -1, 0], &[0, 1, -1]),
        Err(Error::MissingPath(_))
    ));
}

/// D_{s,t}τ with s = e₀ − e₁, t = e₀ − e₂, from two walks sharing the start.
fn try_second_ratio(conn: &DConnection<Q>) -> difftau::Result<(Q, Q)> {
    let mut w1 = Walk::new(conn.clone());
    let d_s = w1.zero_pair(0, 1)?;
    let mut w2 = Walk::new(conn.clone());
    w2.zero_pair(0, 2)?;
    w2.zero_pair(0, 1)?;
    w1.ledger.merge(&w2.ledger)?;
    Ok((d_s, tau_second_ratio(&w1.ledger, &[1, -1, 0], &[1, 0, -1])?))
}

fn second_ratio(conn: &DConnection<Q>) -> (Q, Q) {
    try_second_ratio(conn).unwrap()
}

#[test]
fn second_ratios_ignore_frame_scaling() {
    let mut rng = instances::rng(8);
    let conn = zero_instance(&mut rng, 3);
    let (first, second) = second_ratio(&conn);
    let scaled = conn.rescale_frame(1, &q(-7, 3)).unwrap().rescale_frame(0, &q(5, 2)).unwrap();
    let (first_s, second_s) = second_ratio(&scaled);
    assert_ne!(first, first_s);
    assert_eq!(second, second_s);
}

#[test]
fn zero_pair_moves_commute() {
    let mut rng = instances::rng(31);
    let conn = zero_instance(&mut rng, 4);
    let mut a = Walk::new(conn.clone());
    let ra = a.zero_pair(0, 1).unwrap() * a.zero_pair(2, 3).unwrap();
    let mut b = Walk::new(conn);
    let rb = b.zero_pair(2, 3).unwrap() * b.zero_pair(0, 1).unwrap();
    assert_eq!(a.connection.matrix, b.connection.matrix);
    assert_eq!(a.position, b.position);
    // Under the dual-normalized frames the two orders agree with sign +1.
    assert_eq!(ra, rb);
    a.ledger.merge(&b.ledger).unwrap();
    assert!(a.ledger.sign_flips().is_empty());
}

#[test]
fn lexicographic_decomposition() {
    assert_eq!(decompose_zero_shift(&[1, -1, 1, -1]).unwrap(), vec![(0, 1), (2, 3)]);
    assert_eq!(decompose_zero_shift(&[-1, 2, -1]).unwrap(), vec![(1, 0), (1, 2)]);
    assert!(decompose_zero_shift(&[1, 0]).is_err());
    let mut rng = instances::rng(4);
    let conn = zero_instance(&mut rng, 4);
    let mut w = Walk::new(conn);
    w.apply_zero_shift(&[1, -1, 1, -1]).unwrap();
    assert_eq!(w.position, vec![1, -1, 1, -1]);
    assert_eq!(w.ledger.steps().len(), 2);
}

#[test]
fn hirota_examples() {
    let mut rng = instances::rng(17);
    let conn = zero_instance(&mut rng, 4);
    assert_eq!(hirota_check(&conn, &[], &[]).unwrap(), (q(1, 1), q(1, 1)));
    let (lhs, rhs) = hirota_check(&conn, &[2], &[0]).unwrap();
    assert_eq!(lhs, rhs);
    assert_eq!(lhs, shift_simple_zero_pair(&conn, 2, 0).unwrap().ratio);
    let (lhs, rhs) = hirota_check(&conn, &[0, 1], &[2, 3]).unwrap();
    assert_eq!(lhs, rhs);
    // bilinear form: τ″τ = τ′₁τ′₂ − τ′₃τ′₄
    let r = |i, j| shift_simple_zero_pair(&conn, i, j).unwrap().ratio;
    assert_eq!(lhs, r(0, 2) * r(1, 3) - r(0, 3) * r(1, 2));
}

#[test]
fn structure_report_examples() {
    let a = RatMat::diag(vec![f("(z+2)/z"), RatFn::one()]);
    let zero = SingularityFrame {
        location: q(-2, 1),
        kind: SingularityKind::SimpleZero,
        w: vec![q(1, 1), q(0, 1)],
        w_prime: vec![q(1, 1), q(0, 1)],
        w_double_prime: None,
    };
    let pole = SingularityFrame {
        location: q(0, 1),
        kind: SingularityKind::SimplePole,
        w: vec![q(2, 1), q(0, 1)],
        w_prime: vec![q(1, 1), q(0, 1)],
        w_double_prime: None,
    };
    let conn = DConnection::new(a.clone(), vec![zero.clone(), pole.clone()]);
    assert!(verify_singularity_structure(&conn).is_empty());
    let detected = DConnection::detect(a.clone(), &[(q(-2, 1), SingularityKind::SimpleZero), (q(0, 1), SingularityKind::SimplePole)]).unwrap();
    assert!(verify_singularity_structure(&detected).is_empty());

    let wrong = SingularityFrame { kind: SingularityKind::SimpleZero, ..pole };
    let conn = DConnection::new(a, vec![zero, wrong]);
    assert_eq!(verify_singularity_structure(&conn).len(), 1);

    let two_zeros = RatMat::diag(vec![f("z"), f("z-3")]);
    let conn = DConnection::detect(two_zeros, &[(q(0, 1), SingularityKind::SimpleZero), (q(3, 1), SingularityKind::SimpleZero)]).unwrap();
    let v = verify_singularity_structure(&conn);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].frames, vec![0, 1]);
}

#[test]
fn walk_records_every_step() {
    let mut rng = instances::rng(2);
    let conn = zero_pole_instance(&mut rng, 2);
    let mut w = Walk::new(conn);
    let r1 = w.zero_pole(0, 1, -1).unwrap();
    let r2 = w.zero_pole(2, 3, -1).unwrap();
    assert_eq!(w.position, vec![-1, -1, -1, -1]);
    assert_eq!(w.ledger.tau(&[-1, -1, -1, -1]).unwrap(), r1 * r2);
    let back = w.zero_pole(0, 1, 1).unwrap();
    assert_eq!(w.ledger.tau(&[0, 0, -1, -1]).unwrap(), w.ledger.tau(&[-1, -1, -1, -1]).unwrap() * back);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gauge_covariance_and_transport_zero_pairs(seed in 0u64..10_000) {
        let mut rng = instances::rng(seed);
        let conn = zero_instance(&mut rng, 3);
        let s = shift_simple_zero_pair(&conn, 1, 2).unwrap();
        prop_assert!(gauge_residual(&conn.matrix, &s).is_zero());
        prop_assert!(verify_singularity_structure(&s.connection).is_empty());
        let mut loc = locations(&conn);
        loc[1] = loc[1].clone() + q(1, 1);
        loc[2] = loc[2].clone() - q(1, 1);
        prop_assert_eq!(locations(&s.connection), loc);
        let back = shift_simple_zero_pair(&s.connection, 2, 1).unwrap();
        prop_assert_eq!(&back.connection.matrix, &conn.matrix);
        prop_assert_eq!(s.ratio * back.ratio, q(1, 1));
    }

    #[test]
    fn gauge_covariance_and_round_trip_zero_pole(seed in 0u64..10_000, dir in prop::sample::select(vec![-1i64, 1])) {
        let mut rng = instances::rng(seed);
        let conn = zero_pole_instance(&mut rng, 2);
        let s = shift_zero_pole_pair(&conn, 2, 3, dir).unwrap();
        prop_assert!(gauge_residual(&conn.matrix, &s).is_zero());
        prop_assert!(verify_singularity_structure(&s.connection).is_empty());
        let back = shift_zero_pole_pair(&s.connection, 2, 3, -dir).unwrap();
        prop_assert_eq!(&back.connection.matrix, &conn.matrix);
        prop_assert_eq!(s.ratio * back.ratio, q(1, 1));
    }

    #[test]
    fn gauge_covariance_and_round_trip_coalesced(seed in 0u64..10_000, dir in prop::sample::select(vec![-1i64, 1])) {
        let mut rng = instances::rng(seed);
        let conn = coalesced_instance(&mut rng, 2);
        let s = shift_coalesced(&conn, 0, dir).unwrap();
        prop_assert!(gauge_residual(&conn.matrix, &s).is_zero());
        prop_assert!(verify_singularity_structure(&s.connection).is_empty());
        let back = shift_coalesced(&s.connection, 0, -dir).unwrap();
        prop_assert_eq!(&back.connection.matrix, &conn.matrix);
        prop_assert_eq!(s.ratio * back.ratio, q(1, 1));
    }

    #[test]
    fn second_ratio_is_frame_independent(seed in 0u64..10_000, c in 1i64..9, d in 1i64..9) {
        let mut rng = instances::rng(seed);
        let conn = zero_instance(&mut rng, 3);
        // Some seeds give a vanishing pairing along the path; those are not generic.
        let base = try_second_ratio(&conn);
        prop_assume!(!matches!(base, Err(Error::NonGeneric(_))));
        let scaled = conn.rescale_frame(0, &q(c, d)).unwrap().rescale_frame(2, &q(-d, c)).unwrap();
        prop_assert_eq!(base.unwrap().1, second_ratio(&scaled).1);
    }

    #[test]
    fn hirota_two_by_two(seed in 0u64..10_000) {
        let mut rng = instances::rng(seed);
        let conn = zero_instance(&mut rng, 4);
        let (lhs, rhs) = hirota_check(&conn, &[3, 1], &[0, 2]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
