use super::connection::DConnection;
use super::frame::{SingularityFrame, SingularityKind};
use crate::error::{Error, Result};
use crate::field::{
    dot, ratvec_from_scalar, ratvec_taylor1, ratvec_value, Matrix, RatFn, RatMat, Scalar,
};

/// Result of one isomonodromy move: the shifted connection, the gauge R(z)
/// with A′(z)R(z) = R(z+1)A(z), and the τ first ratio τ(new)/τ(old).
#[derive(Clone, Debug, PartialEq)]
pub struct Shift<F> {
    pub connection: DConnection<F>,
    pub gauge: RatMat<F>,
    pub gauge_inverse: RatMat<F>,
    pub ratio: F,
}

/// Value at `at` of m(z)·v (after reduction, so removable singularities are fine).
fn apply_at<F: Scalar>(m: &RatMat<F>, v: &[F], at: &F) -> Result<Vec<F>> {
    ratvec_value(&m.mul_vec(&ratvec_from_scalar(v)), at)
}

/// Value and derivative at `at` of m(z)·(w0 + w1·(z − base)).
fn apply_functional<F: Scalar>(
    m: &RatMat<F>,
    w0: &[F],
    w1: &[F],
    base: &F,
    at: &F,
) -> Result<(Vec<F>, Vec<F>)> {
    let lin = RatFn::from_poly(crate::field::Poly::linear(base.clone()));
    let v: Vec<RatFn<F>> = w0
        .iter()
        .zip(w1)
        .map(|(a, b)| RatFn::constant(a.clone()) + RatFn::constant(b.clone()) * lin.clone())
        .collect();
    ratvec_taylor1(&m.mul_vec(&v), at)
}

struct GaugeData<'a, F> {
    a: &'a RatMat<F>,
    a_inv: &'a RatMat<F>,
    r: &'a RatMat<F>,
    r_inv: &'a RatMat<F>,
    new_a: &'a RatMat<F>,
    new_a_inv: &'a RatMat<F>,
}

fn outer_scaled<F: Scalar>(u: &[F], v: &[F], c: &F) -> Matrix<F> {
    Matrix::outer(u, v).scale(c)
}

fn nonzero_pairing<F: Scalar>(p: F, what: &str) -> Result<F> {
    if p.negligible(1.0) {
        Err(Error::NonGeneric(format!("{what} pairing vanishes")))
    } else {
        Ok(p)
    }
}

impl<F: Scalar> GaugeData<'_, F> {
    /// Carries a frame through the gauge; `delta` is how far the frame moves.
    fn transport(&self, f: &SingularityFrame<F>, delta: i64) -> Result<SingularityFrame<F>> {
        let one = F::one();
        let loc = f.location.clone();
        match delta {
            0 => {
                let rt_inv = self.r_inv.transpose();
                match f.kind {
                    SingularityKind::SimpleZero => {
                        let w = apply_at(self.r, &f.w, &loc)?;
                        SingularityFrame::zero_with(self.new_a, self.new_a_inv, loc, w)
                    }
                    SingularityKind::SimplePole => {
                        let wp = apply_at(&rt_inv, &f.w_prime, &loc)?;
                        SingularityFrame::pole_with(self.new_a, loc, wp)
                    }
                    SingularityKind::CoalescedRankOne => {
                        let w = apply_at(self.r, &f.w, &loc)?;
                        let wdd = f.w_double_prime.as_ref().unwrap();
                        let (wp, wdd) = apply_functional(&rt_inv, &f.w_prime, wdd, &loc, &loc)?;
                        SingularityFrame::coalesced_with(self.new_a_inv, loc, w, wp, wdd)
                    }
                }
            }
            -1 => {
                let at = loc - one;
                let down_w = self.r.mul(self.a_inv);
                let down_f = self.a.mul(self.r_inv).transpose();
                match f.kind {
                    SingularityKind::SimpleZero => {
                        let w = apply_at(&down_w, &f.w, &at)?;
                        SingularityFrame::zero_with(self.new_a, self.new_a_inv, at, w)
                    }
                    SingularityKind::SimplePole => {
                        let wp = apply_at(&down_f, &f.w_prime, &at)?;
                        SingularityFrame::pole_with(self.new_a, at, wp)
                    }
                    SingularityKind::CoalescedRankOne => {
                        let w = apply_at(&down_w, &f.w, &at)?;
                        let wdd = f.w_double_prime.as_ref().unwrap();
                        let (wp, wdd) = apply_functional(&down_f, &f.w_prime, wdd, &at, &at)?;
                        SingularityFrame::coalesced_with(self.new_a_inv, at, w, wp, wdd)
                    }
                }
            }
            1 => {
                let up_w = self.r.shift_arg(&one).mul(self.a);
                let up_f = self.a_inv.mul(&self.r_inv.shift_arg(&one)).transpose();
                let at = loc.clone() + one;
                match f.kind {
                    SingularityKind::SimpleZero => {
                        let w = apply_at(&up_w, &f.w, &loc)?;
                        SingularityFrame::zero_with(self.new_a, self.new_a_inv, at, w)
                    }
                    SingularityKind::SimplePole => {
                        let wp = apply_at(&up_f, &f.w_prime, &loc)?;
                        SingularityFrame::pole_with(self.new_a, at, wp)
                    }
                    SingularityKind::CoalescedRankOne => {
                        let w = apply_at(&up_w, &f.w, &loc)?;
                        let wdd = f.w_double_prime.as_ref().unwrap();
                        let (wp, wdd) = apply_functional(&up_f, &f.w_prime, wdd, &loc, &loc)?;
                        SingularityFrame::coalesced_with(self.new_a_inv, at, w, wp, wdd)
                    }
                }
            }
            _ => Err(Error::InvalidInput(format!("frames move by at most one step, got {delta}"))),
        }
    }
}

/// Applies the gauge R and carries every frame along; `moves` lists (frame, ±1).
fn gauge_connection<F: Scalar>(
    conn: &DConnection<F>,
    a_inv: &RatMat<F>,
    r: RatMat<F>,
    r_inv: RatMat<F>,
    moves: &[(usize, i64)],
    ratio: Option<F>,
) -> Result<Shift<F>> {
    let a = &conn.matrix;
    let new_a = r.shift_arg(&F::one()).mul(a).mul(&r_inv);
    new_a.check_degree()?;
    let new_a_inv = r.mul(a_inv).mul(&r_inv.shift_arg(&F::one()));
    let data = GaugeData {
        a,
        a_inv,
        r: &r,
        r_inv: &r_inv,
        new_a: &new_a,
        new_a_inv: &new_a_inv,
    };
    let frames = conn
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let delta = moves.iter().find(|(i, _)| *i == k).map_or(0, |(_, d)| *d);
            data.transport(f, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    let connection = DConnection {
        matrix: new_a,
        frames,
        infinity: conn.infinity.clone(),
    };
    Ok(Shift {
        connection,
        gauge: r,
        gauge_inverse: r_inv,
        ratio: ratio.unwrap_or_else(F::one),
    })
}

/// Moves simple zero i up by one and simple zero j down by one.
pub fn shift_simple_zero_pair<F: Scalar>(conn: &DConnection<F>, i: usize, j: usize) -> Result<Shift<F>> {
    if i == j {
        return Err(Error::InvalidInput("zero pair shift needs two distinct frames".into()));
    }
    let fi = conn.expect_kind(i, SingularityKind::SimpleZero)?;
    let fj = conn.expect_kind(j, SingularityKind::SimpleZero)?;
    let (ui, uj) = (fi.location.clone(), fj.location.clone());
    let gap = ui.clone() + F::one() - uj.clone();
    let pair = nonzero_pairing(dot(&fj.w, &fi.w_prime), "⟨w_j, w′_i⟩")?;
    let r0 = outer_scaled(&fj.w, &fi.w_prime, &(gap.clone() / pair.clone()));
    let r = RatMat::identity_plus_pole(&r0, &(ui + F::one()));
    let r_inv = RatMat::identity_plus_pole(&r0.scale(&-F::one()), &uj);
    let a_inv = conn.matrix.mat_inverse()?;
    gauge_connection(conn, &a_inv, r, r_inv, &[(i, 1), (j, -1)], Some(pair / gap))
}

/// Moves the simple zero i and the simple pole k together by `direction` = ±1.
pub fn shift_zero_pole_pair<F: Scalar>(
    conn: &DConnection<F>,
    i: usize,
    k: usize,
    direction: i64,
) -> Result<Shift<F>> {
    let zero = conn.expect_kind(i, SingularityKind::SimpleZero)?;
    let pole = conn.expect_kind(k, SingularityKind::SimplePole)?;
    let (a, b) = (zero.location.clone(), pole.location.clone());
    let a_inv = conn.matrix.mat_inverse()?;
    match direction {
        -1 => {
            let pair = nonzero_pairing(dot(&zero.w, &pole.w_prime), "⟨w, w′⟩")?;
            let r0 = outer_scaled(&zero.w, &pole.w_prime, &((b.clone() - a.clone()) / pair.clone()));
            let r = RatMat::identity_plus_pole(&r0, &b);
            let r_inv = RatMat::identity_plus_pole(&r0.scale(&-F::one()), &a);
            let ratio = pair / (a - b);
            gauge_connection(conn, &a_inv, r, r_inv, &[(i, -1), (k, -1)], Some(ratio))
        }
        1 => {
            let pair = nonzero_pairing(dot(&pole.w, &zero.w_prime), "⟨x, y⟩")?;
            let r0 = outer_scaled(&pole.w, &zero.w_prime, &((a.clone() - b.clone()) / pair));
            let r = RatMat::identity_plus_pole(&r0, &(a.clone() + F::one()));
            let r_inv = RatMat::identity_plus_pole(&r0.scale(&-F::one()), &(b.clone() + F::one()));
            let mut s = gauge_connection(conn, &a_inv, r, r_inv, &[(i, 1), (k, 1)], None)?;
            let new_pair = nonzero_pairing(
                dot(&s.connection.frames[i].w, &s.connection.frames[k].w_prime),
                "shifted ⟨w, w′⟩",
            )?;
            s.ratio = (a - b) / new_pair;
            Ok(s)
        }
        d => Err(Error::InvalidInput(format!("direction must be ±1, got {d}"))),
    }
}

/// Moves the coalesced singularity i by `direction` = ±1.
pub fn shift_coalesced<F: Scalar>(conn: &DConnection<F>, i: usize, direction: i64) -> Result<Shift<F>> {
    let f = conn.expect_kind(i, SingularityKind::CoalescedRankOne)?;
    let a = f.location.clone();
    let a_inv = conn.matrix.mat_inverse()?;
    match direction {
        -1 => {
            let wdd = f.w_double_prime.as_ref().unwrap();
            let pair = nonzero_pairing(dot(&f.w, wdd), "⟨w, w″⟩")?;
            let r0 = outer_scaled(&f.w, &f.w_prime, &(F::one() / pair.clone()));
            let r = RatMat::identity_plus_pole(&r0, &a);
            let r_inv = RatMat::identity_plus_pole(&r0.scale(&-F::one()), &a);
            gauge_connection(conn, &a_inv, r, r_inv, &[(i, -1)], Some(pair))
        }
        1 => {
            // Res_a A = v·ηᵗ; y solves A₀ᵗ y = η with ⟨v, y⟩ = 0, A₀ the
            // constant term of A at a. Then R(z) = I − v·yᵗ/(z − a − 1).
            let p = conn.matrix.residue_at(&a)?;
            let col = (0..p.cols())
                .find(|&c| !super::frame::approx_zero_vec(&p.col(c)))
                .ok_or_else(|| Error::NonGeneric(format!("A has no pole at {a}")))?;
            let v = p.col(col);
            let k = v.iter().position(|x| !x.negligible(1.0)).unwrap();
            let eta: Vec<F> = p.row(k).into_iter().map(|x| x / v[k].clone()).collect();
            let a0t = conn.matrix.coeff_at(&a, 0).transpose();
            let mut rows: Vec<Vec<F>> = (0..a0t.rows()).map(|r| a0t.row(r)).collect();
            rows.push(v.clone());
            let mut rhs = eta;
            rhs.push(F::zero());
            let y = Matrix::from_rows(rows)
                .solve(&rhs)
                .map_err(|_| Error::NonGeneric(format!("no upward gauge at {a}")))?;
            let vy = Matrix::outer(&v, &y);
            let at = a + F::one();
            let r = RatMat::identity_plus_pole(&vy.scale(&-F::one()), &at);
            let r_inv = RatMat::identity_plus_pole(&vy, &at);
            let mut s = gauge_connection(conn, &a_inv, r, r_inv, &[(i, 1)], None)?;
            let new_pair = nonzero_pairing(s.connection.frames[i].pairing(), "shifted ⟨w, w″⟩")?;
            s.ratio = F::one() / new_pair;
            Ok(s)
        }
        d => Err(Error::InvalidInput(format!("direction must be ±1, got {d}"))),
    }
}

/// A′(z)R(z) − R(z+1)A(z); identically zero for a valid shift.
pub fn gauge_residual<F: Scalar>(before: &RatMat<F>, shift: &Shift<F>) -> RatMat<F> {
    shift
        .connection
        .matrix
        .mul(&shift.gauge)
        .sub(&shift.gauge.shift_arg(&F::one()).mul(before))
}

/// det R(z) as a rational function.
pub fn gauge_det<F: Scalar>(shift: &Shift<F>) -> RatFn<F> {
    shift.gauge.det()
}

