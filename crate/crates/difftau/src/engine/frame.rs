use std::fmt;

use crate::error::{Error, Result};
use crate::field::{dot, is_zero_vec, Matrix, RatMat, Scalar};

/// The three supported kinds of movable singularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    SimpleZero,
    SimplePole,
    CoalescedRankOne,
}

impl SingularityKind {
    /// Order of the determinant zero: +1, −1 or 0.
    pub fn kappa(self) -> i64 {
        match self {
            SingularityKind::SimpleZero => 1,
            SingularityKind::SimplePole => -1,
            SingularityKind::CoalescedRankOne => 0,
        }
    }
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SingularityKind::SimpleZero => "SimpleZero",
            SingularityKind::SimplePole => "SimplePole",
            SingularityKind::CoalescedRankOne => "CoalescedRankOne",
        };
        f.write_str(s)
    }
}

/// Local data attached to a movable singularity.
///
/// * zero at a: `w` spans ker A(a); `w_prime` is normalized so that
///   Res_a A⁻¹ = w·w′ᵗ.
/// * pole at b: `w_prime` spans the row space of Res_b A; `w` is normalized
///   so that Res_b A = w·w′ᵗ.
/// * coalesced at a: `w` spans the image of Res_a A⁻¹, ⟨w, w′⟩ = 0 and
///   A⁻ᵗ(z)(w′ + w″(z−a)) vanishes at a. Only w″ mod w^⊥ is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityFrame<F> {
    pub location: F,
    pub kind: SingularityKind,
    pub w: Vec<F>,
    pub w_prime: Vec<F>,
    pub w_double_prime: Option<Vec<F>>,
}

fn single<F: Scalar>(mut basis: Vec<Vec<F>>, what: &str) -> Result<Vec<F>> {
    if basis.len() != 1 {
        return Err(Error::NonGeneric(format!(
            "{what} has dimension {} (expected 1)",
            basis.len()
        )));
    }
    Ok(basis.pop().unwrap())
}

/// Index of the largest entry, if the vector is not negligible.
fn pivot<F: Scalar>(v: &[F]) -> Option<usize> {
    let k = (0..v.len()).max_by(|&a, &b| v[a].magnitude().total_cmp(&v[b].magnitude()))?;
    (!v[k].negligible(1.0)).then_some(k)
}

/// Splits a rank-one matrix m = u·vᵗ with u prescribed; returns v.
fn right_factor<F: Scalar>(m: &Matrix<F>, u: &[F], what: &str) -> Result<Vec<F>> {
    let k = pivot(u).ok_or_else(|| Error::NonGeneric(format!("{what}: zero vector")))?;
    let inv = F::one() / u[k].clone();
    let v: Vec<F> = m.row(k).into_iter().map(|x| x * inv.clone()).collect();
    if !approx_equal(&Matrix::outer(u, &v), m) || is_zero_vec(&v) {
        return Err(Error::NonGeneric(format!("{what}: residue is not u·vᵗ of rank one")));
    }
    Ok(v)
}

/// Splits a rank-one matrix m = u·vᵗ with v prescribed; returns u.
fn left_factor<F: Scalar>(m: &Matrix<F>, v: &[F], what: &str) -> Result<Vec<F>> {
    let k = pivot(v).ok_or_else(|| Error::NonGeneric(format!("{what}: zero covector")))?;
    let inv = F::one() / v[k].clone();
    let u: Vec<F> = m.col(k).into_iter().map(|x| x * inv.clone()).collect();
    if !approx_equal(&Matrix::outer(&u, v), m) || is_zero_vec(&u) {
        return Err(Error::NonGeneric(format!("{what}: residue is not u·vᵗ of rank one")));
    }
    Ok(u)
}

/// Relative tolerance of the structural checks in float mode. Poles of float
/// rational functions drift once common factors have been cancelled, so after
/// a few gauge steps residues and kernels are only accurate to about 1e-7.
const STRUCTURE_TOL: f64 = 1e-6;

/// Zero test for structural checks: exact in exact fields, relative to
/// `scale` with `STRUCTURE_TOL` otherwise.
fn structurally_zero<F: Scalar>(x: &F, scale: f64) -> bool {
    if F::exact() {
        x.is_zero()
    } else {
        x.magnitude() <= STRUCTURE_TOL * scale.max(1.0)
    }
}

pub(crate) fn approx_equal<F: Scalar>(a: &Matrix<F>, b: &Matrix<F>) -> bool {
    let scale = a
        .entries()
        .iter()
        .chain(b.entries())
        .map(|x| x.magnitude())
        .fold(1.0, f64::max);
    a.entries()
        .iter()
        .zip(b.entries())
        .all(|(x, y)| structurally_zero(&(x.clone() - y.clone()), scale))
}

pub(crate) fn approx_zero_vec<F: Scalar>(v: &[F]) -> bool {
    let scale = v.iter().map(|x| x.magnitude()).fold(1.0, f64::max);
    v.iter().all(|x| x.negligible(scale))
}

/// m·w vanishes relative to the sizes of m and w.
pub(crate) fn approx_kernel<F: Scalar>(m: &Matrix<F>, w: &[F]) -> bool {
    let size = |xs: &[F]| xs.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
    let scale = size(m.entries()) * size(w);
    m.mul_vec(w).iter().all(|x| structurally_zero(x, scale))
}

impl<F: Scalar> SingularityFrame<F> {
    /// Simple zero at `loc` with the kernel vector detected from A(loc).
    pub fn zero(a: &RatMat<F>, a_inv: &RatMat<F>, loc: F) -> Result<Self> {
        let w = single(a.kernel_at(&loc)?, "kernel at a zero")?;
        Self::zero_with(a, a_inv, loc, w)
    }

    /// Simple zero at `loc` with a prescribed kernel vector.
    pub fn zero_with(a: &RatMat<F>, a_inv: &RatMat<F>, loc: F, w: Vec<F>) -> Result<Self> {
        if approx_zero_vec(&w) || !approx_kernel(&a.eval_at(&loc)?, &w) {
            return Err(Error::NonGeneric(format!("w is not a kernel vector at {loc}")));
        }
        let res = a_inv.residue_at(&loc)?;
        let w_prime = right_factor(&res, &w, "simple zero")?;
        Ok(SingularityFrame {
            location: loc,
            kind: SingularityKind::SimpleZero,
            w,
            w_prime,
            w_double_prime: None,
        })
    }

    /// Simple pole at `loc` with the covector detected from Res A.
    pub fn pole(a: &RatMat<F>, loc: F) -> Result<Self> {
        let res = a.residue_at(&loc)?;
        let k = (0..res.rows())
            .find(|&i| !approx_zero_vec(&res.row(i)))
            .ok_or_else(|| Error::NonGeneric(format!("no pole at {loc}")))?;
        Self::pole_with(a, loc, res.row(k))
    }

    /// Simple pole at `loc` with a prescribed covector.
    pub fn pole_with(a: &RatMat<F>, loc: F, w_prime: Vec<F>) -> Result<Self> {
        let res = a.residue_at(&loc)?;
        let w = left_factor(&res, &w_prime, "simple pole")?;
        Ok(SingularityFrame {
            location: loc,
            kind: SingularityKind::SimplePole,
            w,
            w_prime,
            w_double_prime: None,
        })
    }

    /// Coalesced singularity at `loc` with a triple solved from the local expansion.
    pub fn coalesced(a_inv: &RatMat<F>, loc: F) -> Result<Self> {
        let res = a_inv.residue_at(&loc)?;
        let k = (0..res.cols())
            .find(|&j| !approx_zero_vec(&res.col(j)))
            .ok_or_else(|| Error::NonGeneric(format!("A⁻¹ has no pole at {loc}")))?;
        let w = res.col(k);
        let eta = right_factor(&res, &w, "coalesced singularity")?;
        // Unknowns (w′, λ): Q₀ w′ + λ η = 0 and ⟨w, w′⟩ = 0, Q₀ the constant
        // term of A⁻ᵗ at loc; λ = ⟨w, w″⟩.
        let q0 = a_inv.coeff_at(&loc, 0).transpose();
        let m = w.len();
        let mut rows: Vec<Vec<F>> = (0..m)
            .map(|i| {
                let mut r = q0.row(i);
                r.push(eta[i].clone());
                r
            })
            .collect();
        let mut last = w.clone();
        last.push(F::zero());
        rows.push(last);
        let sol = single(Matrix::from_rows(rows).nullspace(), "coalesced functional")?;
        let w_prime = sol[..m].to_vec();
        let lambda = sol[m].clone();
        if approx_zero_vec(&w_prime) {
            return Err(Error::NonGeneric(format!("w′ vanishes at {loc}")));
        }
        let j = pivot(&w).unwrap();
        let mut w_double_prime = vec![F::zero(); m];
        w_double_prime[j] = lambda / w[j].clone();
        Self::coalesced_with(a_inv, loc, w, w_prime, w_double_prime)
    }

    /// Coalesced singularity with a prescribed triple (validated).
    pub fn coalesced_with(
        a_inv: &RatMat<F>,
        loc: F,
        w: Vec<F>,
        w_prime: Vec<F>,
        w_double_prime: Vec<F>,
    ) -> Result<Self> {
        let res = a_inv.residue_at(&loc)?;
        if approx_zero_vec(&w) || approx_zero_vec(&w_prime) {
            return Err(Error::NonGeneric(format!("degenerate triple at {loc}")));
        }
        right_factor(&res, &w, "coalesced singularity")?;
        let scale = w.iter().chain(&w_prime).map(|x| x.magnitude()).fold(1.0, f64::max);
        if !structurally_zero(&dot(&w, &w_prime), scale * scale) {
            return Err(Error::NonGeneric(format!("⟨w, w′⟩ ≠ 0 at {loc}")));
        }
        let q0 = a_inv.coeff_at(&loc, 0).transpose();
        let qm1 = res.transpose();
        let lhs: Vec<F> = q0
            .mul_vec(&w_prime)
            .into_iter()
            .zip(qm1.mul_vec(&w_double_prime))
            .map(|(a, b)| a + b)
            .collect();
        let size = |xs: &[F]| xs.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
        let scale = (size(q0.entries()) * size(&w_prime)).max(size(qm1.entries()) * size(&w_double_prime));
        if !lhs.iter().all(|x| structurally_zero(x, scale)) {
            return Err(Error::NonGeneric(format!(
                "A⁻ᵗ(w′ + w″(z−a)) does not vanish at {loc}"
            )));
        }
        Ok(SingularityFrame {
            location: loc,
            kind: SingularityKind::CoalescedRankOne,
            w,
            w_prime,
            w_double_prime: Some(w_double_prime),
        })
    }

    /// ⟨w, w′⟩ for zeros and poles, ⟨w, w″⟩ for coalesced singularities.
    pub fn pairing(&self) -> F {
        match &self.w_double_prime {
            Some(wdd) => dot(&self.w, wdd),
            None => dot(&self.w, &self.w_prime),
        }
    }

    /// Frame with the primary vector rescaled by `c` (the dual rescales by 1/c).
    pub fn rescaled(&self, c: &F) -> Self {
        let inv = F::one() / c.clone();
        let s = |v: &[F], k: &F| v.iter().map(|x| x.clone() * k.clone()).collect::<Vec<F>>();
        match self.kind {
            SingularityKind::SimpleZero => SingularityFrame {
                w: s(&self.w, c),
                w_prime: s(&self.w_prime, &inv),
                ..self.clone()
            },
            SingularityKind::SimplePole => SingularityFrame {
                w: s(&self.w, &inv),
                w_prime: s(&self.w_prime, c),
                ..self.clone()
            },
            SingularityKind::CoalescedRankOne => SingularityFrame {
                w: s(&self.w, c),
                w_prime: s(&self.w_prime, c),
                w_double_prime: self.w_double_prime.as_ref().map(|v| s(v, c)),
                ..self.clone()
            },
        }
    }
}
