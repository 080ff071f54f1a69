//! Field abstraction, polynomials, rational functions and dense matrices.
//!
//! Everything downstream is generic over [`Scalar`], instantiated either with
//! exact rationals ([`Q`]) or with `f64`.

mod matrix;
mod parse;
mod poly;
mod ratfn;
mod ratmat;
mod scalar;

pub use matrix::{dot, is_zero_vec, scale_vec, Matrix};
pub use parse::{parse_ratfn, parse_value};
pub use poly::Poly;
pub use ratfn::{degree_cap, set_degree_cap, Laurent, RatFn};
pub use ratmat::{ratvec_from_scalar, ratvec_is_zero, ratvec_taylor1, ratvec_value, RatMat, RatVec};
pub use scalar::{parse_rational, Field, Scalar, Q};

/// Evaluates f at z0 (free-function form of [`RatFn::eval`]).
pub fn ratfun_eval<F: Scalar>(f: &RatFn<F>, z0: &F) -> crate::Result<F> {
    f.eval(z0)
}

/// Residue of f at z0 (free-function form of [`RatFn::residue`]).
pub fn residue<F: Scalar>(f: &RatFn<F>, z0: &F) -> crate::Result<F> {
    f.residue(z0)
}

/// Inverse of a rational matrix.
pub fn mat_inverse<F: Scalar>(a: &RatMat<F>) -> crate::Result<RatMat<F>> {
    a.mat_inverse()
}

/// Basis of ker A(z0).
pub fn kernel_at<F: Scalar>(a: &RatMat<F>, z0: &F) -> crate::Result<Vec<Vec<F>>> {
    a.kernel_at(z0)
}

/// Coefficients C₀ … C_order of A at infinity.
pub fn infinity_expansion<F: Scalar>(a: &RatMat<F>, order: usize) -> crate::Result<Vec<Matrix<F>>> {
    a.infinity_expansion(order)
}

/// Shorthand for an exact rational p/q.
pub fn q(p: i64, d: i64) -> Q {
    Q::from_ratio(p, d)
}

/// The exact rational value of a finite double.
pub fn lift_f64(x: f64) -> crate::Result<Q> {
    use num::FromPrimitive;
    Q::from_f64(x).ok_or_else(|| crate::Error::InvalidInput(format!("{x} is not finite")))
}
