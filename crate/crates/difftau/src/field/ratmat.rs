use super::matrix::Matrix;
use super::poly::Poly;
use super::ratfn::RatFn;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Square matrix of rational functions in z.
pub type RatMat<F> = Matrix<RatFn<F>>;
/// Vector of rational functions in z.
pub type RatVec<F> = Vec<RatFn<F>>;

impl<F: Scalar> Matrix<RatFn<F>> {
    pub fn from_scalar(m: &Matrix<F>) -> Self {
        m.map(|x| RatFn::constant(x.clone()))
    }

    /// I + m/(z − at) for a scalar matrix m.
    pub fn identity_plus_pole(m: &Matrix<F>, at: &F) -> Self {
        let n = m.rows();
        Self::from_fn(n, n, |i, j| {
            let p = RatFn::simple_pole(m.get(i, j).clone(), at.clone());
            if i == j {
                p + RatFn::one()
            } else {
                p
            }
        })
    }

    pub fn eval_at(&self, z0: &F) -> Result<Matrix<F>> {
        self.try_map(|f| f.eval(z0))
    }

    /// A(z + c).
    pub fn shift_arg(&self, c: &F) -> Self {
        self.map(|f| f.shift(c))
    }

    pub fn derivative(&self) -> Self {
        self.map(|f| f.derivative())
    }

    /// Lowest order over all entries at z0 (None when the matrix is zero).
    pub fn order_at(&self, z0: &F) -> Option<i64> {
        self.entries().iter().filter_map(|f| f.order_at(z0)).min()
    }

    /// Matrix coefficient of (z − z0)^power.
    pub fn coeff_at(&self, z0: &F, power: i64) -> Matrix<F> {
        self.map(|f| f.coeff_at(z0, power))
    }

    /// Matrix of residues at z0; errors on higher-order poles.
    pub fn residue_at(&self, z0: &F) -> Result<Matrix<F>> {
        self.try_map(|f| f.residue(z0))
    }

    /// Coefficients C₀, …, C_order of the expansion in 1/z at infinity.
    pub fn infinity_expansion(&self, order: usize) -> Result<Vec<Matrix<F>>> {
        let expanded: Vec<Vec<F>> = self
            .entries()
            .iter()
            .map(|f| f.expand_at_infinity(order))
            .collect::<Result<_>>()?;
        Ok((0..=order)
            .map(|k| {
                Matrix::new(
                    self.rows(),
                    self.cols(),
                    expanded.iter().map(|e| e[k].clone()).collect(),
                )
            })
            .collect())
    }

    /// Null space of the scalar matrix A(z0).
    pub fn kernel_at(&self, z0: &F) -> Result<Vec<Vec<F>>> {
        Ok(self.eval_at(z0)?.nullspace())
    }

    pub fn max_height(&self) -> usize {
        self.entries().iter().map(|f| f.height()).max().unwrap_or(0)
    }

    pub fn check_degree(&self) -> Result<()> {
        self.entries().iter().try_for_each(|f| f.check_degree())
    }

    /// Inverse with the degree cap enforced on input and output.
    pub fn mat_inverse(&self) -> Result<Self> {
        self.check_degree()?;
        let inv = self.inverse()?;
        inv.check_degree()?;
        Ok(inv)
    }

    /// Least common multiple of all entry denominators (monic).
    pub fn common_denominator(&self) -> Poly<F> {
        self.entries().iter().fold(Poly::constant(F::one()), |acc, f| {
            let g = acc.gcd(f.den());
            (acc * f.den().clone()).div_rem(&g).0
        })
    }

    /// Polynomial matrix A(z)·p(z); errors if some entry is not cleared.
    pub fn times_poly(&self, p: &Poly<F>) -> Result<Matrix<RatFn<F>>> {
        let pf = RatFn::from_poly(p.clone());
        let out = self.map(|f| f.clone() * pf.clone());
        if out.entries().iter().all(|f| f.is_polynomial()) {
            Ok(out)
        } else {
            Err(Error::Degenerate(
                "denominator does not clear the matrix".into(),
            ))
        }
    }
}

pub fn ratvec_from_scalar<F: Scalar>(v: &[F]) -> RatVec<F> {
    v.iter().map(|x| RatFn::constant(x.clone())).collect()
}

/// Value of a vector of rational functions at z0 (must be regular there).
pub fn ratvec_value<F: Scalar>(v: &[RatFn<F>], z0: &F) -> Result<Vec<F>> {
    v.iter().map(|f| f.eval(z0)).collect()
}

/// Value and first derivative at z0 of a vector of rational functions regular at z0.
pub fn ratvec_taylor1<F: Scalar>(v: &[RatFn<F>], z0: &F) -> Result<(Vec<F>, Vec<F>)> {
    let mut value = Vec::with_capacity(v.len());
    let mut slope = Vec::with_capacity(v.len());
    for f in v {
        if let Some(o) = f.order_at(z0) {
            if o < 0 {
                return Err(Error::PoleAtPoint(z0.to_string()));
            }
        }
        value.push(f.coeff_at(z0, 0));
        slope.push(f.coeff_at(z0, 1));
    }
    Ok((value, slope))
}

/// True when every entry is the zero function.
pub fn ratvec_is_zero<F: Scalar>(v: &[RatFn<F>]) -> bool {
    v.iter().all(|f| f.is_zero())
}
