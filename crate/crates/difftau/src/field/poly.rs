use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::matrix::Matrix;
use super::scalar::Scalar;

/// Dense univariate polynomial, coefficients stored from the constant term up.
/// No trailing zeros are stored; the zero polynomial is empty.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Scalar> Poly<F> {
    /// Trailing zeros are dropped; in float mode so are trailing coefficients
    /// below 1e-12 of the largest one.
    pub fn new(mut coeffs: Vec<F>) -> Self {
        let floor = if F::exact() {
            0.0
        } else {
            1e-12 * coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
        };
        while coeffs.last().is_some_and(|c| c.is_zero() || c.magnitude() <= floor) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial z.
    pub fn z() -> Self {
        Self::new(vec![F::zero(), F::one()])
    }

    /// z − root.
    pub fn linear(root: F) -> Self {
        Self::new(vec![-root, F::one()])
    }

    pub fn from_roots(roots: &[F]) -> Self {
        roots
            .iter()
            .fold(Self::constant(F::one()), |acc, r| acc * Self::linear(r.clone()))
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn eval(&self, z: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = F::one() / self.lead();
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * F::from_i64(i as i64))
                .collect(),
        )
    }

    /// p(z + c).
    pub fn shift(&self, c: &F) -> Self {
        let step = Self::new(vec![c.clone(), F::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, k| acc * step.clone() + Self::constant(k.clone()))
    }

    /// Polynomial with reversed coefficient order padded to length `len`:
    /// z^{len−1} p(1/z).
    pub fn reversed(&self, len: usize) -> Vec<F> {
        let mut out = vec![F::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[len - 1 - i] = c.clone();
        }
        out
    }

    /// Index of the lowest nonzero coefficient; in float mode coefficients
    /// below 1e-10 of the largest one count as zero.
    pub fn valuation(&self) -> Option<usize> {
        let floor = if F::exact() {
            0.0
        } else {
            1e-10 * self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
        };
        self.coeffs.iter().position(|c| !c.is_zero() && c.magnitude() > floor)
    }

    /// p/g for a divisor g known to divide p. In float mode the quotient is the
    /// least-squares solution of q·g = p, which is far less sensitive to a
    /// slightly perturbed g than long division.
    pub fn exact_quotient(&self, g: &Self) -> Self {
        let (Some(dp), Some(dg)) = (self.degree(), g.degree()) else {
            return self.div_rem(g).0;
        };
        if F::exact() || dg == 0 || dp < dg {
            return self.div_rem(g).0;
        }
        let n = dp - dg + 1;
        let conv = Matrix::from_fn(dp + 1, n, |r, j| if r >= j { g.coeff(r - j) } else { F::zero() });
        let ct = conv.transpose();
        match ct.mul(&conv).solve(&ct.mul_vec(&self.coeffs)) {
            Ok(q) => Self::new(q),
            Err(_) => self.div_rem(g).0,
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = F::one() / divisor.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * lead_inv.clone();
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].clone() - c.clone() * d.clone();
                }
            }
            rem[k + dd] = F::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.degree() == Some(0) || other.degree() == Some(0) {
            return Self::constant(F::one());
        }
        Self::new(F::poly_gcd(&self.coeffs, &other.coeffs)).monic()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(F::one()), |acc, _| acc * self.clone())
    }
}

impl<F: Scalar> Add for Poly<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<F: Scalar> Sub for Poly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<F: Scalar> Neg for Poly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<F: Scalar> Mul for Poly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<F: Scalar> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{i}")?,
            }
        }
        Ok(())
    }
}
