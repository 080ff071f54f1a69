use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::poly::Poly;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

static DEGREE_CAP: AtomicUsize = AtomicUsize::new(512);

/// Current polynomial degree cap enforced by fallible matrix operations.
pub fn degree_cap() -> usize {
    DEGREE_CAP.load(Ordering::Relaxed)
}

pub fn set_degree_cap(cap: usize) {
    DEGREE_CAP.store(cap, Ordering::Relaxed);
}

/// Rational function num/den with monic denominator. In exact fields the
/// pair is also coprime, so equality of values is equality of representations.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFn<F> {
    num: Poly<F>,
    den: Poly<F>,
}

/// Laurent expansion Σ coeffs[k]·t^(valuation+k) in the local parameter t.
#[derive(Clone, PartialEq, Debug)]
pub struct Laurent<F> {
    pub valuation: i64,
    pub coeffs: Vec<F>,
}

impl<F: Scalar> Laurent<F> {
    /// Coefficient of t^power (zero outside the computed window).
    pub fn coeff(&self, power: i64) -> F {
        let k = power - self.valuation;
        if k < 0 {
            return F::zero();
        }
        self.coeffs.get(k as usize).cloned().unwrap_or_else(F::zero)
    }
}

/// Power series quotient n(t)/d(t) with d(0) ≠ 0, first `terms` coefficients.
fn series_div<F: Scalar>(n: &[F], d: &[F], terms: usize) -> Vec<F> {
    let d0_inv = F::one() / d[0].clone();
    let mut out: Vec<F> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut acc = n.get(k).cloned().unwrap_or_else(F::zero);
        for i in 1..=k.min(d.len().saturating_sub(1)) {
            acc = acc - d[i].clone() * out[k - i].clone();
        }
        out.push(acc * d0_inv.clone());
    }
    out
}

impl<F: Scalar> RatFn<F> {
    /// Builds num/den in canonical form; panics on a zero denominator.
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return Self::from_poly(Poly::zero());
        }
        let (num, den) = if den.degree() != Some(0) {
            let g = num.gcd(&den);
            if g.degree().unwrap_or(0) > 0 {
                (num.exact_quotient(&g), den.exact_quotient(&g))
            } else {
                (num, den)
            }
        } else {
            (num, den)
        };
        let lead = den.lead();
        if lead.is_one() {
            RatFn { num, den }
        } else {
            let inv = F::one() / lead;
            RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    /// Assembles num/den known to be coprime; only rescales to a monic denominator.
    fn coprime(num: Poly<F>, den: Poly<F>) -> Self {
        if num.is_zero() {
            return Self::from_poly(num);
        }
        let lead = den.lead();
        if lead.is_one() {
            RatFn { num, den }
        } else {
            let inv = F::one() / lead;
            RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFn {
            num: p,
            den: Poly::constant(F::one()),
        }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z())
    }

    /// c/(z − at).
    pub fn simple_pole(c: F, at: F) -> Self {
        Self::new(Poly::constant(c), Poly::linear(at))
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Largest of the numerator and denominator degrees.
    pub fn height(&self) -> usize {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0))
    }

    pub fn as_constant(&self) -> Option<F> {
        if self.is_polynomial() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn eval(&self, z0: &F) -> Result<F> {
        let d = self.den.eval(z0);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(z0.to_string()));
        }
        Ok(self.num.eval(z0) / d)
    }

    /// f(z + c).
    pub fn shift(&self, c: &F) -> Self {
        if self.is_polynomial() {
            return Self::from_poly(self.num.shift(c));
        }
        RatFn {
            num: self.num.shift(c),
            den: self.den.shift(c),
        }
    }

    pub fn derivative(&self) -> Self {
        if self.is_polynomial() {
            return Self::from_poly(self.num.derivative());
        }
        Self::new(
            self.num.derivative() * self.den.clone() - self.num.clone() * self.den.derivative(),
            self.den.clone() * self.den.clone(),
        )
    }

    /// Order of vanishing at z0 (negative for poles); None for the zero function.
    pub fn order_at(&self, z0: &F) -> Option<i64> {
        if self.num.is_zero() {
            return None;
        }
        let vn = self.num.shift(z0).valuation()? as i64;
        let vd = self.den.shift(z0).valuation().unwrap_or(0) as i64;
        Some(vn - vd)
    }

    /// Laurent expansion at z0 with `terms` coefficients starting at the valuation.
    pub fn laurent_at(&self, z0: &F, terms: usize) -> Laurent<F> {
        if self.num.is_zero() {
            return Laurent {
                valuation: 0,
                coeffs: vec![F::zero(); terms],
            };
        }
        let n = self.num.shift(z0);
        let d = self.den.shift(z0);
        let vn = n.valuation().unwrap_or(0);
        let vd = d.valuation().unwrap_or(0);
        let coeffs = series_div(&n.coeffs()[vn..], &d.coeffs()[vd..], terms);
        Laurent {
            valuation: vn as i64 - vd as i64,
            coeffs,
        }
    }

    /// Coefficient of (z − z0)^power.
    pub fn coeff_at(&self, z0: &F, power: i64) -> F {
        match self.order_at(z0) {
            None => F::zero(),
            Some(v) if power < v => F::zero(),
            Some(v) => self.laurent_at(z0, (power - v + 1) as usize).coeff(power),
        }
    }

    /// Coefficient of 1/(z − z0); errors on poles of order two or more.
    pub fn residue(&self, z0: &F) -> Result<F> {
        match self.order_at(z0) {
            None => Ok(F::zero()),
            Some(v) if v >= 0 => Ok(F::zero()),
            Some(-1) => Ok(self.laurent_at(z0, 1).coeffs[0].clone()),
            Some(v) => Err(Error::HigherOrderPole {
                at: z0.to_string(),
                order: -v,
            }),
        }
    }

    /// Coefficients of z^0, z^−1, …, z^−order at infinity.
    pub fn expand_at_infinity(&self, order: usize) -> Result<Vec<F>> {
        if self.num.is_zero() {
            return Ok(vec![F::zero(); order + 1]);
        }
        let dn = self.num.degree().unwrap();
        let dd = self.den.degree().unwrap();
        if dn > dd {
            return Err(Error::PoleAtInfinity);
        }
        let shift = dd - dn;
        let n = self.num.reversed(dn + 1);
        let d = self.den.reversed(dd + 1);
        let mut out = vec![F::zero(); order + 1];
        if shift <= order {
            let series = series_div(&n, &d, order + 1 - shift);
            for (k, c) in series.into_iter().enumerate() {
                out[k + shift] = c;
            }
        }
        Ok(out)
    }

    pub fn check_degree(&self) -> Result<()> {
        let cap = degree_cap();
        let h = self.height();
        if h > cap {
            Err(Error::DegreeCapExceeded { degree: h, cap })
        } else {
            Ok(())
        }
    }
}

impl<F: Scalar> Field for RatFn<F> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn from_i64(v: i64) -> Self {
        Self::constant(F::from_i64(v))
    }
    fn exact() -> bool {
        F::exact()
    }
    fn magnitude(&self) -> f64 {
        if self.num.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl<F: Scalar> Add for RatFn<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.num.is_zero() {
            return rhs;
        }
        if rhs.num.is_zero() {
            return self;
        }
        if self.den == rhs.den {
            return Self::new(self.num + rhs.num, self.den);
        }
        if !F::exact() {
            return Self::new(
                self.num * rhs.den.clone() + rhs.num * self.den.clone(),
                self.den * rhs.den,
            );
        }
        // Henrici: only gcd(num, gcd(den_a, den_b)) can cancel.
        let g = self.den.gcd(&rhs.den);
        if g.degree() == Some(0) {
            return Self::coprime(
                self.num * rhs.den.clone() + rhs.num * self.den.clone(),
                self.den * rhs.den,
            );
        }
        let da = self.den.div_rem(&g).0;
        let db = rhs.den.div_rem(&g).0;
        let num = self.num * db.clone() + rhs.num * da.clone();
        let h = num.gcd(&g);
        let (num, g) = if h.degree().unwrap_or(0) > 0 {
            (num.div_rem(&h).0, g.div_rem(&h).0)
        } else {
            (num, g)
        };
        Self::coprime(num, da * db * g)
    }
}

impl<F: Scalar> Sub for RatFn<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Scalar> Neg for RatFn<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RatFn {
            num: -self.num,
            den: self.den,
        }
    }
}

impl<F: Scalar> Mul for RatFn<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.num.is_zero() || rhs.num.is_zero() {
            return Self::zero();
        }
        if self.is_polynomial() && rhs.is_polynomial() {
            return Self::from_poly(self.num * rhs.num);
        }
        if !F::exact() {
            return Self::new(self.num * rhs.num, self.den * rhs.den);
        }
        // cross-cancel: each numerator against the other denominator
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let cancel = |p: Poly<F>, g: &Poly<F>| {
            if g.degree().unwrap_or(0) > 0 {
                p.div_rem(g).0
            } else {
                p
            }
        };
        Self::coprime(
            cancel(self.num, &g1) * cancel(rhs.num, &g2),
            cancel(self.den, &g2) * cancel(rhs.den, &g1),
        )
    }
}

impl<F: Scalar> Div for RatFn<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.num.is_zero(), "division by the zero rational function");
        self * Self::coprime(rhs.den, rhs.num)
    }
}

impl<F: Scalar> fmt::Display for RatFn<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
