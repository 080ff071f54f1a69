use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

/// Field operations shared by scalars and rational functions.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// True when arithmetic is exact (no rounding).
    fn exact() -> bool;
    /// Size used for pivot selection and tolerance scaling.
    fn magnitude(&self) -> f64;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Zero test relative to `scale`; exact fields ignore the scale.
    fn negligible(&self, scale: f64) -> bool {
        if Self::exact() {
            self.is_zero()
        } else {
            self.magnitude() <= 1e-11 * scale.max(1.0)
        }
    }
}

/// Ground-field scalars: exact rationals or doubles.
pub trait Scalar: Field + fmt::Display {
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn to_f64(&self) -> f64;
    /// Square root if it exists in the field.
    fn sqrt(&self) -> Option<Self>;
    /// Equality for exact fields, relative closeness for floats.
    fn close(&self, other: &Self, tol: f64) -> bool;
    /// Serialized form: "num/den" for exact values, shortest round-trip decimal otherwise.
    fn render(&self) -> String;
    fn parse_scalar(s: &str) -> Option<Self>;
    /// The value as an integer, if it is one.
    fn to_integer(&self) -> Option<i64>;

    /// Greatest common divisor of two coefficient vectors (constant term
    /// first, no trailing zeros, not both empty), up to a scalar factor.
    fn poly_gcd(a: &[Self], b: &[Self]) -> Vec<Self> {
        euclid_gcd(a, b)
    }
}

fn trim<F: Field>(mut v: Vec<F>) -> Vec<F> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Plain Euclidean gcd over a field.
fn euclid_gcd<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let db = b.len() - 1;
        let inv = F::one() / b[db].clone();
        while a.len() > db {
            let k = a.len() - 1 - db;
            let c = a[a.len() - 1].clone() * inv.clone();
            for (i, bi) in b.iter().enumerate() {
                a[k + i] = a[k + i].clone() - c.clone() * bi.clone();
            }
            a.pop();
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|c| c / &g).collect()
}

fn to_integer_poly(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    primitive(v.iter().map(|c| c.numer() * (&l / c.denom())).collect())
}

/// Primitive pseudo-remainder sequence over the integers.
fn integer_gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (to_integer_poly(a), to_integer_poly(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let db = b.len() - 1;
        let lb = b[db].clone();
        while a.len() > db {
            let k = a.len() - 1 - db;
            let la = a[a.len() - 1].clone();
            for c in a.iter_mut() {
                *c *= &lb;
            }
            for (i, bi) in b.iter().enumerate() {
                a[k + i] -= &la * bi;
            }
            a.pop();
            while a.last().is_some_and(|c| c.is_zero()) {
                a.pop();
            }
            a = primitive(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.into_iter().map(Q::from_integer).collect()
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn exact() -> bool {
        true
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

impl Scalar for Q {
    fn from_ratio(num: i64, den: i64) -> Self {
        Q::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sqrt(&self) -> Option<Self> {
        let n = isqrt_exact(self.numer())?;
        let d = isqrt_exact(self.denom())?;
        Some(Q::new(n, d))
    }
    fn close(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_scalar(s: &str) -> Option<Self> {
        parse_rational(s)
    }
    fn poly_gcd(a: &[Self], b: &[Self]) -> Vec<Self> {
        integer_gcd(a, b)
    }
    fn to_integer(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn exact() -> bool {
        false
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Option<Self> {
        if *self >= 0.0 {
            Some(f64::sqrt(*self))
        } else {
            None
        }
    }
    fn close(&self, other: &Self, tol: f64) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= tol * scale
    }
    fn render(&self) -> String {
        format!("{:e}", self)
    }
    fn parse_scalar(s: &str) -> Option<Self> {
        parse_rational(s).map(|q| Self::from_q(&q))
    }
    fn to_integer(&self) -> Option<i64> {
        (self.fract() == 0.0 && self.abs() < 9.0e15).then_some(*self as i64)
    }
    fn poly_gcd(a: &[Self], b: &[Self]) -> Vec<Self> {
        approx_gcd(a, b)
    }
}

/// Relative size below which a float remainder counts as zero.
const GCD_TOL: f64 = 1e-9;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    v.into_iter().map(|x| x / n).collect()
}

/// Largest relative remainder accepted when checking a candidate gcd.
const DIVIDES_TOL: f64 = 1e-7;

/// Euclid on max-norm normalized coefficients; remainders below `GCD_TOL`
/// end the sequence. A candidate that does not divide both inputs is
/// rejected (the inputs are treated as coprime), since cancelling a factor
/// that is not common corrupts the function.
fn approx_gcd(a: &[f64], b: &[f64]) -> Vec<f64> {
    let g = euclid_candidate(a, b);
    if g.len() > 1 && !(divides(&g, a) && divides(&g, b)) {
        return vec![1.0];
    }
    g
}

fn divides(g: &[f64], p: &[f64]) -> bool {
    let mut r = unit(p.to_vec());
    let dg = g.len() - 1;
    while r.len() > dg {
        let k = r.len() - 1 - dg;
        let c = r[r.len() - 1] / g[dg];
        for (i, gi) in g.iter().enumerate() {
            r[k + i] -= c * gi;
        }
        r.pop();
    }
    r.iter().all(|x| x.abs() <= DIVIDES_TOL)
}

fn euclid_candidate(a: &[f64], b: &[f64]) -> Vec<f64> {
    let (mut a, mut b) = (unit(a.to_vec()), unit(b.to_vec()));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let db = b.len() - 1;
        let mut r = a;
        while r.len() > db {
            let k = r.len() - 1 - db;
            let c = r[r.len() - 1] / b[db];
            for (i, bi) in b.iter().enumerate() {
                r[k + i] -= c * bi;
            }
            r.pop();
        }
        while r.last().is_some_and(|x| x.abs() <= GCD_TOL) {
            r.pop();
        }
        a = b;
        b = if r.is_empty() { r } else { unit(r) };
    }
    a
}

/// Parses "p", "p/q" or a decimal literal such as "-1.25" into an exact rational.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if Zero::is_zero(&d) {
            return None;
        }
        return Some(n / d);
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_val: BigInt = frac.parse().ok()?;
        let mag = Q::new(whole * &scale + frac_val, scale);
        return Some(if neg { -mag } else { mag });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

