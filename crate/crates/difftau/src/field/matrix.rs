use std::fmt;

use super::scalar::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over any field.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn diag(entries: Vec<T>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    /// u·vᵗ.
    pub fn outer(u: &[T], v: &[T]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i].clone() * v[j].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn try_map<U: Field>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        let data = self.data.iter().map(f).collect::<Result<Vec<U>>>()?;
        Ok(Matrix::new(self.rows, self.cols, data))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() + other.get(i, j).clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() - other.get(i, j).clone()
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = other.get(k, j);
                if b.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * b.clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, k| {
                    acc + self.get(i, k).clone() * v[k].clone()
                })
            })
            .collect()
    }

    /// AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    fn scale_hint(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    fn pivot_row(&self, col: usize, from: usize, scale: f64) -> Option<usize> {
        if T::exact() {
            (from..self.rows).find(|&r| !self.get(r, col).is_zero())
        } else {
            let best = (from..self.rows).max_by(|&a, &b| {
                self.get(a, col)
                    .magnitude()
                    .total_cmp(&self.get(b, col).magnitude())
            })?;
            (!self.get(best, col).negligible(scale)).then_some(best)
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let scale = self.scale_hint();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = m.pivot_row(c, r, scale) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = T::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
                if !T::exact() {
                    m.set(i, c, T::zero());
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the left null space (vectors y with yᵗA = 0).
    pub fn left_nullspace(&self) -> Vec<Vec<T>> {
        self.transpose().nullspace()
    }

    /// Determinant: fraction-free Bareiss elimination for exact fields,
    /// partial-pivot Gaussian elimination otherwise.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        if n == 1 {
            return self.data[0].clone();
        }
        if n == 2 {
            return self.get(0, 0).clone() * self.get(1, 1).clone()
                - self.get(0, 1).clone() * self.get(1, 0).clone();
        }
        if T::exact() {
            self.det_bareiss()
        } else {
            self.det_gauss()
        }
    }

    fn det_bareiss(&self) -> T {
        let n = self.rows;
        let mut m = self.clone();
        let mut sign_flip = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&r| !m.get(r, k).is_zero()) {
                    Some(p) => {
                        m.swap_rows(p, k);
                        sign_flip = !sign_flip;
                    }
                    None => return T::zero(),
                }
            }
            let pivot = m.get(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (pivot.clone() * m.get(i, j).clone()
                        - m.get(i, k).clone() * m.get(k, j).clone())
                        / prev.clone();
                    m.set(i, j, v);
                }
            }
            prev = pivot;
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign_flip {
            -d
        } else {
            d
        }
    }

    fn det_gauss(&self) -> T {
        let n = self.rows;
        let scale = self.scale_hint();
        let mut m = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let Some(p) = m.pivot_row(k, k, scale) else {
                return T::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let pivot = m.get(k, k).clone();
            det = det * pivot.clone();
            for i in k + 1..n {
                let f = m.get(i, k).clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = m.get(i, j).clone() - f.clone() * m.get(k, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        if n == 2 {
            let d = self.det();
            if d.negligible(self.scale_hint() * self.scale_hint()) {
                return Err(Error::SingularMatrix);
            }
            let inv = T::one() / d;
            return Ok(Self::from_rows(vec![
                vec![
                    self.get(1, 1).clone() * inv.clone(),
                    -self.get(0, 1).clone() * inv.clone(),
                ],
                vec![
                    -self.get(1, 0).clone() * inv.clone(),
                    self.get(0, 0).clone() * inv,
                ],
            ]));
        }
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix);
        }
        Ok(Self::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Unique solution of A x = b.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Err(Error::SingularMatrix);
        }
        if pivots.len() < self.cols {
            return Err(Error::SingularMatrix);
        }
        Ok((0..self.cols).map(|i| r.get(i, self.cols).clone()).collect())
    }
}

impl<T: Field + fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// ⟨u, v⟩ = Σ u_i v_i.
pub fn dot<T: Field>(u: &[T], v: &[T]) -> T {
    assert_eq!(u.len(), v.len(), "pairing of vectors of different length");
    u.iter()
        .zip(v)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

pub fn scale_vec<T: Field>(v: &[T], c: &T) -> Vec<T> {
    v.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn is_zero_vec<T: Field>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_zero())
}
