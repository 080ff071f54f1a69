//! Discrete biorthogonal ensembles, projection kernels and gap probabilities.

use crate::error::{Error, Result};
use crate::field::{Matrix, RatFn, Scalar};

/// A weight function on the phase set.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight<F> {
    /// Explicit values, one per phase point.
    Table(Vec<F>),
    /// ω(x₀) = anchor at the first phase point and ω(x+1) = ϖ(x)·ω(x).
    Ratio { anchor: F, ratio: RatFn<F> },
}

/// Phase set, two weight families and multi-indices n, m with Σn = Σm = N.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec<F> {
    phase: Vec<F>,
    first: Vec<Weight<F>>,
    second: Vec<Weight<F>>,
    n: Vec<usize>,
    m: Vec<usize>,
    omega1: Vec<Vec<F>>,
    omega2: Vec<Vec<F>>,
}

/// Projection kernel K on the phase set with Gram data.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<F> {
    /// K(x, y), indexed by phase positions.
    pub k: Matrix<F>,
    /// M = G⁻ᵗ.
    pub m: Matrix<F>,
    /// G_ij = ⟨φ_i, ψ_j⟩.
    pub gram: Matrix<F>,
}

fn resolve<F: Scalar>(phase: &[F], w: &Weight<F>) -> Result<Vec<F>> {
    let table = match w {
        Weight::Table(t) => {
            if t.len() != phase.len() {
                return Err(Error::InvalidInput(format!(
                    "weight table has {} entries for {} phase points",
                    t.len(),
                    phase.len()
                )));
            }
            t.clone()
        }
        Weight::Ratio { anchor, ratio } => {
            let x0 = &phase[0];
            phase
                .iter()
                .map(|x| {
                    let steps = (x.clone() - x0.clone()).to_integer().ok_or_else(|| {
                        Error::InvalidInput(format!("{x} is not an integer step from {x0}"))
                    })?;
                    let mut value = anchor.clone();
                    let mut t = x0.clone();
                    for _ in 0..steps.max(0) {
                        value = value * ratio.eval(&t)?;
                        t = t + F::one();
                    }
                    for _ in 0..(-steps).max(0) {
                        t = t - F::one();
                        let r = ratio.eval(&t)?;
                        if r.is_zero() {
                            return Err(Error::InvalidInput(format!("weight ratio vanishes at {t}")));
                        }
                        value = value / r;
                    }
                    Ok(value)
                })
                .collect::<Result<Vec<F>>>()?
        }
    };
    if let Some(i) = table.iter().position(|v| v.is_zero()) {
        return Err(Error::InvalidInput(format!("weight vanishes at {}", phase[i])));
    }
    Ok(table)
}

impl<F: Scalar> EnsembleSpec<F> {
    pub fn new(
        phase: Vec<F>,
        first: Vec<Weight<F>>,
        second: Vec<Weight<F>>,
        n: Vec<usize>,
        m: Vec<usize>,
    ) -> Result<Self> {
        if phase.is_empty() {
            return Err(Error::InvalidInput("empty phase set".into()));
        }
        for i in 0..phase.len() {
            if phase[i + 1..].contains(&phase[i]) {
                return Err(Error::InvalidInput(format!("repeated phase point {}", phase[i])));
            }
        }
        if first.len() != n.len() || second.len() != m.len() {
            return Err(Error::InvalidInput("one multi-index entry per weight family".into()));
        }
        if n.iter().sum::<usize>() != m.iter().sum::<usize>() {
            return Err(Error::InvalidInput("Σn must equal Σm".into()));
        }
        let omega1 = first.iter().map(|w| resolve(&phase, w)).collect::<Result<_>>()?;
        let omega2 = second.iter().map(|w| resolve(&phase, w)).collect::<Result<_>>()?;
        Ok(EnsembleSpec {
            phase,
            first,
            second,
            n,
            m,
            omega1,
            omega2,
        })
    }

    /// Hahn ensemble on {0, …, M}: ϖ₁ = (α+z+1)/(z+1), ϖ₂ = (z−M)/(z−M−β),
    /// both anchored at ω(0) = 1, with n = m = (N).
    pub fn hahn(particles: usize, big_m: usize, alpha: F, beta: F) -> Result<Self> {
        use crate::field::Poly;
        let bm = F::from_i64(big_m as i64);
        let w1 = RatFn::new(
            Poly::new(vec![alpha + F::one(), F::one()]),
            Poly::new(vec![F::one(), F::one()]),
        );
        let w2 = RatFn::new(Poly::linear(bm.clone()), Poly::linear(bm + beta));
        Self::new(
            (0..=big_m).map(|x| F::from_i64(x as i64)).collect(),
            vec![Weight::Ratio { anchor: F::one(), ratio: w1 }],
            vec![Weight::Ratio { anchor: F::one(), ratio: w2 }],
            vec![particles],
            vec![particles],
        )
    }

    pub fn phase(&self) -> &[F] {
        &self.phase
    }

    pub fn first_weights(&self) -> &[Weight<F>] {
        &self.first
    }

    pub fn second_weights(&self) -> &[Weight<F>] {
        &self.second
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    /// Resolved tables ω_{1,i}(x).
    pub fn omega1(&self) -> &[Vec<F>] {
        &self.omega1
    }

    /// Resolved tables ω_{2,i}(x).
    pub fn omega2(&self) -> &[Vec<F>] {
        &self.omega2
    }

    /// Number of particles N.
    pub fn particles(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn index_of(&self, x: &F) -> Option<usize> {
        self.phase.iter().position(|p| p == x)
    }

    /// Copy with the i-th first-family weight multiplied by c.
    pub fn scale_first(&self, i: usize, c: &F) -> Result<Self> {
        let mut first = self.first.clone();
        first[i] = Weight::Table(self.omega1[i].iter().map(|v| v.clone() * c.clone()).collect());
        Self::new(self.phase.clone(), first, self.second.clone(), self.n.clone(), self.m.clone())
    }

    /// Copy with the i-th second-family weight multiplied by c.
    pub fn scale_second(&self, i: usize, c: &F) -> Result<Self> {
        let mut second = self.second.clone();
        second[i] = Weight::Table(self.omega2[i].iter().map(|v| v.clone() * c.clone()).collect());
        Self::new(self.phase.clone(), self.first.clone(), second, self.n.clone(), self.m.clone())
    }
}

/// A gap specification: either the allowed set Y or the gap X − Y as a
/// union of integral segments [a, b] = {a, a+1, …, b}.
#[derive(Clone, Debug, PartialEq)]
pub enum GapSet<F> {
    Allowed(Vec<F>),
    Segments(Vec<(F, F)>),
}

/// Sorted phase indices of the allowed set Y.
pub fn allowed_indices<F: Scalar>(spec: &EnsembleSpec<F>, gap: &GapSet<F>) -> Result<Vec<usize>> {
    match gap {
        GapSet::Allowed(ys) => {
            let mut idx = ys
                .iter()
                .map(|y| {
                    spec.index_of(y)
                        .ok_or_else(|| Error::InvalidInput(format!("{y} is not a phase point")))
                })
                .collect::<Result<Vec<_>>>()?;
            idx.sort_unstable();
            idx.dedup();
            Ok(idx)
        }
        GapSet::Segments(segs) => {
            let mut gap_idx: Vec<usize> = Vec::new();
            for (a, b) in segs {
                let len = (b.clone() - a.clone())
                    .to_integer()
                    .filter(|l| *l >= 0)
                    .ok_or_else(|| Error::InvalidInput(format!("[{a}, {b}] is not an integral segment")))?;
                let mut x = a.clone();
                for _ in 0..=len {
                    let i = spec
                        .index_of(&x)
                        .ok_or_else(|| Error::InvalidInput(format!("segment point {x} is not in X")))?;
                    if gap_idx.contains(&i) {
                        return Err(Error::InvalidInput("segments overlap".into()));
                    }
                    gap_idx.push(i);
                    x = x + F::one();
                }
            }
            Ok((0..spec.phase.len()).filter(|i| !gap_idx.contains(i)).collect())
        }
    }
}

/// Indices of X − Y.
pub fn complement(size: usize, allowed: &[usize]) -> Vec<usize> {
    (0..size).filter(|i| !allowed.contains(i)).collect()
}

/// φ_{i,j}(x) = ω_{1,i}(x)·x^j (j < n_i) and ψ_{i,j}(x) = ω_{2,i}(x)·x^j (j < m_i),
/// as tables over X in (i, then j) order.
pub fn build_functions<F: Scalar>(spec: &EnsembleSpec<F>) -> (Vec<Vec<F>>, Vec<Vec<F>>) {
    let family = |tables: &[Vec<F>], degrees: &[usize]| -> Vec<Vec<F>> {
        tables
            .iter()
            .zip(degrees)
            .flat_map(|(w, &deg)| {
                (0..deg).map(move |j| {
                    w.iter()
                        .zip(&spec.phase)
                        .map(|(wx, x)| (0..j).fold(wx.clone(), |acc, _| acc * x.clone()))
                        .collect::<Vec<F>>()
                })
            })
            .collect()
    };
    (family(&spec.omega1, &spec.n), family(&spec.omega2, &spec.m))
}

/// K(x, y) = Σ M_ij φ_i(x) ψ_j(y) with M = ‖⟨φ_i, ψ_j⟩‖⁻ᵗ.
pub fn gram_kernel<F: Scalar>(spec: &EnsembleSpec<F>) -> Result<KernelMatrix<F>> {
    let (phi, psi) = build_functions(spec);
    let nn = phi.len();
    let size = spec.phase.len();
    let phi_m = Matrix::from_rows(phi);
    let psi_m = Matrix::from_rows(psi);
    let gram = phi_m.mul(&psi_m.transpose());
    if nn == 0 {
        return Ok(KernelMatrix {
            k: Matrix::zeros(size, size),
            m: gram.clone(),
            gram,
        });
    }
    let m = gram
        .inverse()
        .map_err(|_| Error::BasicAssumptionFails)?
        .transpose();
    let k = phi_m.transpose().mul(&m).mul(&psi_m);
    Ok(KernelMatrix { k, m, gram })
}

/// det(1 − K) restricted to X − Y, for the allowed index set Y.
pub fn gap_probability<F: Scalar>(spec: &EnsembleSpec<F>, allowed: &[usize]) -> Result<F> {
    let kernel = gram_kernel(spec)?;
    Ok(gap_from_kernel(&kernel, allowed))
}

/// det(1 − K)|_{X−Y} for a precomputed kernel.
pub fn gap_from_kernel<F: Scalar>(kernel: &KernelMatrix<F>, allowed: &[usize]) -> F {
    let gap = complement(kernel.k.rows(), allowed);
    let sub = kernel.k.submatrix(&gap, &gap);
    Matrix::identity(gap.len()).sub(&sub).det()
}

/// Default cap on |X|^N for the brute-force oracle.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// (1/Z)·Σ over N-tuples in Y of det[φ_i(x_j)]·det[ψ_i(x_j)], for every
/// allowed set in `sets`, with Z the same sum over X.
pub fn brute_force_gaps<F: Scalar>(spec: &EnsembleSpec<F>, sets: &[Vec<usize>], cap: u128) -> Result<Vec<F>> {
    let (phi, psi) = build_functions(spec);
    let nn = phi.len();
    let size = spec.phase.len();
    let terms = (size as u128).checked_pow(nn as u32).unwrap_or(u128::MAX);
    if terms > cap {
        return Err(Error::InfeasibleSize { terms, cap });
    }
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(sets.len());
    for s in sets {
        let mut mask = vec![false; size];
        for &i in s {
            mask[i] = true;
        }
        masks.push(mask);
    }
    let mut z = F::zero();
    let mut sums = vec![F::zero(); sets.len()];
    let mut tuple = vec![0usize; nn];
    loop {
        let distinct = (0..nn).all(|a| (a + 1..nn).all(|b| tuple[a] != tuple[b]));
        if distinct {
            let dphi = Matrix::from_fn(nn, nn, |i, j| phi[i][tuple[j]].clone()).det();
            if !dphi.is_zero() {
                let dpsi = Matrix::from_fn(nn, nn, |i, j| psi[i][tuple[j]].clone()).det();
                let v = dphi * dpsi;
                z = z + v.clone();
                for (sum, mask) in sums.iter_mut().zip(&masks) {
                    if tuple.iter().all(|&t| mask[t]) {
                        *sum = sum.clone() + v.clone();
                    }
                }
            }
        }
        // next tuple in lexicographic order
        let mut k = nn;
        loop {
            if k == 0 {
                if z.negligible(1.0) && !F::exact() || z.is_zero() {
                    return Err(Error::BasicAssumptionFails);
                }
                return Ok(sums.into_iter().map(|s| s / z.clone()).collect());
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < size {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// Brute-force oracle for a single allowed set.
pub fn brute_force_gap<F: Scalar>(spec: &EnsembleSpec<F>, allowed: &[usize], cap: u128) -> Result<F> {
    Ok(brute_force_gaps(spec, &[allowed.to_vec()], cap)?.remove(0))
}
