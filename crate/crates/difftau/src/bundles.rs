//! The bundles L_Y of a biorthogonal ensemble, realized by finite linear algebra.
//!
//! A section of L_Y(k·∞) is a pair (s₁, s₂): s₁ has polynomial entries of
//! degree ≤ n_i−1+k, and s₂ has entries Σ_x c_x ω_{2,i}(x)/(z−x) + P_i(z) with
//! deg P_i ≤ k−m_i−1 and order ≥ m_i+1−k at infinity. At y ∈ Y the residue
//! scalar is coupled, c_y = −Σ_j ω_{1,j}(y) s_{1,j}(y). That is the condition
//! (w′_y + w″_y(z−y))·s = 0 with w_y = (0; ω₂(y)), w′_y = (ω₁(y); 0) and
//! w″_y = (0; 1/ω_{2,1}(y), 0, …).

use crate::ensembles::{complement, gap_probability, gram_kernel, EnsembleSpec};
use crate::error::{Error, Result};
use crate::field::{Field, Matrix, Poly, RatFn, RatMat, Scalar};
use crate::painleve::{DPVIParams, DPVParams};

/// The bundle L_Y for a subset Y of the phase set, stored as sorted indices.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleModel<F> {
    spec: EnsembleSpec<F>,
    y: Vec<usize>,
}

impl<F: Scalar> BundleModel<F> {
    pub fn new(spec: EnsembleSpec<F>, mut y: Vec<usize>) -> Result<Self> {
        y.sort_unstable();
        y.dedup();
        if y.last().is_some_and(|&i| i >= spec.phase().len()) {
            return Err(Error::InvalidInput("Y is not a subset of X".into()));
        }
        Ok(BundleModel { spec, y })
    }

    pub fn spec(&self) -> &EnsembleSpec<F> {
        &self.spec
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    /// Exponents (n₁−1, …, n_p−1, −m₁−1, …, −m_q−1) of L_∅.
    pub fn splitting_type(&self) -> Vec<i64> {
        let first = self.spec.n().iter().map(|&n| n as i64 - 1);
        let second = self.spec.m().iter().map(|&m| -(m as i64) - 1);
        first.chain(second).collect()
    }

    pub fn rank(&self) -> usize {
        self.spec.n().len() + self.spec.m().len()
    }

    /// deg L_Y = −(p+q).
    pub fn degree(&self) -> i64 {
        self.splitting_type().iter().sum()
    }
}

/// A section in coordinates: s₁ polynomials, residue scalars c_x and the
/// polynomial parts of s₂.
#[derive(Clone, Debug, PartialEq)]
pub struct Section<F> {
    pub s1: Vec<Poly<F>>,
    /// (phase index, c_x) for every point where s₂ may have a pole.
    pub residues: Vec<(usize, F)>,
    pub poly_parts: Vec<Poly<F>>,
}

impl<F: Scalar> Section<F> {
    /// s₂ as rational functions.
    pub fn s2(&self, spec: &EnsembleSpec<F>) -> Vec<RatFn<F>> {
        spec.omega2()
            .iter()
            .zip(&self.poly_parts)
            .map(|(w2, part)| {
                self.residues
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .fold(RatFn::from_poly(part.clone()), |acc, (x, c)| {
                        acc + RatFn::simple_pole(c.clone() * w2[*x].clone(), spec.phase()[*x].clone())
                    })
            })
            .collect()
    }

    /// c_x, the residue of s₂ at x divided by w_x (zero if s₂ is regular there).
    pub fn residue_scalar(&self, x: usize) -> F {
        self.residues
            .iter()
            .find(|(i, _)| *i == x)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(F::zero)
    }

    /// Σ_j ω_{1,j}(x)·s_{1,j}(x).
    pub fn phi_value(&self, spec: &EnsembleSpec<F>, x: usize) -> F {
        let at = &spec.phase()[x];
        spec.omega1()
            .iter()
            .zip(&self.s1)
            .fold(F::zero(), |acc, (w1, s)| acc + w1[x].clone() * s.eval(at))
    }

    /// f_x(s) = (w′_x + w″_x(z−x))·s at z = x.
    pub fn f_functional(&self, spec: &EnsembleSpec<F>, x: usize) -> F {
        self.phi_value(spec, x) + self.residue_scalar(x)
    }

    /// g_x(s) = res_x s / w_x.
    pub fn g_functional(&self, x: usize) -> F {
        self.residue_scalar(x)
    }
}

/// A basis of H⁰(L_Y(k·∞)).
#[derive(Clone, Debug, PartialEq)]
pub struct SectionSpace<F> {
    pub k: usize,
    pub basis: Vec<Section<F>>,
}

impl<F> SectionSpace<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Global sections with coupled residues on `coupled` and free residues on
/// `free` (the upper modification at those points).
fn solve_sections<F: Scalar>(spec: &EnsembleSpec<F>, coupled: &[usize], free: &[usize], k: usize) -> Vec<Section<F>> {
    let n1: Vec<usize> = spec.n().iter().map(|&n| n + k).collect();
    let parts: Vec<usize> = spec.m().iter().map(|&m| k.saturating_sub(m)).collect();
    let s1_len: usize = n1.iter().sum();
    let total = s1_len + free.len() + parts.iter().sum::<usize>();
    let phase = spec.phase();

    // c_x as a linear form in the unknowns
    let residue_form = |x: usize| -> Vec<F> {
        let mut row = vec![F::zero(); total];
        if let Some(pos) = free.iter().position(|&f| f == x) {
            row[s1_len + pos] = F::one();
            return row;
        }
        let mut offset = 0;
        for (w1, &len) in spec.omega1().iter().zip(&n1) {
            let mut power = -w1[x].clone();
            for t in 0..len {
                row[offset + t] = power.clone();
                power = power * phase[x].clone();
            }
            offset += len;
        }
        row
    };

    let poles: Vec<usize> = {
        let mut v: Vec<usize> = coupled.iter().chain(free).copied().collect();
        v.sort_unstable();
        v
    };
    let forms: Vec<Vec<F>> = poles.iter().map(|&x| residue_form(x)).collect();
    let mut rows = Vec::new();
    for (w2, &m) in spec.omega2().iter().zip(spec.m()) {
        for t in 0..m.saturating_sub(k) {
            let mut row = vec![F::zero(); total];
            for (&x, form) in poles.iter().zip(&forms) {
                let mut weight = w2[x].clone();
                for _ in 0..t {
                    weight = weight * phase[x].clone();
                }
                for (r, f) in row.iter_mut().zip(form) {
                    *r = r.clone() + weight.clone() * f.clone();
                }
            }
            rows.push(row);
        }
    }
    let null = if rows.is_empty() {
        (0..total)
            .map(|i| (0..total).map(|j| if i == j { F::one() } else { F::zero() }).collect())
            .collect()
    } else {
        Matrix::from_rows(rows).nullspace()
    };

    null.into_iter()
        .map(|v| {
            let mut offset = 0;
            let s1 = n1
                .iter()
                .map(|&len| {
                    let p = Poly::new(v[offset..offset + len].to_vec());
                    offset += len;
                    p
                })
                .collect();
            let residues = poles
                .iter()
                .zip(&forms)
                .map(|(&x, form)| (x, form.iter().zip(&v).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())))
                .collect();
            offset = s1_len + free.len();
            let poly_parts = parts
                .iter()
                .map(|&len| {
                    let p = Poly::new(v[offset..offset + len].to_vec());
                    offset += len;
                    p
                })
                .collect();
            Section { s1, residues, poly_parts }
        })
        .collect()
}

/// Basis of H⁰(L_Y(k·∞)).
pub fn section_space<F: Scalar>(model: &BundleModel<F>, k: usize) -> SectionSpace<F> {
    SectionSpace {
        k,
        basis: solve_sections(&model.spec, &model.y, &[], k),
    }
}

/// L_Y ≅ O(−1)^{p+q}, i.e. H⁰(L_Y) = 0.
pub fn is_trivial<F: Scalar>(model: &BundleModel<F>) -> bool {
    section_space(model, 0).dim() == 0
}

/// Sections of L_Y^{up}: coupled on Y, free simple poles along w_x on X−Y.
pub fn upper_sections<F: Scalar>(model: &BundleModel<F>) -> Vec<Section<F>> {
    let gap = complement(model.spec.phase().len(), &model.y);
    solve_sections(&model.spec, &model.y, &gap, 0)
}

/// det(g_{X−Y}) / det(f_{X−Y}) on H⁰(L_Y^{up}) against det(1−K)|_{X−Y}.
pub fn det_equals_tau_check<F: Scalar>(model: &BundleModel<F>) -> Result<(F, F)> {
    let spec = &model.spec;
    gram_kernel(spec).map_err(|_| Error::NotTrivial)?;
    let gap = complement(spec.phase().len(), &model.y);
    let basis = upper_sections(model);
    if basis.len() != gap.len() {
        return Err(Error::NotTrivial);
    }
    let fm = Matrix::from_fn(gap.len(), gap.len(), |i, j| basis[j].f_functional(spec, gap[i]));
    let gm = Matrix::from_fn(gap.len(), gap.len(), |i, j| basis[j].g_functional(gap[i]));
    let det_f = fm.det();
    if det_f.negligible(1.0) {
        return Err(Error::NotTrivial);
    }
    let lhs = gm.det() / det_f;
    let rhs = gap_probability(spec, &model.y)?;
    Ok((lhs, rhs))
}

/// g_y/f_x on the one-dimensional H⁰(L_{X−{x}}^{up}); equals the entry
/// (1−K)[y][x], i.e. τ(L^{↑x,↓y})/τ(L_X).
pub fn kernel_entry_ratio<F: Scalar>(spec: &EnsembleSpec<F>, x: usize, y: usize) -> Result<F> {
    let size = spec.phase().len();
    if x >= size || y >= size {
        return Err(Error::InvalidInput("point outside X".into()));
    }
    let model = BundleModel::new(spec.clone(), (0..size).filter(|&i| i != x).collect())?;
    let basis = upper_sections(&model);
    if basis.len() != 1 {
        return Err(Error::NotTrivial);
    }
    let f = basis[0].f_functional(spec, x);
    if f.negligible(1.0) {
        return Err(Error::NotTrivial);
    }
    Ok(basis[0].g_functional(y) / f)
}

/// diag(1/ϖ₁, ϖ₂) for a rank-two ensemble with ratio-defined weights.
pub fn diagonal_connection<F: Scalar>(spec: &EnsembleSpec<F>) -> Result<RatMat<F>> {
    use crate::ensembles::Weight;
    match (spec.first_weights(), spec.second_weights()) {
        ([Weight::Ratio { ratio: r1, .. }], [Weight::Ratio { ratio: r2, .. }]) => {
            if r1.is_zero() {
                return Err(Error::InvalidInput("ϖ₁ vanishes identically".into()));
            }
            Ok(Matrix::diag(vec![RatFn::one() / r1.clone(), r2.clone()]))
        }
        _ => Err(Error::Unsupported("diagonal connection needs p = q = 1 ratio weights".into())),
    }
}

/// A_Y together with its global frame: Frame(z+1)·A_Y(z) = A_diag(z)·Frame(z).
#[derive(Clone, Debug, PartialEq)]
pub struct Trivialization<F> {
    pub matrix: RatMat<F>,
    pub frame: RatMat<F>,
    pub diag: RatMat<F>,
}

impl<F: Scalar> Trivialization<F> {
    /// Frame(z+1)·A_Y(z) − A_diag(z)·Frame(z).
    pub fn gauge_residual(&self) -> RatMat<F> {
        self.frame
            .shift_arg(&F::one())
            .mul(&self.matrix)
            .sub(&self.diag.mul(&self.frame))
    }
}

/// Which coefficient at infinity fixes the constant gauge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfinityLevel {
    /// A(∞) itself (dPV: eigenvalues ρ₁, ρ₂).
    Leading,
    /// The z⁻¹ coefficient when A(∞) = I (dPVI: eigenvalues d_k + Σb).
    Subleading,
}

/// Constant P whose columns are eigenvectors of the chosen coefficient at
/// infinity, in the order of `eigen`.
pub fn canonical_gauge<F: Scalar>(a: &RatMat<F>, level: InfinityLevel, eigen: &[F; 2]) -> Result<Matrix<F>> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::Unsupported("canonical gauge is implemented for 2×2 only".into()));
    }
    if eigen[0].close(&eigen[1], 1e-12) {
        return Err(Error::DegenerateFormalType("equal exponents".into()));
    }
    let exp = a.infinity_expansion(1)?;
    let c = match level {
        InfinityLevel::Leading => exp[0].clone(),
        InfinityLevel::Subleading => {
            let off = exp[0].sub(&Matrix::identity(2));
            // leading coefficients are quotients of long products; allow for their rounding
            if !off.entries().iter().all(|e| e.negligible(1e3)) {
                return Err(Error::DegenerateFormalType("A(∞) ≠ I".into()));
            }
            exp[1].clone()
        }
    };
    let scale = c.entries().iter().map(|x| x.magnitude()).fold(1.0f64, f64::max);
    let mut cols = Vec::new();
    for e in eigen {
        let m = c.sub(&Matrix::identity(2).scale(e));
        if !m.det().negligible(scale * scale * 1e5) {
            return Err(Error::DegenerateFormalType(format!("{e} is not an eigenvalue at infinity")));
        }
        // a 2×2 singular matrix [[x, y], [u, v]] kills (y, −x) and (v, −u)
        let first = vec![m.get(0, 1).clone(), -m.get(0, 0).clone()];
        let second = vec![m.get(1, 1).clone(), -m.get(1, 0).clone()];
        let size = |v: &[F]| v.iter().map(|x| x.magnitude()).fold(0.0f64, f64::max);
        let v = if size(&first) >= size(&second) { first } else { second };
        if v.iter().all(|x| x.negligible(scale)) {
            return Err(Error::DegenerateFormalType("scalar coefficient at infinity".into()));
        }
        cols.push(v);
    }
    let p = Matrix::from_fn(2, 2, |i, j| cols[j][i].clone());
    if p.det().negligible(1.0) {
        return Err(Error::DegenerateFormalType("eigenvectors are dependent".into()));
    }
    Ok(p)
}

/// P⁻¹·A·P for a constant P.
pub fn conjugate<F: Scalar>(a: &RatMat<F>, p: &Matrix<F>) -> Result<RatMat<F>> {
    let pi = RatMat::from_scalar(&p.inverse()?);
    Ok(pi.mul(a).mul(&RatMat::from_scalar(p)))
}

/// A_Y = Frame(z+1)⁻¹·A_diag·Frame(z) from a basis of H⁰(L_Y(∞)), conjugated
/// so that the z⁻¹ coefficient at infinity is diag(eigen).
pub fn trivialized_matrix<F: Scalar>(model: &BundleModel<F>, diag: &RatMat<F>, eigen: &[F; 2]) -> Result<Trivialization<F>> {
    if model.spec.n().len() != 1 || model.spec.m().len() != 1 {
        return Err(Error::Unsupported("trivialization needs p = q = 1".into()));
    }
    if !is_trivial(model) {
        return Err(Error::NotTrivial);
    }
    let space = section_space(model, 1);
    if space.dim() != 2 {
        return Err(Error::NotTrivial);
    }
    let cols: Vec<(RatFn<F>, RatFn<F>)> = space
        .basis
        .iter()
        .map(|s| (RatFn::from_poly(s.s1[0].clone()), s.s2(&model.spec).remove(0)))
        .collect();
    let frame = Matrix::from_rows(vec![
        vec![cols[0].0.clone(), cols[1].0.clone()],
        vec![cols[0].1.clone(), cols[1].1.clone()],
    ]);
    let shifted_inv = frame.shift_arg(&F::one()).mat_inverse()?;
    let raw = shifted_inv.mul(diag).mul(&frame);
    let p = canonical_gauge(&raw, InfinityLevel::Subleading, eigen)?;
    Ok(Trivialization {
        matrix: conjugate(&raw, &p)?,
        frame: frame.mul(&RatMat::from_scalar(&p)),
        diag: diag.clone(),
    })
}

/// Root q of the lower-left entry of the numerator A·Π(z−b_i), together
/// with the upper-left numerator entry at q.
///
/// Exact mode clears the denominator symbolically. Float rational functions
/// keep spurious common factors, so there the linear entry is fitted from
/// samples and checked at further points.
pub fn lower_left_root<F: Scalar>(a: &RatMat<F>, poles: &[F]) -> Result<(F, F)> {
    let den = Poly::from_roots(poles);
    if F::exact() {
        let num = a.times_poly(&den)?;
        let ll = num.get(1, 0).num();
        if ll.degree() != Some(1) {
            return Err(Error::Degenerate(format!("lower-left entry {ll} is not of degree one")));
        }
        let q = -ll.coeff(0) / ll.coeff(1);
        let a11 = num.get(0, 0).num().eval(&q);
        return Ok((q, a11));
    }
    let entry = |i: usize, j: usize, z: &F| -> Option<F> { a.get(i, j).eval(z).ok().map(|v| v * den.eval(z)) };
    let samples: Vec<(F, F)> = (0..40)
        .map(|k| F::from_ratio(37 * k as i64 + 11, 17))
        .filter_map(|z| entry(1, 0, &z).map(|v| (z, v)))
        .take(5)
        .collect();
    if samples.len() < 5 {
        return Err(Error::Degenerate("cannot sample the lower-left entry".into()));
    }
    let (z0, v0) = samples[0].clone();
    let (z1, v1) = samples[1].clone();
    let slope = (v1 - v0.clone()) / (z1 - z0.clone());
    let scale = samples.iter().map(|(_, v)| v.magnitude()).fold(1.0, f64::max);
    for (z, v) in &samples[2..] {
        let fit = v0.clone() + slope.clone() * (z.clone() - z0.clone());
        if !(fit - v.clone()).negligible(scale * 1e8) {
            return Err(Error::Degenerate("lower-left entry is not of degree one".into()));
        }
    }
    if slope.negligible(scale * 1e5) {
        return Err(Error::Degenerate("lower-left entry is constant".into()));
    }
    let q = z0 - v0 / slope;
    let a11 = entry(0, 0, &q).ok_or_else(|| Error::Degenerate("a₁₁ has a pole at q".into()))?;
    Ok((q, a11))
}

/// (q, r) of a canonically normalized dPVI matrix.
pub fn dpvi_coords<F: Scalar>(a: &RatMat<F>, params: &DPVIParams<F>) -> Result<(F, F)> {
    let (q, a11) = lower_left_root(a, &params.b)?;
    if a11.negligible(q.magnitude().powi(4) * 1e3) {
        return Err(Error::Degenerate("a₁₁(q) = 0".into()));
    }
    let [_, a2, a3] = params.a.clone();
    let [_, b2, b3] = params.b.clone();
    let top = (q.clone() - a2) * (q.clone() - a3) * (q.clone() - b2) * (q.clone() - b3);
    Ok((q.clone(), top / a11 - q))
}

/// (q, p) of a canonically normalized dPV matrix.
pub fn dpv_coords<F: Scalar>(a: &RatMat<F>, params: &DPVParams<F>) -> Result<(F, F)> {
    let (q, a11) = lower_left_root(a, &params.b)?;
    let [_, a2] = params.a.clone();
    let [_, b2] = params.b.clone();
    let den = (q.clone() - a2) * (q.clone() - b2);
    if den.negligible(1.0) {
        return Err(Error::Degenerate("(q−a₂)(q−b₂) = 0".into()));
    }
    Ok((q, a11 / den))
}

/// d_k = C₁[k][k]/ρ_k − Σb for a matrix normalized at the leading level.
pub fn dpv_formal_d<F: Scalar>(a: &RatMat<F>, rho: &[F; 2], b: &[F; 2]) -> Result<[F; 2]> {
    let c1 = a.infinity_expansion(1)?.remove(1);
    let sb = b[0].clone() + b[1].clone();
    Ok([
        c1.get(0, 0).clone() / rho[0].clone() - sb.clone(),
        c1.get(1, 1).clone() / rho[1].clone() - sb,
    ])
}
