//! Difference Painlevé V and VI recurrences and their τ second ratios.
//!
//! Every step shifts (a₁, b₁) ↦ (a₁−1, b₁−1) and (d₁, d₂) ↦ (d₁+1, d₂+1),
//! keeping the formal type at infinity fixed. All formulas use the
//! parameters of the state before the shift.

use crate::error::{Error, Result};
use crate::field::Scalar;

/// Tolerance used to compare the two τ expressions in float mode.
pub const FLOAT_TOL: f64 = 1e-8;

fn ratio<F: Scalar>(num: F, den: F, what: &str) -> Result<F> {
    if den.negligible(num.magnitude()) {
        Err(Error::SingularStep(what.to_string()))
    } else {
        Ok(num / den)
    }
}

fn agree<F: Scalar>(e1: F, e2: F, what: &str) -> Result<F> {
    if e1.close(&e2, FLOAT_TOL) {
        Ok(e1)
    } else {
        Err(Error::InternalMismatch(format!("{what}: {e1} vs {e2}")))
    }
}

fn balanced<F: Scalar>(terms: impl IntoIterator<Item = F>) -> Result<()> {
    let (sum, scale) = terms
        .into_iter()
        .fold((F::zero(), 1.0f64), |(s, m), t| {
            let m = m.max(t.magnitude());
            (s + t, m)
        });
    if sum.negligible(scale) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("d₁+d₂+Σa+Σb = {sum}, expected 0")))
    }
}

/// Parameters (a₁, a₂), (b₁, b₂), (d₁, d₂), (ρ₁, ρ₂) of difference PV.
#[derive(Clone, Debug, PartialEq)]
pub struct DPVParams<F> {
    pub a: [F; 2],
    pub b: [F; 2],
    pub d: [F; 2],
    pub rho: [F; 2],
}

/// Parameters (a₁, a₂, a₃), (b₁, b₂, b₃), (d₁, d₂) of difference PVI.
#[derive(Clone, Debug, PartialEq)]
pub struct DPVIParams<F> {
    pub a: [F; 3],
    pub b: [F; 3],
    pub d: [F; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct DPVState<F> {
    pub q: F,
    pub p: F,
    pub params: DPVParams<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DPVIState<F> {
    pub q: F,
    pub r: F,
    pub params: DPVIParams<F>,
}

impl<F: Scalar> DPVParams<F> {
    /// Validates d₁+d₂+a₁+a₂+b₁+b₂ = 0.
    pub fn new(a: [F; 2], b: [F; 2], d: [F; 2], rho: [F; 2]) -> Result<Self> {
        balanced(a.iter().chain(&b).chain(&d).cloned())?;
        Ok(DPVParams { a, b, d, rho })
    }

    /// (a₁−1, b₁−1, d₁+1, d₂+1).
    pub fn shifted(&self) -> Self {
        self.moved(F::one())
    }

    /// (a₁+1, b₁+1, d₁−1, d₂−1).
    pub fn unshifted(&self) -> Self {
        self.moved(-F::one())
    }

    fn moved(&self, by: F) -> Self {
        let mut out = self.clone();
        out.a[0] = out.a[0].clone() - by.clone();
        out.b[0] = out.b[0].clone() - by.clone();
        out.d = [out.d[0].clone() + by.clone(), out.d[1].clone() + by];
        out
    }
}

impl<F: Scalar> DPVIParams<F> {
    /// Validates d₁+d₂+Σa+Σb = 0.
    pub fn new(a: [F; 3], b: [F; 3], d: [F; 2]) -> Result<Self> {
        balanced(a.iter().chain(&b).chain(&d).cloned())?;
        Ok(DPVIParams { a, b, d })
    }

    pub fn shifted(&self) -> Self {
        self.moved(F::one())
    }

    pub fn unshifted(&self) -> Self {
        self.moved(-F::one())
    }

    fn moved(&self, by: F) -> Self {
        let mut out = self.clone();
        out.a[0] = out.a[0].clone() - by.clone();
        out.b[0] = out.b[0].clone() - by.clone();
        out.d = [out.d[0].clone() + by.clone(), out.d[1].clone() + by];
        out
    }

    /// Σb.
    pub fn b_sum(&self) -> F {
        self.b[0].clone() + self.b[1].clone() + self.b[2].clone()
    }
}

fn dpv_p_numerator<F: Scalar>(prm: &DPVParams<F>, qn: &F) -> Result<F> {
    let [a1, a2] = prm.a.clone();
    let [b1, b2] = prm.b.clone();
    let [r1, r2] = prm.rho.clone();
    let top = (qn.clone() - a1 + F::one()) * (qn.clone() - b1 + F::one()) * r1 * r2;
    ratio(top, (qn.clone() - a2) * (qn.clone() - b2), "(q′−a₂)(q′−b₂)")
}

fn dpv_q_sum<F: Scalar>(prm: &DPVParams<F>, p: &F) -> Result<F> {
    let [_, a2] = prm.a.clone();
    let [_, b2] = prm.b.clone();
    let [d1, d2] = prm.d.clone();
    let [r1, r2] = prm.rho.clone();
    let s = a2.clone() + b2.clone();
    let t1 = ratio(r1.clone() * (d1 + s.clone()), p.clone() - r1, "p−ρ₁")?;
    let t2 = ratio(r2.clone() * (d2 + s.clone() + F::one()), p.clone() - r2, "p−ρ₂")?;
    Ok(s + t1 + t2)
}

/// One dPV step: (q, p) ↦ (q′, p′) with the parameters shifted.
pub fn dpv_step<F: Scalar>(state: &DPVState<F>) -> Result<DPVState<F>> {
    let prm = &state.params;
    if state.p.is_zero() {
        return Err(Error::SingularStep("p".into()));
    }
    let qn = dpv_q_sum(prm, &state.p)? - state.q.clone();
    let pn = ratio(dpv_p_numerator(prm, &qn)?, state.p.clone(), "p")?;
    Ok(DPVState { q: qn, p: pn, params: prm.shifted() })
}

/// Inverse of [`dpv_step`], solved from the same two equations.
pub fn dpv_step_inverse<F: Scalar>(state: &DPVState<F>) -> Result<DPVState<F>> {
    let prm = state.params.unshifted();
    if state.p.is_zero() {
        return Err(Error::SingularStep("p′".into()));
    }
    let p = ratio(dpv_p_numerator(&prm, &state.q)?, state.p.clone(), "p′")?;
    let q = dpv_q_sum(&prm, &p)? - state.q.clone();
    Ok(DPVState { q, p, params: prm })
}

fn dpvi_first<F: Scalar>(prm: &DPVIParams<F>, r: &F) -> Result<F> {
    let [a1, a2, a3] = prm.a.clone();
    let [b1, b2, b3] = prm.b.clone();
    let [d1, d2] = prm.d.clone();
    let top = (r.clone() + a2) * (r.clone() + a3) * (r.clone() + b2) * (r.clone() + b3);
    let c = a1 + b1;
    let bottom = (r.clone() + F::one() - c.clone() - d1) * (r.clone() - c - d2);
    ratio(top, bottom, "(r+1−a₁−b₁−d₁)(r−a₁−b₁−d₂)")
}

fn dpvi_second<F: Scalar>(prm: &DPVIParams<F>, qn: &F) -> Result<F> {
    let [a1, a2, a3] = prm.a.clone();
    let [b1, b2, b3] = prm.b.clone();
    let top = (qn.clone() - a2) * (qn.clone() - a3) * (qn.clone() - b2) * (qn.clone() - b3);
    let bottom = (qn.clone() - a1 + F::one()) * (qn.clone() - b1 + F::one());
    ratio(top, bottom, "(q′−a₁+1)(q′−b₁+1)")
}

/// q′ from the first dPVI equation alone.
pub fn dpvi_next_q<F: Scalar>(state: &DPVIState<F>) -> Result<F> {
    let (q, r) = (&state.q, &state.r);
    Ok(ratio(dpvi_first(&state.params, r)?, q.clone() + r.clone(), "q+r")? - r.clone())
}

/// One dPVI step: (q, r) ↦ (q′, r′) with the parameters shifted.
pub fn dpvi_step<F: Scalar>(state: &DPVIState<F>) -> Result<DPVIState<F>> {
    let prm = &state.params;
    let r = &state.r;
    let qn = dpvi_next_q(state)?;
    let rn = ratio(dpvi_second(prm, &qn)?, qn.clone() + r.clone(), "q′+r")? - qn.clone();
    Ok(DPVIState { q: qn, r: rn, params: prm.shifted() })
}

/// Inverse of [`dpvi_step`], solved from the same two equations.
pub fn dpvi_step_inverse<F: Scalar>(state: &DPVIState<F>) -> Result<DPVIState<F>> {
    let prm = state.params.unshifted();
    let r = dpvi_r_before(&prm, &state.q, &state.r)?;
    let q = ratio(dpvi_first(&prm, &r)?, state.q.clone() + r.clone(), "q′+r")? - r.clone();
    Ok(DPVIState { q, r, params: prm })
}

/// r recovered from the stepped pair (q′, r′) and the unshifted parameters.
pub fn dpvi_r_before<F: Scalar>(prm: &DPVIParams<F>, qn: &F, rn: &F) -> Result<F> {
    Ok(ratio(dpvi_second(prm, qn)?, qn.clone() + rn.clone(), "q′+r′")? - qn.clone())
}

/// Both τ expressions for dPV, evaluated on a state and its successor.
pub fn tau_second_dpv_pair<F: Scalar>(state: &DPVState<F>, stepped: &DPVState<F>) -> Result<(F, F)> {
    let prm = &state.params;
    let [a1, a2] = prm.a.clone();
    let [b1, b2] = prm.b.clone();
    let [r1, r2] = prm.rho.clone();
    let (qn, pn) = (stepped.q.clone(), stepped.p.clone());
    let c = (a2.clone() - a1.clone() + F::one()) * (b2.clone() - b1.clone() + F::one());
    let x = (qn.clone() - a1 + F::one()) * (qn.clone() - b1 + F::one());
    let y = (qn.clone() - a2) * (qn - b2);
    let e1 = ratio(
        (pn.clone() - r1.clone()) * (r1.clone() * x - pn.clone() * y.clone()),
        r1.clone() * c.clone() * pn.clone(),
        "ρ₁(a₂−a₁+1)(b₂−b₁+1)p′",
    )?;
    let e2 = ratio(
        (pn - r1.clone()) * (state.p.clone() - r2.clone()) * y,
        r1 * r2 * c,
        "ρ₁ρ₂(a₂−a₁+1)(b₂−b₁+1)",
    )?;
    Ok((e1, e2))
}

/// D²τ = τ(shifted twice)·τ/τ(shifted)² for dPV, from both expressions.
pub fn tau_second_dpv<F: Scalar>(state: &DPVState<F>, stepped: &DPVState<F>) -> Result<F> {
    let (e1, e2) = tau_second_dpv_pair(state, stepped)?;
    agree(e1, e2, "dPV τ expressions")
}

/// Both τ expressions for dPVI, evaluated on a state and its successor.
pub fn tau_second_dpvi_pair<F: Scalar>(state: &DPVIState<F>, stepped: &DPVIState<F>) -> Result<(F, F)> {
    let prm = &state.params;
    let [a1, a2, a3] = prm.a.clone();
    let [b1, b2, b3] = prm.b.clone();
    let [d1, d2] = prm.d.clone();
    let (qn, rn) = (stepped.q.clone(), stepped.r.clone());
    let one = F::one();
    let den = (a1.clone() - a2.clone() - one.clone())
        * (a1.clone() - a3.clone() - one.clone())
        * (b1.clone() - b2.clone() - one.clone())
        * (b1.clone() - b3.clone() - one.clone());
    let c = a1.clone() + b1.clone();
    let lead = rn.clone() - c.clone() - d2 + one.clone();
    let x = (qn.clone() - a1 + one.clone()) * (qn.clone() - b1 + one.clone());
    let p = (qn.clone() - a2) * (qn.clone() - a3) * (qn.clone() - b2) * (qn.clone() - b3);
    let inner = p - x.clone() * (qn.clone() + d1.clone() + c.clone() - one.clone()) * (qn.clone() + rn.clone());
    let e1 = ratio(
        lead.clone() * inner,
        (qn + rn) * den.clone(),
        "(q′+r′)(a₁−a₂−1)(a₁−a₃−1)(b₁−b₂−1)(b₁−b₃−1)",
    )?;
    let e2 = ratio(
        lead * (state.r.clone() - c - d1 + one) * x,
        den,
        "(a₁−a₂−1)(a₁−a₃−1)(b₁−b₂−1)(b₁−b₃−1)",
    )?;
    Ok((e1, e2))
}

/// D²τ for dPVI from both expressions.
pub fn tau_second_dpvi<F: Scalar>(state: &DPVIState<F>, stepped: &DPVIState<F>) -> Result<F> {
    let (e1, e2) = tau_second_dpvi_pair(state, stepped)?;
    agree(e1, e2, "dPVI τ expressions")
}

/// Hahn parameters at s: a = (s, −1, M), b = (s, −α−1, β+M),
/// d₁ = −α−N−Σb, d₂ = β+N−Σb.
pub fn hahn_dpvi_params<F: Scalar>(n: usize, big_m: usize, alpha: &F, beta: &F, s: i64) -> DPVIParams<F> {
    let sf = F::from_i64(s);
    let mf = F::from_i64(big_m as i64);
    let nf = F::from_i64(n as i64);
    let b = [sf.clone(), -alpha.clone() - F::one(), beta.clone() + mf.clone()];
    let sb = b[0].clone() + b[1].clone() + b[2].clone();
    DPVIParams {
        a: [sf, -F::one(), mf],
        d: [-alpha.clone() - nf.clone() - sb.clone(), beta.clone() + nf - sb],
        b,
    }
}

/// Formal exponents (−α−N, β+N) of the Hahn connection at infinity.
pub fn hahn_exponents<F: Scalar>(n: usize, alpha: &F, beta: &F) -> [F; 2] {
    let nf = F::from_i64(n as i64);
    [-alpha.clone() - nf.clone(), beta.clone() + nf]
}

/// One value of s on the Hahn orbit, with Y = {0, …, s}.
#[derive(Clone, Debug, PartialEq)]
pub struct HahnRow<F> {
    pub s: i64,
    /// D(s) = P(all particles ≤ s).
    pub gap: F,
    pub trivial: bool,
    /// (q_s, r_s), when the trivialized bundle yields them.
    pub coords: Option<(F, F)>,
    /// Why coordinates are missing, or how they were completed.
    pub note: Option<String>,
    /// dpvi_step applied to (q_s, r_s).
    pub step: Option<Result<(F, F)>>,
    /// Both τ expressions on (q_s, r_s) and (q_{s−1}, r_{s−1}).
    pub tau: Option<Result<F>>,
    /// D(s−2)·D(s)/D(s−1)², when D(s−1) ≠ 0.
    pub gap_ratio: Option<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HahnOrbit<F> {
    pub n: usize,
    pub big_m: usize,
    pub alpha: F,
    pub beta: F,
    pub rows: Vec<HahnRow<F>>,
}

impl<F: Scalar> HahnOrbit<F> {
    pub fn row(&self, s: i64) -> Option<&HahnRow<F>> {
        self.rows.iter().find(|r| r.s == s)
    }

    /// Whether dpvi_step(q_s, r_s) reproduces (q_{s−1}, r_{s−1}).
    pub fn step_matches(&self, s: i64, tol: f64) -> Option<bool> {
        let got = self.row(s)?.step.as_ref()?.as_ref().ok()?;
        let want = self.row(s - 1)?.coords.as_ref()?;
        Some(got.0.close(&want.0, tol) && got.1.close(&want.1, tol))
    }

    /// Whether the τ expression equals D(s−2)·D(s)/D(s−1)².
    pub fn tau_matches(&self, s: i64, tol: f64) -> Option<bool> {
        let row = self.row(s)?;
        let tau = row.tau.as_ref()?.as_ref().ok()?;
        Some(tau.close(row.gap_ratio.as_ref()?, tol))
    }
}

/// Runs the Hahn pipeline for s = N−2, …, M: gap probabilities, bundle
/// triviality, (q_s, r_s) from the trivialization, dPVI steps and τ ratios.
///
/// At s = M the coordinate r is 0/0 on the bundle side; it is completed from
/// (q_{M−1}, r_{M−1}) by the inverse step.
pub fn hahn_orbit<F: Scalar>(n: usize, big_m: usize, alpha: &F, beta: &F) -> Result<HahnOrbit<F>> {
    use crate::bundles::{diagonal_connection, dpvi_coords, is_trivial, lower_left_root, trivialized_matrix, BundleModel};
    use crate::ensembles::{gap_probability, EnsembleSpec};

    if n == 0 || big_m < n {
        return Err(Error::InvalidInput("need 1 ≤ N ≤ M".into()));
    }
    let spec = EnsembleSpec::hahn(n, big_m, alpha.clone(), beta.clone())?;
    let diag = diagonal_connection(&spec)?;
    let exponents = hahn_exponents(n, alpha, beta);
    let first = (n as i64 - 2).max(-1);
    let mut rows: Vec<HahnRow<F>> = Vec::new();
    for s in first..=big_m as i64 {
        let allowed: Vec<usize> = (0..=s).map(|i| i as usize).collect();
        let gap = gap_probability(&spec, &allowed)?;
        let model = BundleModel::new(spec.clone(), allowed)?;
        let trivial = is_trivial(&model);
        let params = hahn_dpvi_params(n, big_m, alpha, beta, s);
        let (mut coords, mut note) = (None, None);
        if !trivial {
            note = Some("L_Y is not trivial".to_string());
        } else {
            match trivialized_matrix(&model, &diag, &exponents).and_then(|t| {
                let c = dpvi_coords(&t.matrix, &params);
                Ok((t, c))
            }) {
                Ok((_, Ok(c))) => coords = Some(c),
                Ok((t, Err(e))) => {
                    let prev = rows.last().and_then(|r: &HahnRow<F>| r.coords.clone());
                    match (lower_left_root(&t.matrix, &params.b), prev) {
                        (Ok((q, _)), Some((qp, rp))) => match dpvi_r_before(&params, &qp, &rp) {
                            Ok(r) => {
                                coords = Some((q, r));
                                note = Some(format!("{e}; r from the inverse step"));
                            }
                            Err(e2) => note = Some(format!("{e}; inverse step: {e2}")),
                        },
                        _ => note = Some(e.to_string()),
                    }
                }
                Err(e) => note = Some(e.to_string()),
            }
        }
        rows.push(HahnRow {
            s,
            gap,
            trivial,
            coords,
            note,
            step: None,
            tau: None,
            gap_ratio: None,
        });
    }

    for idx in 0..rows.len() {
        let s = rows[idx].s;
        let params = hahn_dpvi_params(n, big_m, alpha, beta, s);
        let state = rows[idx].coords.clone().map(|(q, r)| DPVIState { q, r, params: params.clone() });
        if let Some(st) = &state {
            if idx > 0 {
                rows[idx].step = Some(dpvi_step(st).map(|x| (x.q, x.r)));
                rows[idx].tau = Some(match &rows[idx - 1].coords {
                    Some((q, r)) => tau_second_dpvi(
                        st,
                        &DPVIState { q: q.clone(), r: r.clone(), params: params.shifted() },
                    ),
                    None => Err(Error::SingularStep(format!("no coordinates at s = {}", s - 1))),
                });
            }
        }
        if idx >= 2 {
            let (d0, d1, d2) = (&rows[idx - 2].gap, &rows[idx - 1].gap, &rows[idx].gap);
            if !d1.negligible(1.0) {
                rows[idx].gap_ratio = Some(d0.clone() * d2.clone() / (d1.clone() * d1.clone()));
            }
        }
    }
    Ok(HahnOrbit {
        n,
        big_m,
        alpha: alpha.clone(),
        beta: beta.clone(),
        rows,
    })
}
