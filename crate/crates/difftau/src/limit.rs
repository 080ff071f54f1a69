//! Continuum limit of zero–pole shifts to the Schlesinger system.
//!
//! An ε-family of d-connections is built from rank-one data
//! (y_i, α_i, β_i, w_i, w′_i): zeros at α_i + y_i/ε, poles at β_i + y_i/ε,
//! A(∞) = I. Second τ ratios of the discrete family, rescaled by ε², tend to
//! the τ curvature tr(B_iB_j)/(y_i − y_j)² of the Schlesinger system with
//! residues B_i = (β_i − α_i)·w_i·w′_iᵗ/⟨w_i, w′_i⟩.

use crate::engine::{DConnection, SingularityFrame, Walk};
use crate::error::{Error, Result};

use crate::field::{dot, lift_f64 as lift, Matrix, RatMat, Scalar, Q};

/// Rank-one datum of one site of the ε-family.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneSite<F> {
    pub y: F,
    pub alpha: F,
    pub beta: F,
    pub w: Vec<F>,
    pub w_prime: Vec<F>,
}

impl<F: Scalar> RankOneSite<F> {
    pub fn new(y: F, alpha: F, beta: F, w: Vec<F>, w_prime: Vec<F>) -> Result<Self> {
        if w.len() != w_prime.len() || w.is_empty() {
            return Err(Error::InvalidInput("w and w′ must have the same positive length".into()));
        }
        if dot(&w, &w_prime).negligible(1.0) {
            return Err(Error::NonGeneric("⟨w, w′⟩ vanishes".into()));
        }
        if (beta.clone() - alpha.clone()).negligible(1.0) {
            return Err(Error::InvalidInput("β − α must be nonzero".into()));
        }
        Ok(RankOneSite { y, alpha, beta, w, w_prime })
    }

    pub fn pairing(&self) -> F {
        dot(&self.w, &self.w_prime)
    }

    /// B = (β − α)·w·w′ᵗ/⟨w, w′⟩.
    pub fn residue(&self) -> Matrix<F> {
        Matrix::outer(&self.w, &self.w_prime).scale(&((self.beta.clone() - self.alpha.clone()) / self.pairing()))
    }

    pub fn zero_at(&self, eps: &F) -> F {
        self.alpha.clone() + self.y.clone() / eps.clone()
    }

    pub fn pole_at(&self, eps: &F) -> F {
        self.beta.clone() + self.y.clone() / eps.clone()
    }
}

/// Residues (y_i, B_i) of a Fuchsian connection Σ B_i/(ζ − y_i).
#[derive(Clone, Debug, PartialEq)]
pub struct SchlesingerData<F> {
    sites: Vec<(F, Matrix<F>)>,
}

impl<F: Scalar> SchlesingerData<F> {
    pub fn new(sites: Vec<(F, Matrix<F>)>) -> Result<Self> {
        for (k, (yk, _)) in sites.iter().enumerate() {
            if sites[..k].iter().any(|(yl, _)| yl == yk) {
                return Err(Error::CoincidentPoints(format!("y = {yk} appears twice")));
            }
        }
        Ok(SchlesingerData { sites })
    }

    pub fn from_sites(sites: &[RankOneSite<F>]) -> Result<Self> {
        Self::new(sites.iter().map(|s| (s.y.clone(), s.residue())).collect())
    }

    pub fn sites(&self) -> &[(F, Matrix<F>)] {
        &self.sites
    }

    fn check(&self, i: usize, j: usize) -> Result<()> {
        let n = self.sites.len();
        if i >= n || j >= n {
            return Err(Error::InvalidInput(format!("site index out of range ({n} sites)")));
        }
        Ok(())
    }

    /// B(ζ) = Σ B_i/(ζ − y_i).
    pub fn connection_at(&self, zeta: &F) -> Result<Matrix<F>> {
        let m = self.sites.first().map_or(0, |(_, b)| b.rows());
        let mut out = Matrix::zeros(m, m);
        for (y, b) in &self.sites {
            out = out.add(&b.scale(&(F::one() / nonzero_gap(zeta, y)?)));
        }
        Ok(out)
    }
}

fn nonzero_gap<F: Scalar>(x: &F, y: &F) -> Result<F> {
    let d = x.clone() - y.clone();
    if d.is_zero() {
        return Err(Error::CoincidentPoints(format!("{x} and {y}")));
    }
    Ok(d)
}

/// ∂B_i/∂y_j of the Schlesinger system.
pub fn schlesinger_rhs<F: Scalar>(data: &SchlesingerData<F>, i: usize, j: usize) -> Result<Matrix<F>> {
    data.check(i, j)?;
    let (yi, bi) = &data.sites[i];
    if i != j {
        let (yj, bj) = &data.sites[j];
        return Ok(bi.commutator(bj).scale(&(F::one() / nonzero_gap(yi, yj)?)));
    }
    let mut out = Matrix::zeros(bi.rows(), bi.cols());
    for (k, (yk, bk)) in data.sites.iter().enumerate() {
        if k != i {
            out = out.sub(&bi.commutator(bk).scale(&(F::one() / nonzero_gap(yi, yk)?)));
        }
    }
    Ok(out)
}

/// ∂²log τ/∂y_i∂y_j.
pub fn tau_curvature<F: Scalar>(data: &SchlesingerData<F>, i: usize, j: usize) -> Result<F> {
    data.check(i, j)?;
    let term = |k: usize| -> Result<F> {
        let (yi, bi) = &data.sites[i];
        let (yk, bk) = &data.sites[k];
        let d = nonzero_gap(yi, yk)?;
        Ok(bi.mul(bk).trace() / (d.clone() * d))
    };
    if i != j {
        return term(j);
    }
    let mut total = F::zero();
    for k in (0..data.sites.len()).filter(|&k| k != i) {
        total = total - term(k)?;
    }
    Ok(total)
}

/// R(z) = I + (b − a)/(z − b)·w·w′ᵗ/⟨w, w′⟩ for one (transported) site.
struct Factor<F> {
    a: F,
    b: F,
    w: Vec<F>,
    w_prime: Vec<F>,
}

impl<F: Scalar> Factor<F> {
    fn residue(&self) -> Result<Matrix<F>> {
        let pair = dot(&self.w, &self.w_prime);
        if pair.negligible(1.0) {
            return Err(Error::NonGeneric(format!("transported pairing vanishes at zero {}", self.a)));
        }
        Ok(Matrix::outer(&self.w, &self.w_prime).scale(&((self.b.clone() - self.a.clone()) / pair)))
    }

    fn at(&self, z: &F) -> Result<Matrix<F>> {
        let r0 = self.residue()?;
        Ok(Matrix::identity(r0.rows()).add(&r0.scale(&(F::one() / nonzero_gap(z, &self.b)?))))
    }
}

/// Recursive product A = Ã·R_n, the remaining sites carrying transported frames.
fn product<F: Scalar>(mut factors: Vec<Factor<F>>, m: usize) -> Result<RatMat<F>> {
    let Some(last) = factors.pop() else {
        return Ok(RatMat::identity(m));
    };
    let r = RatMat::identity_plus_pole(&last.residue()?, &last.b);
    let transported = factors
        .into_iter()
        .map(|f| {
            let w = last.at(&f.a)?.mul_vec(&f.w);
            let w_prime = last.at(&f.b)?.inverse()?.transpose().mul_vec(&f.w_prime);
            Ok(Factor { w, w_prime, ..f })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(product(transported, m)?.mul(&r))
}

/// The ε-member of the family: frames ordered zero₀, pole₀, zero₁, pole₁, …,
/// carrying exactly the site vectors w_i and w′_i.
pub fn build_connection_family<F: Scalar>(sites: &[RankOneSite<F>], eps: &F) -> Result<DConnection<F>> {
    let m = sites
        .first()
        .map(|s| s.w.len())
        .ok_or_else(|| Error::InvalidInput("no sites".into()))?;
    if sites.iter().any(|s| s.w.len() != m) {
        return Err(Error::InvalidInput("sites have different ranks".into()));
    }
    if eps.is_zero() {
        return Err(Error::InvalidInput("ε must be nonzero".into()));
    }
    let points: Vec<F> = sites.iter().flat_map(|s| [s.zero_at(eps), s.pole_at(eps)]).collect();
    for (k, x) in points.iter().enumerate() {
        if let Some(y) = points[..k].iter().find(|y| (x.clone() - (*y).clone()).to_integer().is_some()) {
            return Err(Error::NonGeneric(format!("singular points {y} and {x} differ by an integer")));
        }
    }
    let factors = sites
        .iter()
        .map(|s| Factor {
            a: s.zero_at(eps),
            b: s.pole_at(eps),
            w: s.w.clone(),
            w_prime: s.w_prime.clone(),
        })
        .collect();
    let matrix = product(factors, m)?;
    let inv = matrix.mat_inverse()?;
    let mut frames = Vec::with_capacity(2 * sites.len());
    for s in sites {
        frames.push(SingularityFrame::zero_with(&matrix, &inv, s.zero_at(eps), s.w.clone())?);
        frames.push(SingularityFrame::pole_with(&matrix, s.pole_at(eps), s.w_prime.clone())?);
    }
    Ok(DConnection::new(matrix, frames))
}

fn lowered(sites: usize, which: &[usize]) -> Vec<i64> {
    let mut v = vec![0; 2 * sites];
    for &i in which {
        v[2 * i] -= 1;
        v[2 * i + 1] -= 1;
    }
    v
}

/// D²_{ij}τ at (a − e_i − e_j), i.e. τ(a)τ(a−e_i−e_j)/(τ(a−e_i)τ(a−e_j)),
/// read off the ledger of engine zero–pole shifts in direction −1.
pub fn engine_second_ratio<F: Scalar>(conn: &DConnection<F>, i: usize, j: usize) -> Result<F> {
    let n = conn.frames.len() / 2;
    if i >= n || j >= n {
        return Err(Error::InvalidInput(format!("site index out of range ({n} sites)")));
    }
    let mut via_i = Walk::new(conn.clone());
    via_i.zero_pole(2 * i, 2 * i + 1, -1)?;
    via_i.zero_pole(2 * j, 2 * j + 1, -1)?;
    let mut ledger = via_i.ledger;
    if i != j {
        let mut via_j = Walk::new(conn.clone());
        via_j.zero_pole(2 * j, 2 * j + 1, -1)?;
        ledger.merge(&via_j.ledger)?;
    }
    let origin = vec![0; 2 * n];
    let d0 = ledger.first_ratio(&origin, &lowered(n, &[j]))?;
    let d1 = ledger.first_ratio(&lowered(n, &[i]), &lowered(n, &[j]))?;
    if d1.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    // τ(a)τ(a−e_i−e_j)/(τ(a−e_i)τ(a−e_j)) = D_j(a−e_i)/D_j(a) with D_j = τ(·−e_j)/τ(·).
    Ok(d1 / d0)
}

/// The same second ratio from transported frames alone:
/// ⟨R_j(a_i)w_i, R_j^{−t}(b_i)w′_i⟩/⟨w_i, w′_i⟩ for i ≠ j, and for i = j
/// the frames transported through A(a_i − 1)⁻¹ and A(b_i − 1)ᵗ.
pub fn closed_form_second_ratio<F: Scalar>(conn: &DConnection<F>, i: usize, j: usize) -> Result<F> {
    let zero = |k: usize| conn.frame(2 * k);
    let pole = |k: usize| conn.frame(2 * k + 1);
    let (zi, pi) = (zero(i)?, pole(i)?);
    let rj = Factor {
        a: zero(j)?.location.clone(),
        b: pole(j)?.location.clone(),
        w: zero(j)?.w.clone(),
        w_prime: pole(j)?.w_prime.clone(),
    };
    let before = dot(&zi.w, &pi.w_prime);
    if before.negligible(1.0) {
        return Err(Error::ZeroDenominator);
    }
    let one = F::one();
    let (w, w_prime) = if i != j {
        (
            rj.at(&zi.location)?.mul_vec(&zi.w),
            rj.at(&pi.location)?.inverse()?.transpose().mul_vec(&pi.w_prime),
        )
    } else {
        let a1 = zi.location.clone() - one.clone();
        let b1 = pi.location.clone() - one;
        let w = rj.at(&a1)?.mul(&conn.matrix.eval_at(&a1)?.inverse()?).mul_vec(&zi.w);
        let w_prime = rj
            .at(&b1)?
            .inverse()?
            .transpose()
            .mul(&conn.matrix.eval_at(&b1)?.transpose())
            .mul_vec(&pi.w_prime);
        (w, w_prime)
    };
    Ok(dot(&w, &w_prime) / before)
}

/// Largest entry magnitude.
pub fn max_norm<F: Scalar>(m: &Matrix<F>) -> f64 {
    m.entries().iter().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// A probe point at distance at least 1 from every y_i.
pub fn default_probe<F: Scalar>(sites: &[RankOneSite<F>]) -> F {
    let top = sites
        .iter()
        .map(|s| s.y.clone())
        .reduce(|a, b| if b.to_f64() > a.to_f64() { b } else { a })
        .unwrap_or_else(F::zero);
    top + F::one()
}

/// ‖A(ζ/ε) − I − εΣB_k/(ζ − y_k)‖.
pub fn lim1_residual<F: Scalar>(
    conn: &DConnection<F>,
    data: &SchlesingerData<F>,
    eps: &F,
    zeta: &F,
) -> Result<f64> {
    let a = conn.matrix.eval_at(&(zeta.clone() / eps.clone()))?;
    let expected = Matrix::identity(a.rows()).add(&data.connection_at(zeta)?.scale(eps));
    Ok(max_norm(&a.sub(&expected)))
}

/// ‖(A_a(ζ/ε) − A_{a−e_i}(ζ/ε))/ε² − B_i/(ζ−y_i)² + Σ_{j≠i}[B_i,B_j]/((ζ−y_i)(ζ−y_j))‖.
pub fn lim2_residual<F: Scalar>(
    conn: &DConnection<F>,
    data: &SchlesingerData<F>,
    i: usize,
    eps: &F,
    zeta: &F,
) -> Result<f64> {
    let lowered = crate::engine::shift_zero_pole_pair(conn, 2 * i, 2 * i + 1, -1)?.connection;
    let at = zeta.clone() / eps.clone();
    let quotient = conn
        .matrix
        .eval_at(&at)?
        .sub(&lowered.matrix.eval_at(&at)?)
        .scale(&(F::one() / (eps.clone() * eps.clone())));
    data.check(i, i)?;
    let (yi, bi) = &data.sites[i];
    let di = nonzero_gap(zeta, yi)?;
    let mut rhs = bi.scale(&(F::one() / (di.clone() * di.clone())));
    for (k, (yk, bk)) in data.sites.iter().enumerate() {
        if k != i {
            let dk = nonzero_gap(zeta, yk)?;
            rhs = rhs.sub(&bi.commutator(bk).scale(&(F::one() / (di.clone() * dk))));
        }
    }
    Ok(max_norm(&quotient.sub(&rhs)))
}

/// One ε of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitRow<F> {
    pub eps: F,
    /// D²τ measured by the engine ledger.
    pub engine: F,
    /// D²τ from the transported-frame closed form.
    pub closed_form: F,
    /// (D²τ − 1)/ε².
    pub measured: F,
    pub target: F,
    pub error: f64,
    /// error(this ε)/error(previous ε).
    pub ratio: Option<f64>,
    pub lim1: f64,
    pub lim2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitSweep<F> {
    pub i: usize,
    pub j: usize,
    pub probe: F,
    pub rows: Vec<LimitRow<F>>,
}

fn order(prev: f64, next: f64, step: f64) -> f64 {
    if next == 0.0 {
        f64::INFINITY
    } else {
        (prev / next).ln() / step.ln()
    }
}

impl<F: Scalar> LimitSweep<F> {
    /// Engine value equals the closed form at every ε (within `tol` in float mode).
    pub fn closed_form_agrees(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.engine.close(&r.closed_form, tol))
    }

    /// Longest run of consecutive error ratios inside [lo, hi].
    pub fn richardson_run(&self, lo: f64, hi: f64) -> usize {
        let mut best = 0;
        let mut run = 0;
        for r in &self.rows {
            match r.ratio {
                Some(x) if (lo..=hi).contains(&x) => {
                    run += 1;
                    best = best.max(run);
                }
                _ => run = 0,
            }
        }
        best
    }

    fn orders(&self, pick: impl Fn(&LimitRow<F>) -> f64) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| order(pick(&w[0]), pick(&w[1]), w[0].eps.to_f64() / w[1].eps.to_f64()))
            .collect()
    }

    /// Empirical convergence orders of the lim1 residual between consecutive ε.
    pub fn lim1_orders(&self) -> Vec<f64> {
        self.orders(|r| r.lim1)
    }

    pub fn lim2_orders(&self) -> Vec<f64> {
        self.orders(|r| r.lim2)
    }
}

/// ε = 2^{−k} for k in `from..=to`.
pub fn dyadic_eps<F: Scalar>(from: u32, to: u32) -> Vec<F> {
    (from..=to).map(|k| F::from_ratio(1, 1i64 << k)).collect()
}

pub fn limit_sweep<F: Scalar>(sites: &[RankOneSite<F>], i: usize, j: usize, eps_list: &[F]) -> Result<LimitSweep<F>> {
    if eps_list.windows(2).any(|w| w[1].to_f64() >= w[0].to_f64()) || eps_list.iter().any(|e| e.to_f64() <= 0.0) {
        return Err(Error::InvalidInput("ε list must be positive and decreasing".into()));
    }
    let data = SchlesingerData::from_sites(sites)?;
    let target = tau_curvature(&data, i, j)?;
    let probe = default_probe(sites);
    let mut rows: Vec<LimitRow<F>> = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let conn = build_connection_family(sites, eps)?;
        let engine = engine_second_ratio(&conn, i, j)?;
        let closed_form = closed_form_second_ratio(&conn, i, j)?;
        let measured = (engine.clone() - F::one()) / (eps.clone() * eps.clone());
        let error = (measured.clone() - target.clone()).magnitude();
        let ratio = rows.last().map(|p| error / p.error);
        rows.push(LimitRow {
            eps: eps.clone(),
            lim1: lim1_residual(&conn, &data, eps, &probe)?,
            lim2: lim2_residual(&conn, &data, i, eps, &probe)?,
            engine,
            closed_form,
            measured,
            target: target.clone(),
            error,
            ratio,
        });
    }
    Ok(LimitSweep { i, j, probe, rows })
}

impl RankOneSite<f64> {
    /// The same site with every coordinate read as the dyadic rational it is.
    pub fn lifted(&self) -> Result<RankOneSite<Q>> {
        let vec = |v: &[f64]| v.iter().map(|&x| lift(x)).collect::<Result<Vec<_>>>();
        RankOneSite::new(lift(self.y)?, lift(self.alpha)?, lift(self.beta)?, vec(&self.w)?, vec(&self.w_prime)?)
    }
}

/// Float-mode sweep. Doubles are dyadic rationals, so the data are lifted
/// exactly and the engine runs in exact arithmetic; only the reported values
/// are rounded. Float rational-function arithmetic is not used here because
/// the singular points sit near y/ε, where cancellation in approximate gcds
/// costs several digits per gauge step.
pub fn limit_sweep_float(sites: &[RankOneSite<f64>], i: usize, j: usize, eps_list: &[f64]) -> Result<LimitSweep<f64>> {
    let exact_sites = sites.iter().map(|s| s.lifted()).collect::<Result<Vec<_>>>()?;
    let exact_eps = eps_list.iter().map(|&e| lift(e)).collect::<Result<Vec<_>>>()?;
    let sweep = limit_sweep(&exact_sites, i, j, &exact_eps)?;
    Ok(LimitSweep {
        i,
        j,
        probe: sweep.probe.to_f64(),
        rows: sweep
            .rows
            .into_iter()
            .map(|r| LimitRow {
                eps: r.eps.to_f64(),
                engine: r.engine.to_f64(),
                closed_form: r.closed_form.to_f64(),
                measured: r.measured.to_f64(),
                target: r.target.to_f64(),
                error: r.error,
                ratio: r.ratio,
                lim1: r.lim1,
                lim2: r.lim2,
            })
            .collect(),
    })
}
