//! Table-producing subcommands. Every row ends with a status column:
//! `pass`, `fail`, or `singular` for steps the recurrence cannot take.

use difftau::engine::hirota_check;
use difftau::ensembles::{allowed_indices, brute_force_gap, gap_probability, EnsembleSpec, GapSet};
use difftau::field::{Scalar, Q};
use difftau::instances;
use difftau::limit::{dyadic_eps, limit_sweep, limit_sweep_float, LimitSweep, RankOneSite};
use difftau::painleve::{
    dpv_step, dpv_step_inverse, dpvi_step, dpvi_step_inverse, hahn_orbit, tau_second_dpv_pair, tau_second_dpvi_pair,
    DPVIParams, DPVIState, DPVParams, DPVState,
};
use difftau::Error;

use crate::config::{array, values, DpvDoc, DpviDoc, Document, EnsembleDoc, HahnDoc, HirotaDoc, LimitDoc};
use crate::error::CliError;
use crate::{lift, Body, Report, RunConfig};

const DEFAULT_STEPS: usize = 10;

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn cell<F: Scalar>(x: Option<&F>) -> String {
    x.map(F::render).unwrap_or_default()
}

fn status(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

fn table(rows: Vec<Vec<String>>, ok: bool) -> Report {
    Report { body: Body::Table(rows), ok }
}

/// A library error that marks a recurrence step as undefined rather than wrong.
fn is_singular(e: &Error) -> bool {
    matches!(e, Error::SingularStep(_) | Error::ZeroDenominator)
}

fn brute<F: Scalar>(spec: &EnsembleSpec<F>, allowed: &[usize], cap: u128) -> Result<Option<F>, CliError> {
    match brute_force_gap(spec, allowed, cap) {
        Ok(v) => Ok(Some(v)),
        Err(Error::InfeasibleSize { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn hahn<F: Scalar>(cfg: &RunConfig, doc: &Document) -> Result<Report, CliError> {
    let d: HahnDoc = doc.parse()?;
    if d.n < 2 {
        return Err(CliError::Invalid("the Hahn pipeline needs N ≥ 2".into()));
    }
    let (alpha, beta) = (d.alpha.value::<F>()?, d.beta.value::<F>()?);
    let spec = EnsembleSpec::hahn(d.n, d.m, alpha.clone(), beta.clone())?;
    let orbit = hahn_orbit(d.n, d.m, &alpha, &beta)?;
    let mut rows = vec![header(&[
        "s", "gap_det", "gap_brute", "q_bundle", "r_bundle", "q_recursion", "r_recursion", "tau_measured", "tau_formula", "status",
    ])];
    let mut all_ok = true;
    for s in d.n as i64 - 1..=d.m as i64 {
        let row = orbit.row(s).ok_or_else(|| CliError::Invalid(format!("orbit has no row s = {s}")))?;
        let allowed: Vec<usize> = (0..=s as usize).collect();
        let bf = brute(&spec, &allowed, cfg.cap)?;
        // (q_s, r_s) predicted by stepping back from s + 1.
        let rec = orbit.row(s + 1).and_then(|r| r.step.clone());
        let mut ok = bf.as_ref().is_none_or(|b| b.close(&row.gap, cfg.tol));
        if s == d.m as i64 {
            ok &= row.gap.close(&F::one(), cfg.tol);
        }
        if let (Some((q, r)), Some(Ok((qr, rr)))) = (&row.coords, &rec) {
            ok &= q.close(qr, cfg.tol) && r.close(rr, cfg.tol);
        }
        if let (Some(Ok(t)), Some(g)) = (&row.tau, &row.gap_ratio) {
            ok &= t.close(g, cfg.tol);
        }
        let singular = matches!(&rec, Some(Err(e)) if is_singular(e)) || matches!(&row.tau, Some(Err(e)) if is_singular(e));
        all_ok &= ok;
        let coords = row.coords.as_ref();
        let rec_ok = rec.as_ref().and_then(|r| r.as_ref().ok());
        rows.push(vec![
            s.to_string(),
            row.gap.render(),
            cell(bf.as_ref()),
            cell(coords.map(|c| &c.0)),
            cell(coords.map(|c| &c.1)),
            cell(rec_ok.map(|c| &c.0)),
            cell(rec_ok.map(|c| &c.1)),
            cell(row.gap_ratio.as_ref()),
            cell(row.tau.as_ref().and_then(|t| t.as_ref().ok())),
            if ok && singular { "singular".into() } else { status(ok) },
        ]);
    }
    Ok(table(rows, all_ok))
}

fn render_points<F: Scalar>(spec: &EnsembleSpec<F>, idx: &[usize]) -> String {
    idx.iter().map(|&i| spec.phase()[i].render()).collect::<Vec<_>>().join(" ")
}

pub fn gap<F: Scalar>(cfg: &RunConfig, doc: &Document) -> Result<Report, CliError> {
    let d: EnsembleDoc = doc.parse()?;
    let spec = d.spec::<F>()?;
    // Default: the distribution of the largest particle, Y = {x ≤ x_s}.
    let sets: Vec<GapSet<F>> = match d.gap_sets::<F>()? {
        Some(sets) => sets,
        None => (1..=spec.phase().len()).map(|k| GapSet::Allowed(spec.phase()[..k].to_vec())).collect(),
    };
    let mut rows = vec![header(&["allowed", "gap_det", "gap_brute", "status"])];
    let mut all_ok = true;
    for set in &sets {
        let allowed = allowed_indices(&spec, set)?;
        let det = gap_probability(&spec, &allowed)?;
        let bf = brute(&spec, &allowed, cfg.cap)?;
        let ok = bf.as_ref().is_none_or(|b| b.close(&det, cfg.tol));
        all_ok &= ok;
        rows.push(vec![render_points(&spec, &allowed), det.render(), cell(bf.as_ref()), status(ok)]);
    }
    Ok(table(rows, all_ok))
}

fn seed_cell(cfg: &RunConfig, from_config: bool) -> String {
    if from_config { String::new() } else { cfg.seed.to_string() }
}

pub fn dpv_orbit<F: Scalar>(cfg: &RunConfig, doc: Option<&Document>) -> Result<Report, CliError> {
    let (mut st, steps) = match doc {
        Some(doc) => {
            let d: DpvDoc = doc.parse()?;
            let params = DPVParams::<F>::new(array(&d.a)?, array(&d.b)?, array(&d.d)?, array(&d.rho)?)?;
            (DPVState { q: d.q.value()?, p: d.p.value()?, params }, d.steps.unwrap_or(DEFAULT_STEPS))
        }
        None => (lift::dpv_state(&instances::random_dpv_state(&mut instances::rng(cfg.seed))), DEFAULT_STEPS),
    };
    let seed = seed_cell(cfg, doc.is_some());
    let mut rows = vec![header(&["seed", "k", "q", "p", "tau_first", "tau_second", "status"])];
    let mut all_ok = true;
    for k in 0..steps {
        let mut row = vec![seed.clone(), k.to_string(), st.q.render(), st.p.render()];
        let next = match dpv_step(&st) {
            Ok(next) => next,
            Err(e) if is_singular(&e) => {
                row.extend(["".into(), "".into(), "singular".into()]);
                rows.push(row);
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let back = dpv_step_inverse(&next)?;
        let mut ok = back.q.close(&st.q, cfg.tol) && back.p.close(&st.p, cfg.tol);
        match tau_second_dpv_pair(&st, &next) {
            Ok((e1, e2)) => {
                ok &= e1.close(&e2, cfg.tol);
                row.extend([e1.render(), e2.render(), status(ok)]);
            }
            Err(e) if is_singular(&e) => row.extend(["".into(), "".into(), if ok { "singular".into() } else { status(ok) }]),
            Err(e) => return Err(e.into()),
        }
        all_ok &= ok;
        rows.push(row);
        st = next;
    }
    Ok(table(rows, all_ok))
}

pub fn dpvi_orbit<F: Scalar>(cfg: &RunConfig, doc: Option<&Document>) -> Result<Report, CliError> {
    let (mut st, steps) = match doc {
        Some(doc) => {
            let d: DpviDoc = doc.parse()?;
            let params = DPVIParams::<F>::new(array(&d.a)?, array(&d.b)?, array(&d.d)?)?;
            (DPVIState { q: d.q.value()?, r: d.r.value()?, params }, d.steps.unwrap_or(DEFAULT_STEPS))
        }
        None => (lift::dpvi_state(&instances::random_dpvi_state(&mut instances::rng(cfg.seed))), DEFAULT_STEPS),
    };
    let seed = seed_cell(cfg, doc.is_some());
    let mut rows = vec![header(&["seed", "k", "q", "r", "tau_first", "tau_second", "status"])];
    let mut all_ok = true;
    for k in 0..steps {
        let mut row = vec![seed.clone(), k.to_string(), st.q.render(), st.r.render()];
        let next = match dpvi_step(&st) {
            Ok(next) => next,
            Err(e) if is_singular(&e) => {
                row.extend(["".into(), "".into(), "singular".into()]);
                rows.push(row);
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let mut ok = match dpvi_step_inverse(&next) {
            Ok(back) => back.q.close(&st.q, cfg.tol) && back.r.close(&st.r, cfg.tol),
            Err(e) if is_singular(&e) => true,
            Err(e) => return Err(e.into()),
        };
        match tau_second_dpvi_pair(&st, &next) {
            Ok((e1, e2)) => {
                ok &= e1.close(&e2, cfg.tol);
                row.extend([e1.render(), e2.render(), status(ok)]);
            }
            Err(e) if is_singular(&e) => row.extend(["".into(), "".into(), if ok { "singular".into() } else { status(ok) }]),
            Err(e) => return Err(e.into()),
        }
        all_ok &= ok;
        rows.push(row);
        st = next;
    }
    Ok(table(rows, all_ok))
}

/// All ordered pairs of disjoint k-subsets of {0, …, n−1}.
pub fn disjoint_pairs(n: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let sets: Vec<Vec<usize>> = (0..1u32 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    for i in &sets {
        for j in &sets {
            if i.iter().all(|x| !j.contains(x)) {
                out.push((i.clone(), j.clone()));
            }
        }
    }
    out
}

fn render_indices(idx: &[usize]) -> String {
    idx.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// Hirota identities on a rank-two zero connection. The engine runs in exact
/// arithmetic; in float mode the zeros are first rounded to doubles and the
/// results are reported and compared as doubles.
pub fn hirota<F: Scalar>(cfg: &RunConfig, doc: Option<&Document>) -> Result<Report, CliError> {
    let mut rng = instances::rng(cfg.seed);
    let zeros: Vec<Q> = match doc {
        Some(doc) => values(&doc.parse::<HirotaDoc>()?.zeros)?,
        None => instances::generic_points(&mut rng, 4, 0),
    };
    let zeros = zeros.iter().map(lift::rounded::<F>).collect::<difftau::Result<Vec<_>>>()?;
    if zeros.len() < 2 {
        return Err(CliError::Invalid("need at least two zeros".into()));
    }
    let conn = instances::zero_connection(&mut rng, 2, &zeros)?;
    let mut rows = vec![header(&["seed", "rows", "cols", "lhs", "rhs", "status"])];
    let mut all_ok = true;
    for k in 1..=2.min(zeros.len() / 2) {
        for (i, j) in disjoint_pairs(zeros.len(), k) {
            let (lhs, rhs) = hirota_check(&conn, &i, &j)?;
            let (lhs, rhs) = (lift::scalar::<F>(&lhs), lift::scalar::<F>(&rhs));
            let ok = lhs.close(&rhs, cfg.tol);
            all_ok &= ok;
            rows.push(vec![cfg.seed.to_string(), render_indices(&i), render_indices(&j), lhs.render(), rhs.render(), status(ok)]);
        }
    }
    Ok(table(rows, all_ok))
}

fn sweep_rows<F: Scalar>(sweep: &LimitSweep<F>, seed: &str, tol: f64, rows: &mut Vec<Vec<String>>) -> bool {
    let mut prev: Option<F> = None;
    let mut all_ok = true;
    for r in &sweep.rows {
        let error = r.measured.clone() - r.target.clone();
        let ratio = prev.as_ref().filter(|p| !p.is_zero()).map(|p| error.clone() / p.clone());
        let ok = r.engine.close(&r.closed_form, tol);
        all_ok &= ok;
        rows.push(vec![
            seed.to_string(),
            sweep.i.to_string(),
            sweep.j.to_string(),
            r.eps.render(),
            r.engine.render(),
            r.closed_form.render(),
            r.measured.render(),
            r.target.render(),
            error.render(),
            cell(ratio.as_ref()),
            status(ok),
        ]);
        prev = Some(error);
    }
    all_ok
}

/// Continuum-limit sweep. Sites are read exactly; float mode lifts doubles
/// back into exact arithmetic internally and reports doubles.
pub fn limit(cfg: &RunConfig, doc: Option<&Document>) -> Result<Report, CliError> {
    let d: LimitDoc = match doc {
        Some(doc) => doc.parse()?,
        None => LimitDoc::default(),
    };
    let (sites, seed) = match &d.sites {
        Some(sites) => (
            sites
                .iter()
                .map(|s| Ok(RankOneSite::new(s.y.value()?, s.alpha.value()?, s.beta.value()?, values(&s.w)?, values(&s.w_prime)?)?))
                .collect::<Result<Vec<RankOneSite<Q>>, CliError>>()?,
            String::new(),
        ),
        None => (instances::random_limit_sites(&mut instances::rng(cfg.seed), 2, 2), cfg.seed.to_string()),
    };
    let eps: Vec<Q> = match &d.eps {
        Some(e) => values(e)?,
        None => dyadic_eps(3, 8),
    };
    let pairs = d.pairs.clone().unwrap_or_else(|| {
        let n = sites.len();
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
    });
    let mut rows = vec![header(&[
        "seed", "i", "j", "eps", "engine", "closed_form", "measured", "target", "error", "ratio", "status",
    ])];
    let mut all_ok = true;
    for (i, j) in pairs {
        all_ok &= match cfg.mode {
            crate::Mode::Exact => sweep_rows(&limit_sweep(&sites, i, j, &eps)?, &seed, cfg.tol, &mut rows),
            crate::Mode::Float => {
                let fsites = sites
                    .iter()
                    .map(|s| {
                        let v = |x: &[Q]| x.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
                        RankOneSite::new(s.y.to_f64(), s.alpha.to_f64(), s.beta.to_f64(), v(&s.w), v(&s.w_prime))
                    })
                    .collect::<difftau::Result<Vec<_>>>()?;
                let feps: Vec<f64> = eps.iter().map(Scalar::to_f64).collect();
                sweep_rows(&limit_sweep_float(&fsites, i, j, &feps)?, &seed, cfg.tol, &mut rows)
            }
        };
    }
    Ok(table(rows, all_ok))
}
