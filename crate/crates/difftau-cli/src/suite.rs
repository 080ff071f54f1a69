//! The property suite: every cross-check of the library on seeded random
//! instances, summarized as JSON. Instances are generated exactly and then
//! moved into the active field, so exact and float runs see the same data.
//!
//! Engine checks (gauge residuals, Hirota, the limit) always run in exact
//! arithmetic: float rational functions lose too much accuracy locating
//! poles after gauge steps. In float mode their values are compared as
//! doubles at the configured tolerance.

use difftau::bundles::{det_equals_tau_check, kernel_entry_ratio, BundleModel};
use difftau::engine::{gauge_residual, hirota_check, shift_coalesced, shift_simple_zero_pair, shift_zero_pole_pair};
use difftau::ensembles::{brute_force_gaps, gap_from_kernel, gram_kernel, EnsembleSpec};
use difftau::field::{Matrix, Scalar, Q};
use difftau::instances::{self, InstanceRng};
use difftau::limit::{dyadic_eps, limit_sweep, limit_sweep_float, LimitSweep, RankOneSite};
use difftau::painleve::{dpv_step, dpvi_step, tau_second_dpv_pair, tau_second_dpvi_pair};
use difftau::Error;
use serde::Serialize;

use crate::commands::disjoint_pairs;
use crate::{lift, Body, Mode, Report, RunConfig};

const ENSEMBLES: u64 = 24;
const GAUGE_INSTANCES: usize = 30;
const HIROTA_CONNECTIONS: usize = 10;
const PAINLEVE_STATES: usize = 100;
/// Redraw budget for instances that are singular by accident.
const MAX_REDRAWS: usize = 1000;

#[derive(Serialize, Default)]
struct Tally {
    name: &'static str,
    checked: usize,
    skipped: usize,
    failed: usize,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, ..Default::default() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            self.note.get_or_insert_with(what);
        }
    }

    fn finish(mut self, outcome: Result<(), Error>) -> Self {
        if let Err(e) = outcome {
            self.failed += 1;
            self.note.get_or_insert_with(|| format!("error: {e}"));
        }
        self.pass = self.failed == 0;
        self
    }
}

#[derive(Serialize)]
struct Summary {
    seed: u64,
    mode: &'static str,
    tol: Option<f64>,
    suites: Vec<Tally>,
    pass: bool,
}

fn run<F: FnOnce(&mut Tally) -> Result<(), Error>>(name: &'static str, body: F) -> Tally {
    let mut t = Tally::new(name);
    let outcome = body(&mut t);
    t.finish(outcome)
}

pub fn run_suite<F: Scalar>(cfg: &RunConfig) -> Report {
    let ensembles = random_ensembles(cfg.seed);
    let suites = vec![
        run("gauge_residual", |t| gauge(cfg, t)),
        run("hirota", |t| hirota::<F>(cfg, t)),
        run("projection", |t| projection::<F>(cfg, &ensembles, t)),
        run("oracle_equivalence", |t| oracle::<F>(cfg, &ensembles, t)),
        run("det_equals_tau", |t| det_tau::<F>(cfg, &ensembles, t)),
        run("dual_expressions", |t| dual::<F>(cfg, t)),
        run("limit_sweep", |t| limit(cfg, t)),
    ];
    let pass = suites.iter().all(|s| s.pass);
    let summary = Summary {
        seed: cfg.seed,
        mode: cfg.mode.name(),
        tol: (cfg.mode == Mode::Float).then_some(cfg.tol),
        suites,
        pass,
    };
    let json = serde_json::to_value(summary).expect("summary serializes");
    Report { body: Body::Json(json), ok: pass }
}

fn rng(seed: u64, stream: u64) -> InstanceRng {
    instances::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream))
}

/// |X| ≤ 8, N ≤ 3 and p, q ≤ 2, cycling through every shape.
fn random_ensembles(seed: u64) -> Vec<EnsembleSpec<Q>> {
    let mut rng = rng(seed, 1);
    (0..ENSEMBLES)
        .map(|k| {
            let n = 1 + (k % 3) as usize;
            let p = (1 + (k / 3 % 2) as usize).min(n);
            let q = (1 + (k / 6 % 2) as usize).min(n);
            let size = 8 - (k / 12) as usize * 2 - (k % 2) as usize;
            instances::random_ensemble(&mut rng, size, n, p, q)
        })
        .collect()
}

fn subsets(size: usize) -> Vec<Vec<usize>> {
    (0..1u32 << size).map(|m| (0..size).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn matrices_close<F: Scalar>(a: &Matrix<F>, b: &Matrix<F>, tol: f64) -> bool {
    a.rows() == b.rows()
        && a.cols() == b.cols()
        && (0..a.rows()).all(|i| (0..a.cols()).all(|j| a.get(i, j).close(b.get(i, j), tol)))
}

fn gauge(cfg: &RunConfig, t: &mut Tally) -> Result<(), Error> {
    let mut rng = rng(cfg.seed, 2);
    for k in 0..GAUGE_INSTANCES {
        let dir = if k % 2 == 0 { -1 } else { 1 };
        let zeros = instances::generic_points(&mut rng, 3, 0);
        let zc = instances::zero_connection(&mut rng, 2, &zeros)?;
        let (za, pb) = (instances::generic_points(&mut rng, 2, 0), instances::generic_points(&mut rng, 2, 2));
        let zp = instances::zero_pole_connection(&mut rng, 2, &za, &pb)?;
        let pts = instances::generic_points(&mut rng, 2, 0);
        let co = instances::coalesced_connection(&mut rng, 2, &pts)?;
        let shifts = [
            ("zero pair", &zc, shift_simple_zero_pair(&zc, 0, 2)?),
            ("zero-pole", &zp, shift_zero_pole_pair(&zp, 0, 1, dir)?),
            ("coalesced", &co, shift_coalesced(&co, 1, dir)?),
        ];
        for (kind, before, shift) in &shifts {
            t.check(gauge_residual(&before.matrix, shift).is_zero(), || format!("{kind} shift, instance {k}"));
        }
    }
    Ok(())
}

fn hirota<F: Scalar>(cfg: &RunConfig, t: &mut Tally) -> Result<(), Error> {
    let mut rng = rng(cfg.seed, 3);
    let mut done = 0;
    while done < HIROTA_CONNECTIONS {
        let n = 3 + done % 2;
        let zeros = instances::generic_points(&mut rng, n, 0);
        let conn = instances::zero_connection(&mut rng, 2, &zeros)?;
        let results: Vec<_> = (1..=2)
            .flat_map(|k| disjoint_pairs(n, k))
            .map(|(i, j)| hirota_check(&conn, &i, &j))
            .collect();
        if results.iter().any(|r| matches!(r, Err(Error::NonGeneric(_)))) {
            t.skipped += 1;
            if t.skipped > MAX_REDRAWS {
                return Err(Error::NonGeneric("no generic connection found".into()));
            }
            continue;
        }
        for r in results {
            let (lhs, rhs) = r?;
            let (lhs, rhs) = (lift::scalar::<F>(&lhs), lift::scalar::<F>(&rhs));
            t.check(lhs.close(&rhs, cfg.tol), || format!("connection {done}: {lhs} vs {rhs}"));
        }
        done += 1;
    }
    Ok(())
}

fn projection<F: Scalar>(cfg: &RunConfig, ensembles: &[EnsembleSpec<Q>], t: &mut Tally) -> Result<(), Error> {
    for (k, spec) in ensembles.iter().enumerate() {
        let spec = lift::ensemble::<F>(spec)?;
        let kern = gram_kernel(&spec)?.k;
        t.check(matrices_close(&kern.mul(&kern), &kern, cfg.tol), || format!("K² ≠ K on ensemble {k}"));
        let n = F::from_i64(spec.particles() as i64);
        t.check(kern.trace().close(&n, cfg.tol), || format!("trace K ≠ N on ensemble {k}"));
    }
    Ok(())
}

fn oracle<F: Scalar>(cfg: &RunConfig, ensembles: &[EnsembleSpec<Q>], t: &mut Tally) -> Result<(), Error> {
    for (k, spec) in ensembles.iter().enumerate() {
        let spec = lift::ensemble::<F>(spec)?;
        let kernel = gram_kernel(&spec)?;
        let sets = subsets(spec.phase().len());
        let brute = brute_force_gaps(&spec, &sets, cfg.cap)?;
        for (y, b) in sets.iter().zip(&brute) {
            t.check(gap_from_kernel(&kernel, y).close(b, cfg.tol), || format!("ensemble {k}, Y = {y:?}"));
        }
    }
    Ok(())
}

fn det_tau<F: Scalar>(cfg: &RunConfig, ensembles: &[EnsembleSpec<Q>], t: &mut Tally) -> Result<(), Error> {
    let simple = ensembles.iter().filter(|s| s.n().len() == 1 && s.m().len() == 1);
    for (k, spec) in simple.enumerate() {
        let spec = lift::ensemble::<F>(spec)?;
        let size = spec.phase().len();
        for y in subsets(size) {
            let (lhs, rhs) = det_equals_tau_check(&BundleModel::new(spec.clone(), y.clone())?)?;
            t.check(lhs.close(&rhs, cfg.tol), || format!("ensemble {k}, Y = {y:?}"));
        }
        let kern = gram_kernel(&spec)?.k;
        for x in 0..size {
            for y in 0..size {
                let delta = if x == y { F::one() } else { F::zero() };
                let want = delta - kern.get(y, x).clone();
                t.check(kernel_entry_ratio(&spec, x, y)?.close(&want, cfg.tol), || format!("entry ({y}, {x}) of ensemble {k}"));
            }
        }
    }
    Ok(())
}

fn singular(e: &Error) -> bool {
    matches!(e, Error::SingularStep(_) | Error::ZeroDenominator)
}

fn dual<F: Scalar>(cfg: &RunConfig, t: &mut Tally) -> Result<(), Error> {
    let mut rng = rng(cfg.seed, 4);
    let mut done = 0;
    while done < PAINLEVE_STATES {
        let st = lift::dpv_state::<F>(&instances::random_dpv_state(&mut rng));
        match dpv_step(&st).and_then(|next| tau_second_dpv_pair(&st, &next)) {
            Ok((a, b)) => {
                t.check(a.close(&b, cfg.tol), || format!("dPV state {st:?}"));
                done += 1;
            }
            Err(e) if singular(&e) => t.skipped += 1,
            Err(e) => return Err(e),
        }
        if t.skipped > MAX_REDRAWS {
            return Err(Error::SingularStep("no regular dPV state found".into()));
        }
    }
    done = 0;
    while done < PAINLEVE_STATES {
        let st = lift::dpvi_state::<F>(&instances::random_dpvi_state(&mut rng));
        match dpvi_step(&st).and_then(|next| tau_second_dpvi_pair(&st, &next)) {
            Ok((a, b)) => {
                t.check(a.close(&b, cfg.tol), || format!("dPVI state {st:?}"));
                done += 1;
            }
            Err(e) if singular(&e) => t.skipped += 1,
            Err(e) => return Err(e),
        }
        if t.skipped > MAX_REDRAWS {
            return Err(Error::SingularStep("no regular dPVI state found".into()));
        }
    }
    Ok(())
}

fn check_sweep<F: Scalar>(sweep: &LimitSweep<F>, tol: f64, t: &mut Tally) {
    let (i, j) = (sweep.i, sweep.j);
    t.check(sweep.closed_form_agrees(tol), || format!("({i}, {j}): engine differs from the closed form"));
    let run = sweep.richardson_run(0.3, 0.7);
    t.check(run >= 4, || format!("({i}, {j}): Richardson ratio in [0.3, 0.7] on only {run} halvings"));
    let orders = sweep.lim1_orders();
    t.check(orders.iter().all(|&o| o >= 1.0), || format!("({i}, {j}): residual orders {orders:?}"));
}

/// Two rank-one sites; the generator uses the seed directly. Some random
/// sites are still pre-asymptotic at ε = 2⁻⁵, so the sweep runs to 2⁻¹².
fn limit(cfg: &RunConfig, t: &mut Tally) -> Result<(), Error> {
    let sites = instances::random_limit_sites(&mut instances::rng(cfg.seed), 2, 2);
    let eps: Vec<Q> = dyadic_eps(3, 12);
    for (i, j) in [(0, 1), (0, 0), (1, 1)] {
        match cfg.mode {
            Mode::Exact => check_sweep(&limit_sweep(&sites, i, j, &eps)?, cfg.tol, t),
            Mode::Float => {
                let v = |x: &[Q]| x.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
                let fsites = sites
                    .iter()
                    .map(|s| RankOneSite::new(s.y.to_f64(), s.alpha.to_f64(), s.beta.to_f64(), v(&s.w), v(&s.w_prime)))
                    .collect::<Result<Vec<_>, _>>()?;
                let feps: Vec<f64> = eps.iter().map(Scalar::to_f64).collect();
                check_sweep(&limit_sweep_float(&fsites, i, j, &feps)?, cfg.tol, t);
            }
        }
    }
    Ok(())
}
