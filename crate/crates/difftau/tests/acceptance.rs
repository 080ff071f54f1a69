//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use difftau::bundles::{det_equals_tau_check, is_trivial, kernel_entry_ratio, BundleModel};
use difftau::engine::{gauge_residual, hirota_check, shift_coalesced, shift_simple_zero_pair, shift_zero_pole_pair};
use difftau::ensembles::{
    allowed_indices, brute_force_gaps, gap_from_kernel, gram_kernel, EnsembleSpec, GapSet, DEFAULT_CAP,
};
use difftau::field::{q, Scalar, Q};
use difftau::instances::{self, InstanceRng};
use difftau::limit::{dyadic_eps, limit_sweep};
use difftau::painleve::{dpv_step, dpvi_step, hahn_orbit, tau_second_dpv_pair, tau_second_dpvi_pair};
use difftau::Error;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

/// The ensembles shared by criteria 1, 2 and 7: |X| ≤ 8, N ≤ 3, p, q ≤ 2.
fn oracle_ensembles() -> Vec<EnsembleSpec<Q>> {
    (0..24u64)
        .map(|k| {
            let n = 1 + (k % 3) as usize;
            let p = (1 + (k / 3 % 2) as usize).min(n);
            let qf = (1 + (k / 6 % 2) as usize).min(n);
            let size = 8 - (k / 12) as usize * 2 - (k % 2) as usize;
            instances::random_ensemble(&mut instances::rng(1000 + k), size, n, p, qf)
        })
        .collect()
}

fn subsets(size: usize) -> Vec<Vec<usize>> {
    (0..1u32 << size)
        .map(|mask| (0..size).filter(|i| mask >> i & 1 == 1).collect())
        .collect()
}

/// Every union of disjoint, non-touching integral segments inside X.
fn segment_sets(spec: &EnsembleSpec<Q>) -> Result<Vec<Vec<usize>>, Error> {
    let lo = <Q as Scalar>::to_integer(&spec.phase()[0]).unwrap();
    let size = spec.phase().len() as i64;
    let mut out = Vec::new();
    for mask in 1u32..1 << size {
        let mut segments = Vec::new();
        let mut start = None;
        for i in 0..=size {
            let inside = i < size && mask >> i & 1 == 1;
            match (inside, start) {
                (true, None) => start = Some(i),
                (false, Some(a)) => {
                    segments.push((q(lo + a, 1), q(lo + i - 1, 1)));
                    start = None;
                }
                _ => {}
            }
        }
        out.push(allowed_indices(spec, &GapSet::Segments(segments))?);
    }
    Ok(out)
}

fn criterion_1(ensembles: &[EnsembleSpec<Q>]) -> Result<Outcome, Error> {
    let mut checked = 0usize;
    for (k, spec) in ensembles.iter().enumerate() {
        let kernel = gram_kernel(spec)?;
        let mut sets = subsets(spec.phase().len());
        sets.extend(segment_sets(spec)?);
        let brute = brute_force_gaps(spec, &sets, DEFAULT_CAP)?;
        for (y, b) in sets.iter().zip(brute) {
            if gap_from_kernel(&kernel, y) != b {
                return Ok(fail(format!("ensemble {k}, allowed set {y:?}")));
            }
            checked += 1;
        }
    }
    Ok(pass(format!("{} ensembles, {checked} gap sets, exact", ensembles.len())))
}

fn criterion_2(ensembles: &[EnsembleSpec<Q>]) -> Result<Outcome, Error> {
    let (mut models, mut entries) = (0usize, 0usize);
    let simple: Vec<_> = ensembles.iter().filter(|s| s.n().len() == 1 && s.m().len() == 1).collect();
    for (k, spec) in simple.iter().enumerate() {
        let size = spec.phase().len();
        for y in subsets(size) {
            let (lhs, rhs) = det_equals_tau_check(&BundleModel::new((*spec).clone(), y.clone())?)?;
            if lhs != rhs {
                return Ok(fail(format!("τ ≠ det on ensemble {k}, Y = {y:?}")));
            }
            models += 1;
        }
        let kern = gram_kernel(spec)?.k;
        for x in 0..size {
            for y in 0..size {
                let delta = if x == y { q(1, 1) } else { q(0, 1) };
                if kernel_entry_ratio(spec, x, y)? != delta - kern.get(y, x).clone() {
                    return Ok(fail(format!("kernel entry ({y}, {x}) on ensemble {k}")));
                }
                entries += 1;
            }
        }
    }
    Ok(pass(format!("{} ensembles with p = q = 1, {models} bundles, {entries} kernel entries", simple.len())))
}

const HAHN_CASES: [(usize, usize); 3] = [(2, 4), (2, 6), (3, 6)];

fn hahn_parameters() -> [(Q, Q); 2] {
    [(q(1, 1), q(2, 1)), (q(3, 2), q(1, 2))]
}

fn criterion_3() -> Result<Outcome, Error> {
    let (mut taus, mut steps) = (0usize, 0usize);
    for (n, big_m) in HAHN_CASES {
        for (alpha, beta) in hahn_parameters() {
            let orbit = hahn_orbit(n, big_m, &alpha, &beta)?;
            let label = format!("(N, M, α, β) = ({n}, {big_m}, {alpha}, {beta})");
            for s in n as i64 + 1..=big_m as i64 {
                if orbit.tau_matches(s, 0.0) != Some(true) {
                    return Ok(fail(format!("τ identity at s = {s}, {label}")));
                }
                taus += 1;
                if s < big_m as i64 {
                    if orbit.step_matches(s, 0.0) != Some(true) {
                        return Ok(fail(format!("dPVI step at s = {s}, {label}")));
                    }
                    steps += 1;
                }
            }
        }
    }
    Ok(pass(format!("6 orbits, {taus} τ identities, {steps} steps, exact")))
}

fn criterion_4() -> Result<Outcome, Error> {
    let mut rng = instances::rng(4);
    let (mut dpv, mut dpvi, mut singular) = (0, 0, 0);
    while dpv < 100 {
        let st = instances::random_dpv_state(&mut rng);
        let next = match dpv_step(&st) {
            Ok(x) => x,
            Err(Error::SingularStep(_)) => {
                singular += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match tau_second_dpv_pair(&st, &next) {
            Ok((a, b)) if a == b => dpv += 1,
            Ok(_) => return Ok(fail(format!("dPV expressions differ at {st:?}"))),
            Err(Error::SingularStep(_)) | Err(Error::ZeroDenominator) => singular += 1,
            Err(e) => return Err(e),
        }
    }
    while dpvi < 100 {
        let st = instances::random_dpvi_state(&mut rng);
        let next = match dpvi_step(&st) {
            Ok(x) => x,
            Err(Error::SingularStep(_)) => {
                singular += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match tau_second_dpvi_pair(&st, &next) {
            Ok((a, b)) if a == b => dpvi += 1,
            Ok(_) => return Ok(fail(format!("dPVI expressions differ at {st:?}"))),
            Err(Error::SingularStep(_)) | Err(Error::ZeroDenominator) => singular += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(pass(format!("{dpv} dPV and {dpvi} dPVI states agree ({singular} singular draws redrawn)")))
}

fn disjoint_pairs(n: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let sets: Vec<Vec<usize>> = subsets(n).into_iter().filter(|s| s.len() == k).collect();
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

fn criterion_5() -> Result<Outcome, Error> {
    let mut rng = instances::rng(5);
    let (mut conns, mut checks, mut bilinear, mut redrawn) = (0, 0, 0, 0);
    while conns < 10 {
        let n = 3 + conns % 2;
        let zeros = instances::generic_points(&mut rng, n, 0);
        let conn = instances::zero_connection(&mut rng, 2, &zeros)?;
        let mut results = Vec::new();
        for k in 1..=2 {
            for (rows, cols) in disjoint_pairs(n, k) {
                results.push((k, hirota_check(&conn, &rows, &cols)));
            }
        }
        if results.iter().any(|(_, r)| matches!(r, Err(Error::NonGeneric(_)))) {
            redrawn += 1;
            continue;
        }
        for (k, r) in results {
            let (lhs, rhs) = r?;
            if lhs != rhs {
                return Ok(fail(format!("connection {conns}: lhs {lhs} ≠ rhs {rhs}")));
            }
            checks += 1;
            bilinear += usize::from(k == 2);
        }
        conns += 1;
    }
    Ok(pass(format!(
        "{conns} connections, {checks} identities ({bilinear} bilinear 2×2), {redrawn} non-generic draws redrawn"
    )))
}

fn criterion_6() -> Result<Outcome, Error> {
    let mut rng: InstanceRng = instances::rng(6);
    let mut checks = 0;
    for k in 0..30 {
        let dir = if k % 2 == 0 { -1 } else { 1 };
        let zeros = instances::generic_points(&mut rng, 3, 0);
        let conn = instances::zero_connection(&mut rng, 2, &zeros)?;
        let s = shift_simple_zero_pair(&conn, 0, 2)?;
        let zp_zeros = instances::generic_points(&mut rng, 2, 0);
        let zp_poles = instances::generic_points(&mut rng, 2, 2);
        let zp = instances::zero_pole_connection(&mut rng, 2, &zp_zeros, &zp_poles)?;
        let t = shift_zero_pole_pair(&zp, 0, 1, dir)?;
        let pts = instances::generic_points(&mut rng, 2, 0);
        let co = instances::coalesced_connection(&mut rng, 2, &pts)?;
        let u = shift_coalesced(&co, 1, dir)?;
        for (name, before, shift) in [("zero pair", &conn, &s), ("zero–pole", &zp, &t), ("coalesced", &co, &u)] {
            if !gauge_residual(&before.matrix, shift).is_zero() {
                return Ok(fail(format!("{name} shift, instance {k}")));
            }
            checks += 1;
        }
    }
    Ok(pass(format!("30 instances × 3 shift kinds, {checks} zero residuals")))
}

fn criterion_7(ensembles: &[EnsembleSpec<Q>]) -> Result<Outcome, Error> {
    for (k, spec) in ensembles.iter().enumerate() {
        let kern = gram_kernel(spec)?.k;
        if kern.mul(&kern) != kern {
            return Ok(fail(format!("K² ≠ K on ensemble {k}")));
        }
        if kern.trace() != q(spec.particles() as i64, 1) {
            return Ok(fail(format!("trace K ≠ N on ensemble {k}")));
        }
    }
    Ok(pass(format!("{} ensembles", ensembles.len())))
}

fn criterion_8() -> Result<Outcome, Error> {
    let sites = instances::random_limit_sites(&mut instances::rng(0), 2, 2);
    let eps = dyadic_eps::<Q>(3, 8);
    let mut notes = Vec::new();
    for (i, j) in [(0, 1), (0, 0), (1, 1)] {
        let sweep = limit_sweep(&sites, i, j, &eps)?;
        if !sweep.closed_form_agrees(0.0) {
            return Ok(fail(format!("engine ≠ closed form for ({i}, {j})")));
        }
        let run = sweep.richardson_run(0.3, 0.7);
        if run < 4 {
            let ratios: Vec<String> = sweep.rows.iter().filter_map(|r| r.ratio.map(|x| format!("{x:.3}"))).collect();
            return Ok(fail(format!("({i}, {j}): Richardson run {run}, ratios {}", ratios.join(" "))));
        }
        let orders = sweep.lim1_orders();
        if orders.iter().any(|&o| o < 1.0) {
            return Ok(fail(format!("lim1 residual orders {orders:?}")));
        }
        let last = sweep.rows.last().unwrap();
        notes.push(format!(
            "({i},{j}) target {:.4} measured {:.4} run {run}",
            last.target.to_f64(),
            last.measured.to_f64()
        ));
    }
    Ok(pass(format!("ε = 2⁻³…2⁻⁸, closed form exact; {}", notes.join("; "))))
}

fn criterion_9() -> Result<Outcome, Error> {
    let mut cases = 0;
    for (n, big_m) in HAHN_CASES {
        for (alpha, beta) in hahn_parameters() {
            let spec = EnsembleSpec::hahn(n, big_m, alpha.clone(), beta.clone())?;
            let model = BundleModel::new(spec, (0..n - 1).collect())?;
            if is_trivial(&model) {
                return Ok(fail(format!("|Y| = N−1 reported trivial for ({n}, {big_m})")));
            }
            let orbit = hahn_orbit(n, big_m, &alpha, &beta)?;
            let low = orbit.row(n as i64 - 2).ok_or_else(|| Error::InternalMismatch("missing s = N−2".into()))?;
            if low.trivial || low.gap != q(0, 1) {
                return Ok(fail(format!("s = N−2 row not flagged as a τ zero for ({n}, {big_m})")));
            }
            let at_n = orbit.row(n as i64).and_then(|r| r.step.clone());
            if !matches!(at_n, Some(Err(Error::SingularStep(_)))) {
                return Ok(fail(format!("no SingularStep at s = N for ({n}, {big_m}): {at_n:?}")));
            }
            cases += 1;
        }
    }
    Ok(pass(format!("{cases} Hahn cases: non-trivial at |Y| = N−1, τ zero and SingularStep reported")))
}

fn main() -> ExitCode {
    let ensembles = oracle_ensembles();
    type Check<'a> = Box<dyn Fn() -> Result<Outcome, Error> + 'a>;
    let criteria: Vec<(&str, Duration, Check)> = vec![
        ("gap oracle equivalence", Duration::from_secs(30), Box::new(|| criterion_1(&ensembles))),
        ("tau equals composition determinant", Duration::from_secs(30), Box::new(|| criterion_2(&ensembles))),
        ("Hahn orbit against dPVI", Duration::from_secs(120), Box::new(criterion_3)),
        ("dual tau expressions", Duration::from_secs(10), Box::new(criterion_4)),
        ("Hirota identities", Duration::from_secs(20), Box::new(criterion_5)),
        ("gauge covariance", Duration::from_secs(20), Box::new(criterion_6)),
        ("projection laws", Duration::from_secs(30), Box::new(|| criterion_7(&ensembles))),
        ("continuous limit", Duration::from_secs(60), Box::new(criterion_8)),
        ("degeneracy detection", Duration::from_secs(60), Box::new(criterion_9)),
    ];
    let mut all = true;
    for (k, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(o) if elapsed <= *limit => (o.ok, o.detail),
            Ok(o) => (false, format!("{} (over the {}s budget)", o.detail, limit.as_secs())),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= ok;
        println!(
            "criterion {}: {} {name} [{:.2}s] {detail}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
