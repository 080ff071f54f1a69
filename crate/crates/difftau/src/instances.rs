//! Seeded random instances shared by the test suites and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{DConnection, SingularityKind};
use crate::error::Result;
use crate::field::{dot, q, Field, Matrix, Poly, RatFn, RatMat, Q};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fractional offsets with pairwise non-integer differences.
const OFFSETS: [(i64, i64); 12] = [
    (1, 3),
    (1, 5),
    (2, 7),
    (3, 11),
    (5, 13),
    (7, 17),
    (1, 19),
    (4, 23),
    (6, 29),
    (9, 31),
    (10, 37),
    (12, 41),
];

/// Random rational n/d with |n| ≤ num_max, 1 ≤ d ≤ den_max.
pub fn random_q(rng: &mut InstanceRng, num_max: i64, den_max: i64) -> Q {
    q(rng.gen_range(-num_max..=num_max), rng.gen_range(1..=den_max))
}

/// Random nonzero rational.
pub fn random_nonzero_q(rng: &mut InstanceRng, num_max: i64, den_max: i64) -> Q {
    loop {
        let v = random_q(rng, num_max, den_max);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Random positive rational in (0, num_max].
pub fn random_positive_q(rng: &mut InstanceRng, num_max: i64, den_max: i64) -> Q {
    q(rng.gen_range(1..=num_max), rng.gen_range(1..=den_max))
}

pub fn random_vec(rng: &mut InstanceRng, n: usize) -> Vec<Q> {
    loop {
        let v: Vec<Q> = (0..n).map(|_| random_q(rng, 5, 3)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// Pair (u, v) with ⟨u, v⟩ ≠ 0.
fn paired_vectors(rng: &mut InstanceRng, n: usize) -> (Vec<Q>, Vec<Q>) {
    loop {
        let u = random_vec(rng, n);
        let v = random_vec(rng, n);
        if !dot(&u, &v).is_zero() {
            return (u, v);
        }
    }
}

/// Pair (u, v) with ⟨u, v⟩ = 0, both nonzero.
fn orthogonal_vectors(rng: &mut InstanceRng, n: usize) -> (Vec<Q>, Vec<Q>) {
    let u = random_vec(rng, n);
    loop {
        let mut v = random_vec(rng, n);
        let k = u.iter().position(|x| !x.is_zero()).unwrap();
        let excess = dot(&u, &v) / u[k].clone();
        v[k] = v[k].clone() - excess;
        if v.iter().any(|x| !x.is_zero()) {
            return (u, v);
        }
    }
}

pub fn random_invertible(rng: &mut InstanceRng, n: usize) -> Matrix<Q> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| random_q(rng, 4, 3));
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Distinct locations k + offset with pairwise non-integer differences.
pub fn generic_points(rng: &mut InstanceRng, count: usize, first_offset: usize) -> Vec<Q> {
    (0..count)
        .map(|i| {
            let (n, d) = OFFSETS[(first_offset + i) % OFFSETS.len()];
            q(rng.gen_range(-3..=3), 1) + q(n, d)
        })
        .collect()
}

/// (z − a)·Π + (I − Π) with Π = u·vᵗ/⟨u, v⟩: a single simple zero at a, no poles.
fn zero_factor(u: &[Q], v: &[Q], a: &Q) -> RatMat<Q> {
    let proj = Matrix::outer(u, v).scale(&(q(1, 1) / dot(u, v)));
    let n = u.len();
    let lin = RatFn::from_poly(Poly::linear(a.clone()));
    RatMat::from_fn(n, n, |i, j| {
        let p = RatFn::constant(proj.get(i, j).clone());
        let id = if i == j { RatFn::one() } else { RatFn::zero() };
        p.clone() * lin.clone() + id - p
    })
}

/// Polynomial m×m connection C·Π(zero factors) with simple zeros at `zeros`.
pub fn zero_connection(rng: &mut InstanceRng, m: usize, zeros: &[Q]) -> Result<DConnection<Q>> {
    let mut a = RatMat::from_scalar(&random_invertible(rng, m));
    for z in zeros {
        let (u, v) = paired_vectors(rng, m);
        a = a.mul(&zero_factor(&u, &v, z));
    }
    let kinds: Vec<(Q, SingularityKind)> = zeros
        .iter()
        .map(|z| (z.clone(), SingularityKind::SimpleZero))
        .collect();
    DConnection::detect(a, &kinds)
}

/// C·Π(I + (b_i − a_i)/(z − b_i)·u_i v_iᵗ/⟨u_i, v_i⟩): zeros at a_i, poles at b_i.
/// Frames are ordered zero₀, pole₀, zero₁, pole₁, ….
pub fn zero_pole_connection(rng: &mut InstanceRng, m: usize, zeros: &[Q], poles: &[Q]) -> Result<DConnection<Q>> {
    assert_eq!(zeros.len(), poles.len());
    let mut a = RatMat::from_scalar(&random_invertible(rng, m));
    for (za, pb) in zeros.iter().zip(poles) {
        let (u, v) = paired_vectors(rng, m);
        let r0 = Matrix::outer(&u, &v).scale(&((pb.clone() - za.clone()) / dot(&u, &v)));
        a = a.mul(&RatMat::identity_plus_pole(&r0, pb));
    }
    let kinds: Vec<(Q, SingularityKind)> = zeros
        .iter()
        .zip(poles)
        .flat_map(|(z, p)| [(z.clone(), SingularityKind::SimpleZero), (p.clone(), SingularityKind::SimplePole)])
        .collect();
    DConnection::detect(a, &kinds)
}

/// C·Π(I + N_i/(z − c_i)) with nilpotent rank-one N_i: coalesced singularities at c_i.
pub fn coalesced_connection(rng: &mut InstanceRng, m: usize, points: &[Q]) -> Result<DConnection<Q>> {
    let mut a = RatMat::from_scalar(&random_invertible(rng, m));
    for c in points {
        let (u, v) = orthogonal_vectors(rng, m);
        a = a.mul(&RatMat::identity_plus_pole(&Matrix::outer(&u, &v), c));
    }
    let kinds: Vec<(Q, SingularityKind)> = points
        .iter()
        .map(|c| (c.clone(), SingularityKind::CoalescedRankOne))
        .collect();
    DConnection::detect(a, &kinds)
}

/// Random composition of `total` into `parts` positive pieces.
fn random_composition(rng: &mut InstanceRng, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![1; parts];
    for _ in parts..total {
        let i = rng.gen_range(0..parts);
        out[i] += 1;
    }
    out
}

/// Random ensemble on consecutive integers with positive rational weight
/// tables, |X| = size, N particles and p, q weight families (p, q ≤ N).
/// Instances with a singular Gram matrix are redrawn.
pub fn random_ensemble(
    rng: &mut InstanceRng,
    size: usize,
    particles: usize,
    p: usize,
    q_families: usize,
) -> crate::ensembles::EnsembleSpec<Q> {
    use crate::ensembles::{gram_kernel, EnsembleSpec, Weight};
    let start: i64 = rng.gen_range(-3..=1);
    let phase: Vec<Q> = (0..size as i64).map(|x| q(start + x, 1)).collect();
    loop {
        let table = |rng: &mut InstanceRng| {
            Weight::Table((0..size).map(|_| random_positive_q(rng, 6, 4)).collect())
        };
        let first = (0..p).map(|_| table(rng)).collect();
        let second = (0..q_families).map(|_| table(rng)).collect();
        let n = random_composition(rng, particles, p);
        let m = random_composition(rng, particles, q_families);
        if let Ok(spec) = EnsembleSpec::new(phase.clone(), first, second, n, m) {
            if gram_kernel(&spec).is_ok() {
                return spec;
            }
        }
    }
}

/// Rank-two dPV connection C·diag(ρ)·C⁻¹·Π(I + (b_i−a_i)/(z−b_i)·P_i) with
/// zeros a₁, a₂ and poles b₁, b₂ at generic points; returns it with ρ.
pub fn dpv_connection(rng: &mut InstanceRng) -> Result<(DConnection<Q>, [Q; 2])> {
    let rho = loop {
        let r = [random_nonzero_q(rng, 5, 3), random_nonzero_q(rng, 5, 3)];
        if r[0] != r[1] {
            break r;
        }
    };
    let c = random_invertible(rng, 2);
    let lead = c.mul(&Matrix::diag(rho.to_vec())).mul(&c.inverse()?);
    let zeros = generic_points(rng, 2, 0);
    let poles = generic_points(rng, 2, 2);
    let mut a = RatMat::from_scalar(&lead);
    for (za, pb) in zeros.iter().zip(&poles) {
        let (u, v) = paired_vectors(rng, 2);
        let r0 = Matrix::outer(&u, &v).scale(&((pb.clone() - za.clone()) / dot(&u, &v)));
        a = a.mul(&RatMat::identity_plus_pole(&r0, pb));
    }
    let kinds: Vec<(Q, SingularityKind)> = zeros
        .iter()
        .zip(&poles)
        .flat_map(|(z, p)| [(z.clone(), SingularityKind::SimpleZero), (p.clone(), SingularityKind::SimplePole)])
        .collect();
    Ok((DConnection::detect(a, &kinds)?, rho))
}

/// Random dPV state with balanced parameters.
pub fn random_dpv_state(rng: &mut InstanceRng) -> crate::painleve::DPVState<Q> {
    use crate::painleve::{DPVParams, DPVState};
    let a = [random_q(rng, 9, 4), random_q(rng, 9, 4)];
    let b = [random_q(rng, 9, 4), random_q(rng, 9, 4)];
    let d1 = random_q(rng, 9, 4);
    let d2 = -(d1.clone() + a[0].clone() + a[1].clone() + b[0].clone() + b[1].clone());
    let rho = [random_nonzero_q(rng, 6, 3), random_nonzero_q(rng, 6, 3)];
    DPVState {
        q: random_q(rng, 9, 5),
        p: random_nonzero_q(rng, 9, 5),
        params: DPVParams::new(a, b, [d1, d2], rho).expect("balanced by construction"),
    }
}

/// Random dPVI state with balanced parameters.
pub fn random_dpvi_state(rng: &mut InstanceRng) -> crate::painleve::DPVIState<Q> {
    use crate::painleve::{DPVIParams, DPVIState};
    let a = [random_q(rng, 9, 4), random_q(rng, 9, 4), random_q(rng, 9, 4)];
    let b = [random_q(rng, 9, 4), random_q(rng, 9, 4), random_q(rng, 9, 4)];
    let d1 = random_q(rng, 9, 4);
    let d2 = -(a.iter().chain(&b).fold(d1.clone(), |s, x| s + x.clone()));
    DPVIState {
        q: random_q(rng, 9, 5),
        r: random_q(rng, 9, 5),
        params: DPVIParams::new(a, b, [d1, d2]).expect("balanced by construction"),
    }
}

/// Rank-one limit sites at y = 0, 1, …, n−1 (plus a random rational shift)
/// with offsets α_i, β_i pairwise non-integer-distinct and ⟨w_i, w′_i⟩ ≠ 0.
pub fn random_limit_sites(rng: &mut InstanceRng, m: usize, n: usize) -> Vec<crate::limit::RankOneSite<Q>> {
    let start = rng.gen_range(0..OFFSETS.len());
    let offsets = generic_points(rng, 2 * n, start);
    let shift = random_q(rng, 3, 2);
    (0..n)
        .map(|i| {
            let (w, w_prime) = paired_vectors(rng, m);
            let y = q(i as i64, 1) + shift.clone();
            crate::limit::RankOneSite::new(y, offsets[2 * i].clone(), offsets[2 * i + 1].clone(), w, w_prime)
                .expect("paired vectors and distinct offsets")
        })
        .collect()
}
