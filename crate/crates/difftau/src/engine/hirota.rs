use super::connection::DConnection;
use super::frame::SingularityKind;
use super::shift::shift_simple_zero_pair;
use crate::error::{Error, Result};
use crate::field::{dot, Matrix, Scalar};

/// Both sides of the determinantal Hirota identity.
///
/// lhs: τ(u + Σ_{i∈I} e_i − Σ_{j∈J} e_j)/τ(u) by composing the moves
/// (I[0], J[0]), (I[1], J[1]), … in the given order;
/// rhs: det[⟨w_j, w′_i⟩/(u_i + 1 − u_j)] with rows I and columns J.
pub fn hirota_check<F: Scalar>(conn: &DConnection<F>, rows: &[usize], cols: &[usize]) -> Result<(F, F)> {
    if rows.len() != cols.len() {
        return Err(Error::InvalidInput("|I| must equal |J|".into()));
    }
    if rows.iter().any(|i| cols.contains(i)) {
        return Err(Error::InvalidInput("I and J must be disjoint".into()));
    }
    for &k in rows.iter().chain(cols) {
        conn.expect_kind(k, SingularityKind::SimpleZero)?;
    }
    let m = Matrix::from_fn(rows.len(), cols.len(), |r, c| {
        let fi = &conn.frames[rows[r]];
        let fj = &conn.frames[cols[c]];
        dot(&fj.w, &fi.w_prime) / (fi.location.clone() + F::one() - fj.location.clone())
    });
    let rhs = m.det();
    let mut current = conn.clone();
    let mut lhs = F::one();
    for (&i, &j) in rows.iter().zip(cols) {
        let s = shift_simple_zero_pair(&current, i, j)?;
        lhs = lhs * s.ratio;
        current = s.connection;
    }
    Ok((lhs, rhs))
}
