use super::connection::DConnection;
use super::frame::{approx_equal, SingularityFrame, SingularityKind};
use crate::field::{Matrix, Scalar};

/// One failed structural check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub frames: Vec<usize>,
    pub message: String,
}

fn check_frame<F: Scalar>(
    conn: &DConnection<F>,
    inv: Option<&crate::field::RatMat<F>>,
    f: &SingularityFrame<F>,
) -> Vec<String> {
    let a = &conn.matrix;
    let loc = &f.location;
    let mut out = Vec::new();
    let det_order = a.det().order_at(loc);
    let entry_order = a.order_at(loc).unwrap_or(0);
    match f.kind {
        SingularityKind::SimpleZero => {
            if entry_order < 0 {
                out.push(format!("entries have a pole at {loc}"));
            } else {
                if det_order != Some(1) {
                    out.push(format!("det has order {det_order:?} at {loc}, expected 1"));
                }
                match a.eval_at(loc) {
                    Ok(v) => {
                        let ker = v.nullspace();
                        if ker.len() != 1 {
                            out.push(format!("kernel at {loc} has dimension {}", ker.len()));
                        }
                        if !super::frame::approx_kernel(&v, &f.w) {
                            out.push(format!("w is not in ker A({loc})"));
                        }
                    }
                    Err(e) => out.push(e.to_string()),
                }
            }
        }
        SingularityKind::SimplePole => {
            if entry_order != -1 {
                out.push(format!("entries have order {entry_order} at {loc}, expected −1"));
            }
            if det_order != Some(-1) {
                out.push(format!("det has order {det_order:?} at {loc}, expected −1"));
            }
            if let Ok(res) = a.residue_at(loc) {
                if res.rank() != 1 {
                    out.push(format!("residue at {loc} has rank {}", res.rank()));
                }
                if !approx_equal(&Matrix::outer(&f.w, &f.w_prime), &res) {
                    out.push(format!("residue at {loc} is not w·w′ᵗ"));
                }
            }
            if let Some(inv) = inv {
                if inv.order_at(loc).unwrap_or(0) < 0 {
                    out.push(format!("A⁻¹ has a pole at the pole {loc}"));
                }
            }
        }
        SingularityKind::CoalescedRankOne => {
            if entry_order != -1 {
                out.push(format!("entries have order {entry_order} at {loc}, expected −1"));
            }
            if det_order != Some(0) {
                out.push(format!("det has order {det_order:?} at {loc}, expected 0"));
            }
            if let Ok(res) = a.residue_at(loc) {
                if res.rank() != 1 {
                    out.push(format!("residue at {loc} has rank {}", res.rank()));
                }
            }
            if let (Some(inv), Some(wdd)) = (inv, &f.w_double_prime) {
                if let Err(e) = SingularityFrame::coalesced_with(
                    inv,
                    loc.clone(),
                    f.w.clone(),
                    f.w_prime.clone(),
                    wdd.clone(),
                ) {
                    out.push(e.to_string());
                }
            }
        }
    }
    out
}

/// Checks every frame against its declared kind, then the pairwise condition
/// that valid frames of the same kind never sit at a nonzero integer distance
/// and that no two frames share a location.
pub fn verify_singularity_structure<F: Scalar>(conn: &DConnection<F>) -> Vec<Violation> {
    let mut out = Vec::new();
    let inv = conn.matrix.mat_inverse().ok();
    if inv.is_none() {
        out.push(Violation {
            frames: vec![],
            message: "matrix is not invertible".into(),
        });
    }
    let mut valid = vec![true; conn.frames.len()];
    for (i, f) in conn.frames.iter().enumerate() {
        for message in check_frame(conn, inv.as_ref(), f) {
            valid[i] = false;
            out.push(Violation {
                frames: vec![i],
                message,
            });
        }
    }
    // Pairwise conditions only make sense between structurally valid frames.
    for i in 0..conn.frames.len() {
        for j in i + 1..conn.frames.len() {
            if !(valid[i] && valid[j]) {
                continue;
            }
            let (fi, fj) = (&conn.frames[i], &conn.frames[j]);
            let d = fi.location.clone() - fj.location.clone();
            if d.is_zero() {
                out.push(Violation {
                    frames: vec![i, j],
                    message: format!("frames {i} and {j} share the location {}", fi.location),
                });
            } else if fi.kind == fj.kind && d.to_integer().is_some() {
                out.push(Violation {
                    frames: vec![i, j],
                    message: format!(
                        "frames {i} and {j} differ by the integer {d}"
                    ),
                });
            }
        }
    }
    out
}
