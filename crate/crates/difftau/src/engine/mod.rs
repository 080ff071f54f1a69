//! Isomonodromy shifts of rational d-connections with τ-ratio bookkeeping.

mod connection;
mod frame;
mod hirota;
mod ledger;
mod shift;
mod verify;

pub use connection::{DConnection, InfinityType};
pub use frame::{SingularityFrame, SingularityKind};
pub use hirota::hirota_check;
pub use ledger::{decompose_zero_shift, tau_second_ratio, LedgerStep, TauLedger, Walk, LEXICOGRAPHIC};
pub use shift::{gauge_det, gauge_residual, shift_coalesced, shift_simple_zero_pair, shift_zero_pole_pair, Shift};
pub use verify::{verify_singularity_structure, Violation};
