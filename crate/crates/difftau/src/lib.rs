//! τ-functions of rational difference connections on the projective line.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: exact/float scalars, polynomials, rational functions, matrices.
//! * [`engine`]: d-connections, singularity frames, isomonodromy shifts, τ ledgers.
//! * [`ensembles`]: discrete biorthogonal ensembles and gap probabilities.
//! * [`bundles`]: section spaces of the bundles L_Y, trivialization, τ = det.
//! * [`painleve`]: dPV and dPVI recurrences and their τ second ratios.
//! * [`limit`]: the continuum limit to the Schlesinger system.
//! * [`instances`]: seeded random generators used by tests and the CLI suite.

pub mod bundles;
pub mod error;
pub mod engine;
pub mod ensembles;
pub mod field;
pub mod instances;
pub mod limit;
pub mod painleve;

pub use error::{Error, Result};
