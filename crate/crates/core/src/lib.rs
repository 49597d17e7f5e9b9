//! Analysis of bipartite, binary-outcome Bell inequalities written in
//! Collins-Gisin (CG) coordinates.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: scenarios, CG tables, behaviors and the Bell functional.
//! * [`format`]: the plain-text inequality file format.
//! * [`localpoly`]: deterministic strategies, local bounds, facet checks, liftings.
//! * [`symmetry`]: relabelings, canonical forms and full-correlation form.
//! * [`quantum`]: two-qubit Born rule and the see-saw optimizer.
//! * [`robustness`]: white-noise visibility and symmetric detection efficiency.

pub mod error;
pub mod fixtures;
pub mod format;
pub mod localpoly;
pub mod model;
pub mod quantum;
pub mod rank;
pub mod robustness;
pub mod symmetry;

pub use error::{Error, Result};
pub use model::{Behavior, CgTable, Scenario};

/// Exact rational type used for white-noise values and no-click values.
pub type Rational = num_rational::Rational64;
