//! Invariant hypersurfaces of linear prescribed mean curvature
//! `H(eta) = <eta, v> + lambda` in `R^{n+1}`.
//!
//! * [`model`]: parameters, the prescribed function and exact solutions.
//! * [`cylindrical`]: closed-form base curves of cylindrical flat examples
//!   and their numerical cross-check.
//! * [`phaseplane`]: the autonomous system for rotational profiles, its
//!   nullcline, equilibrium and monotonicity regions.
//! * [`orbits`]: orbit integration with event detection and profile
//!   reconstruction.
//! * [`classify`]: mapping traces onto the rotational classification.
//! * [`export`]: CSV / JSON / OBJ writers and readers.

pub mod classify;
pub mod cylindrical;
pub mod error;
pub mod export;
pub mod model;
pub mod ode;
pub mod orbits;
pub mod phaseplane;
pub mod polyline;

pub use error::{Error, Result};
pub use model::{eval_prescribed, special_solutions, ModelParams, PrescribedFunction, Setting, SpecialSolution};
