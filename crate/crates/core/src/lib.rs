//! Numerical laboratory for the Benjamin-Ono equation
//! `u_t + H u_xx + u u_x = 0` on a periodic box.
//!
//! Modules:
//! - [`spectral`]: grids, fields, Fourier multipliers, line-corrected operators.
//! - [`fracops`]: commutator identities and ratio ensembles.
//! - [`weights`]: truncated weights, weighted norms, Muckenhoupt constants.
//! - [`solver`]: integrating-factor RK4 evolution, solitons, conserved quantities.
//! - [`persistence`]: weighted-norm persistence experiments.

pub mod error;
pub mod fracops;
pub mod persistence;
pub mod quad;
pub mod solver;
pub mod special;
pub mod weights;
pub mod spectral;

pub use error::{LabError, Result};
