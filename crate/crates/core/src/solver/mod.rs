//! Integrating-factor spectral solver for `u_t + sigma H u_xx + u u_x = 0`.

mod config;
mod conserved;
mod convention;
mod moment;
mod run;
mod soliton;
mod stepper;

pub use config::{ConfigRecord, DispersionSign, SolverConfig, DEFAULT_C_STAB};
pub use conserved::{conserved, ConservedTriple};
pub use convention::{
    resolve_convention, test_candidate, Candidate, CandidateResult, ConventionVerdict,
    PEAK_TOL_DX, SHAPE_TOL,
};
pub use moment::{edge_flux, first_moment, first_moment_rate, fit_moment_samples, MomentFit, FIT_TOL};
pub use run::{run, run_collect, run_streaming, run_with, ConservationDrift, RunOutcome, Snapshot};
pub use soliton::{eta, peak_location, soliton, Polarity};
pub use stepper::Stepper;
