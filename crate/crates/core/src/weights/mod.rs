//! Truncated weights, weighted norms, Muckenhoupt constants and weighted
//! Hilbert bounds.

mod a2;
mod bracket;
mod hilbert;
mod norms;
mod truncated;

pub use a2::{
    a2_constant, a2_scan, expected_verdict, A2Level, A2Scan, A2Verdict, A2WeightKind,
    DIVERGENCE_RATIO, DIVERGENCE_STEPS, PLATEAU_TOL, SCALES_PER_LEVEL, SUSTAINED_RATIO,
};
pub use bracket::{bracket_derivatives, bracket_pow_derivatives, power_derivatives};
pub use hilbert::{interpolation_check, weighted_hilbert_ratio, InterpolationPair};
pub use norms::{sobolev_norm, weight_field, weighted_norm, z_norm, NormRecord, WeightKind};
pub use truncated::{build_weight, TruncatedWeight, WeightAudit, AUDIT_CEILING};
