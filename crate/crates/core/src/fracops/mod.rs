//! Commutator identities, inequality ensembles and the half-derivative of
//! power weights.

mod commutators;
mod ensemble;
mod general_argument;
mod halfderiv;
mod identities;
mod profile;

pub use commutators::{
    calderon_field, calderon_ratio, commutator_ratio_by_eta, commutator_ratio_by_f,
    frac_commutator, hilbert_commutator, leibniz_ratio, smoothing_ratio, LeibnizKind,
};
pub use ensemble::{
    random_band_limited, random_dipole, random_gaussian_mixture, random_mean_zero, run_ensemble,
    trial_rng, EnsembleLaw, RatioEnsemble,
};
pub use identities::{
    check_identity, h2_norm, window_mean_std, window_norm, IdentityId, IdentityOperators,
    IdentityReport, COMMUTATOR_ZERO_TOL, IDENTITY_TOL, KAPPA, WINDOW_FRACTION,
};
pub use profile::Profile;
pub use rand_chacha::ChaCha8Rng;
pub use general_argument::{
    general_argument_check, general_argument_m0, GeneralArgumentReport, AFFINE_TOL,
};
pub use halfderiv::{
    fit_c3, halfderiv_weight_bound, quadrature_vs_spectral, spectral_half_derivative, Cap,
    HalfDerivBound, PowerWeight,
};
