//! Uniform periodic grids, real fields and diagonal Fourier multipliers.

mod container;
mod field;
mod grid;
mod line;
mod multiplier;
mod ops;

pub use container::{read_field, read_field_csv, write_field, write_field_csv, Endianness};
pub use field::Field;
pub use grid::Grid;
pub use line::LineOperator;
pub use multiplier::{
    apply_multiplier, apply_multiplier_with_residue, bessel_spec, dealias_spec, derivative_spec,
    identity_spec, HomogeneousSymbol, MultiplierSpec, NyquistRule,
};
pub use ops::{
    bessel, dealias, dealiased_product, derivative, frac_deriv, hilbert, is_mean_zero,
    MEAN_ZERO_TOL,
};
pub use rustfft::num_complex::Complex64;
