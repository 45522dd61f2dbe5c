//! Numerical kernels behind the spectral operations.

pub mod banded;
pub mod lanczos;

pub use banded::{BandedHermitian, LdlFactor};
pub use lanczos::smallest_eigenpairs_shift_invert;
