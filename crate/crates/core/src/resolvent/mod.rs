//! Discrete resolvent `R_k h = Φ_k ∗ h`, the `κ_α` estimate, radiation
//! residuals and far-field extraction.
//!
//! Off the singular cell the convolution uses point weights `h^N Φ_k(x − y)`;
//! the singular cell gets an integrated weight (see [`SingularRule`]). With the
//! `std` feature the sum runs as a zero-padded FFT convolution; the direct sum
//! is always available as the reference.

#[cfg(feature = "std")]
mod fft;
mod kappa;
mod operator;
mod radiation;
mod singular;

use thiserror::Error;

use crate::fields::FieldsError;
use crate::specfun::SpecfunError;

pub use kappa::{estimate_kappa, extremal_profile, KappaEstimate};
pub use operator::{apply_resolvent, KernelKind, ResolventConfig, ResolventOperator};
pub use radiation::{far_field, radiation_report, FarField, RadiationOptions, RadiationReport};
pub use singular::SingularRule;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResolventError {
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),
    #[error("kernel table with {points} entries exceeds the cap of {cap}")]
    MemoryCap { points: usize, cap: usize },
    #[error("radius {radius} outside the usable range (max {max})")]
    RadiusOutOfRange { radius: f64, max: f64 },
}
