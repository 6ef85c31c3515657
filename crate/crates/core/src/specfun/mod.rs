//! Real-order Bessel and Hankel functions, their zeros, and the outgoing
//! fundamental solution `Φ_k` of `−Δ − k²`.
//!
//! Evaluation uses three regimes:
//!
//! - `ν = 1/2` has closed forms in `sin` and `cos`;
//! - for large arguments the Hankel asymptotic expansion is summed to its
//!   smallest term;
//! - otherwise Temme's power series (small `t`) or Steed's continued fraction
//!   (moderate `t`) produce `J_ν` and `Y_ν` together, following the classic
//!   `bessjy` construction.

mod bessel;
mod fundamental;
mod zeros;

use thiserror::Error;

pub use bessel::{bessel_j, bessel_y, hankel1};
pub use fundamental::{fundamental_solution, FundamentalSolutionParams};
pub use zeros::{first_y_zero, j_zeros, y_zeros, CylinderKind, ZeroTable};

pub(crate) use fundamental::sphere_area;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("Bessel order must be finite and nonnegative, got {0}")]
    InvalidOrder(f64),
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
    #[error("spatial dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("no sign change found for {what} below t = {limit}")]
    ZeroNotFound { what: &'static str, limit: f64 },
}

/// Order `ν ≥ 0` of a cylinder function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "f64", into = "f64"))]
pub struct BesselOrder(pub(crate) f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecfunError> {
        if nu.is_finite() && nu >= 0.0 {
            Ok(Self(nu))
        } else {
            Err(SpecfunError::InvalidOrder(nu))
        }
    }

    /// The order `(N − 2)/2` attached to spatial dimension `N`.
    pub fn for_dimension(dim: usize) -> Result<Self, SpecfunError> {
        if dim < 2 {
            return Err(SpecfunError::InvalidDimension(dim));
        }
        Ok(Self((dim as f64 - 2.0) / 2.0))
    }

    pub const HALF: BesselOrder = BesselOrder(0.5);
    pub const ZERO: BesselOrder = BesselOrder(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub(crate) fn is_half(self) -> bool {
        self.0 == 0.5
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = SpecfunError;

    fn try_from(nu: f64) -> Result<Self, Self::Error> {
        Self::new(nu)
    }
}

impl From<BesselOrder> for f64 {
    fn from(nu: BesselOrder) -> f64 {
        nu.0
    }
}
