//! Numerical checks of the inequalities and identities behind the existence
//! theory: Sturm's arch-area inequality for Bessel functions, Fourier positivity
//! of the truncated kernel `1_{B_δ}Ψ_k`, the boundary flux identity and the
//! defocusing a priori bound chain.
//!
//! Every check reports signed margins; deciding pass/fail is left to the caller.

mod defocusing;
mod energy;
mod fourier;
mod sturm;

use thiserror::Error;

use crate::fields::FieldsError;
use crate::resolvent::ResolventError;
use crate::specfun::SpecfunError;

pub use defocusing::{defocusing_inequalities, fit_power_bound, DefocusingReport, PowerBoundFit};
pub use energy::{energy_identity, EnergyIdentityResult, EnergyOptions};
pub use fourier::{default_frequencies, fourier_positivity, FourierPositivityResult};
pub use sturm::{sturm_check, SturmResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("regime precondition violated: {0}")]
    RegimeViolation(&'static str),
}
