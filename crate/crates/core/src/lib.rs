//! Numerical solver and verification suite for the stationary nonlinear
//! Helmholtz scattering problem
//!
//! ```text
//!     u = R_k N_f(u) + φ,      R_k h = Φ_k ∗ h,
//! ```
//!
//! where `Φ_k` is the outgoing fundamental solution of `−Δ − k²` in `R^N`,
//! `N_f(u)(x) = f(x, u(x))` is a substitution operator and `φ` an incident free
//! wave.
//!
//! The crate is `no_std` (it needs `alloc`). The default `std` feature adds an
//! FFT-backed convolution path for the resolvent and data-parallel loops; without
//! it every operation still works through the direct-summation reference path.
//!
//! Module map:
//!
//! - [`specfun`]: real-order Bessel/Hankel functions, zeros, `Φ_k`.
//! - [`fields`]: grids, complex fields, weighted sup-norms, incident waves and
//!   nonlinearities.
//! - [`resolvent`]: discrete `Φ_k ∗ h`, `κ_α` estimation, radiation residuals and
//!   far-field extraction.
//! - [`solver`]: damped Picard iteration with contraction certificates.
//! - [`continuation`]: natural-parameter continuation in `λ` and blow-up probing.
//! - [`verify`]: Sturm inequality, radial Fourier positivity, flux identity and the
//!   defocusing a priori bound chain.
#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod continuation;
pub mod fields;
pub mod quadrature;
pub mod resolvent;
pub mod solver;
pub mod specfun;
pub mod verify;

mod par;

/// Items shared by every module. `Float` supplies the libm-backed math methods on
/// `no_std` targets; with `std` linked the inherent `f64` methods take over.
pub(crate) mod prelude {
    pub use alloc::string::String;
    pub use alloc::vec;
    pub use alloc::vec::Vec;
    pub use core::f64::consts::PI;
    pub use num_complex::Complex64;
    pub use num_traits::Float;
}

pub use num_complex::Complex64;

pub use continuation::{
    blowup_probe, continue_branch, BlowupDiagnosis, Branch, BranchPoint, PointStatus, StepConfig,
    Termination,
};
pub use fields::{
    tau, ComplexField, Grid, IncidentWave, NonlinearitySpec, RealField, RegimeTag,
    WeightedNormResult,
};
pub use resolvent::{
    estimate_kappa, far_field, radiation_report, FarField, KappaEstimate, RadiationReport,
    ResolventConfig, ResolventOperator, SingularRule,
};
pub use solver::{
    contraction_certificate, linear_bound_check, picard_solve, SolveReport, SolverConfig,
};
pub use specfun::{
    bessel_j, bessel_y, first_y_zero, fundamental_solution, hankel1, j_zeros, BesselOrder,
    FundamentalSolutionParams, ZeroTable,
};
pub use verify::{defocusing_inequalities, energy_identity, fourier_positivity, sturm_check};
