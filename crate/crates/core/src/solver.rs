//! Damped Picard iteration for `u = R_k N_f(u) + φ`, contraction certificates
//! and the a priori bound of the linearly bounded regime.

use thiserror::Error;

use crate::fields::{ComplexField, FieldsError, NonlinearitySpec, RegimeTag};
use crate::prelude::*;
use crate::resolvent::{
    radiation_report, KappaEstimate, RadiationOptions, RadiationReport, ResolventConfig,
    ResolventError, ResolventOperator,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("non-finite iterate at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("regime precondition violated: {0}")]
    RegimeViolation(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `‖A[u] − u‖_∞ ≤ tol`.
    pub tol: f64,
    /// Initial relaxation `θ ∈ (0, 1]`.
    pub damping: f64,
    /// Abort once `‖u‖_∞` exceeds this.
    pub divergence_cap: f64,
    /// Halve `θ` whenever the residual grows, down to `min_damping`.
    pub adaptive_damping: bool,
    pub min_damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            tol: 1e-10,
            damping: 1.0,
            divergence_cap: 1e8,
            adaptive_damping: true,
            min_damping: 1.0 / 16.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0) {
            return Err(SolverError::InvalidConfig("tol must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolverError::InvalidConfig("damping must lie in (0, 1]"));
        }
        if !(self.divergence_cap > 0.0) {
            return Err(SolverError::InvalidConfig(
                "divergence_cap must be positive",
            ));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be at least 1"));
        }
        if !(self.min_damping > 0.0 && self.min_damping <= self.damping) {
            return Err(SolverError::InvalidConfig(
                "min_damping must lie in (0, damping]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SolveOutcome {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContractionCertificate {
    pub kappa_hat: f64,
    pub ell_estimate: f64,
    /// Cap `M` on `|u|, |v|` used for `ell_estimate`.
    pub cap: f64,
    pub product: f64,
    /// `product < 1`; empirical, since both factors are estimates.
    pub certified: bool,
}

/// Signed outcome of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
}

impl BoundCheck {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: String::from(name),
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveReport {
    pub outcome: SolveOutcome,
    pub converged: bool,
    /// Number of applications of the fixed-point map.
    pub iterations: usize,
    /// `‖A[u_n] − u_n‖_∞` per iteration; equals `‖u_{n+1} − u_n‖_∞` at `θ = 1`.
    pub residual_history: Vec<f64>,
    /// `‖u − R_k N_f(u) − φ‖_∞` for the returned field.
    pub final_residual: f64,
    pub final_damping: f64,
    pub sup_norm: f64,
    pub contraction_certificate: Option<ContractionCertificate>,
    pub bound_checks: Vec<BoundCheck>,
    /// Sommerfeld residuals of `u − φ`, when the grid is large enough.
    pub radiation: Option<RadiationReport>,
}

/// `A[u] = R_k N_f(u|_src) + φ` on the evaluation grid.
pub struct FixedPointMap<'a> {
    f: &'a NonlinearitySpec,
    phi: &'a ComplexField,
    op: &'a ResolventOperator,
}

impl<'a> FixedPointMap<'a> {
    pub fn new(
        f: &'a NonlinearitySpec,
        phi: &'a ComplexField,
        op: &'a ResolventOperator,
    ) -> Result<Self, SolverError> {
        let cfg = op.config();
        if f.grid() != &cfg.source_grid {
            return Err(SolverError::Fields(FieldsError::GridMismatch));
        }
        if phi.grid() != &cfg.eval_grid {
            return Err(SolverError::Fields(FieldsError::GridMismatch));
        }
        cfg.eval_grid
            .aligned_offset(&cfg.source_grid)
            .ok_or(SolverError::InvalidConfig(
                "the source grid must sit inside the evaluation grid",
            ))?;
        Ok(Self { f, phi, op })
    }

    pub fn phi(&self) -> &ComplexField {
        self.phi
    }

    pub fn apply(&self, u: &ComplexField) -> Result<ComplexField, SolverError> {
        let src = self.op.config().source_grid;
        let restricted;
        let on_src = if u.grid() == &src {
            u
        } else {
            restricted = u.restrict_to(&src)?;
            &restricted
        };
        let nu = self.f.apply(on_src)?;
        let mut out = self.op.apply(&nu)?;
        for (o, p) in out.values_mut().iter_mut().zip(self.phi.values()) {
            *o += p;
        }
        Ok(out)
    }
}

/// Picard iteration from `u₀ = φ`.
pub fn picard_solve(
    f: &NonlinearitySpec,
    phi: &ComplexField,
    k: f64,
    cfg: &SolverConfig,
    rcfg: &ResolventConfig,
) -> Result<(ComplexField, SolveReport), SolverError> {
    let op = ResolventOperator::outgoing(*rcfg, k)?;
    let map = FixedPointMap::new(f, phi, &op)?;
    picard_solve_with(&map, phi.clone(), cfg)
}

/// Picard iteration `u ← u + θ(A[u] − u)` from a given start.
pub fn picard_solve_with(
    map: &FixedPointMap<'_>,
    initial: ComplexField,
    cfg: &SolverConfig,
) -> Result<(ComplexField, SolveReport), SolverError> {
    cfg.validate()?;
    if initial.grid() != map.phi.grid() {
        return Err(SolverError::Fields(FieldsError::GridMismatch));
    }
    let mut u = initial;
    let mut theta = cfg.damping;
    let mut history = Vec::new();
    let mut outcome = SolveOutcome::MaxIterations;
    let mut final_residual = f64::INFINITY;
    for iteration in 1..=cfg.max_iters {
        let a = map.apply(&u)?;
        if !a.is_finite() {
            return Err(SolverError::NonFinite { iteration });
        }
        let r = a.sup_distance(&u)?;
        if let Some(&prev) = history.last() {
            if cfg.adaptive_damping && r > prev && theta > cfg.min_damping {
                theta = (0.5 * theta).max(cfg.min_damping);
            }
        }
        history.push(r);
        final_residual = r;
        if r <= cfg.tol {
            outcome = SolveOutcome::Converged;
            break;
        }
        if theta == 1.0 {
            u = a;
        } else {
            for (x, y) in u.values_mut().iter_mut().zip(a.values()) {
                *x += (y - *x) * theta;
            }
        }
        if u.sup_norm() > cfg.divergence_cap {
            outcome = SolveOutcome::Diverged;
            final_residual = map
                .apply(&u)
                .ok()
                .and_then(|a| a.sup_distance(&u).ok())
                .unwrap_or(f64::INFINITY);
            break;
        }
        if iteration == cfg.max_iters {
            final_residual = map.apply(&u)?.sup_distance(&u)?;
        }
    }
    let radiation = scattered_radiation(&u, map.phi, map.op.k());
    let report = SolveReport {
        outcome,
        converged: outcome == SolveOutcome::Converged,
        iterations: history.len(),
        residual_history: history,
        final_residual,
        final_damping: theta,
        sup_norm: u.sup_norm(),
        contraction_certificate: None,
        bound_checks: Vec::new(),
        radiation,
    };
    Ok((u, report))
}

fn scattered_radiation(u: &ComplexField, phi: &ComplexField, k: f64) -> Option<RadiationReport> {
    let grid = u.grid();
    let reach = grid.half_width() - grid.spacing();
    if grid.points_per_axis() < 9 || reach <= 0.0 {
        return None;
    }
    let radii = [0.25 * reach, 0.5 * reach, 0.75 * reach];
    let usc = u.zip_map(phi, |a, b| a - b).ok()?;
    radiation_report(&usc, k, &radii, &RadiationOptions::default()).ok()
}

/// `κ̂ · ℓ̂` with `ℓ̂` sampled over `|u|, |v| ≤ cap`; the estimate is stored on `f`.
pub fn contraction_certificate(
    f: &mut NonlinearitySpec,
    kappa: &KappaEstimate,
    cap: f64,
    samples: usize,
    seed: u64,
) -> Result<ContractionCertificate, SolverError> {
    if (kappa.alpha - f.alpha()).abs() > 1e-12 * f.alpha().abs() {
        return Err(SolverError::RegimeViolation(
            "kappa was estimated at a different alpha",
        ));
    }
    let ell = f.estimate_lipschitz(cap, samples, seed);
    let product = kappa.kappa_hat * ell;
    Ok(ContractionCertificate {
        kappa_hat: kappa.kappa_hat,
        ell_estimate: ell,
        cap,
        product,
        certified: product < 1.0,
    })
}

/// `‖u‖_∞ ≤ (1 − κ̂‖Q‖_{L^∞_α})^{−1}(κ̂‖b‖_{L^∞_α} + ‖φ‖_∞)` for the linearly
/// bounded regime.
pub fn linear_bound_check(
    f: &NonlinearitySpec,
    phi: &ComplexField,
    u: &ComplexField,
    kappa: &KappaEstimate,
) -> Result<BoundCheck, SolverError> {
    if !f.has_tag(RegimeTag::F2) {
        return Err(SolverError::RegimeViolation(
            "nonlinearity is not tagged f2",
        ));
    }
    let (qn, bn) = f.f2_bounds()?;
    let kq = kappa.kappa_hat * qn;
    if kq >= 1.0 {
        return Err(SolverError::RegimeViolation(
            "kappa_hat * ||Q|| must be below 1",
        ));
    }
    let rhs = (kappa.kappa_hat * bn + phi.sup_norm()) / (1.0 - kq);
    Ok(BoundCheck::new("linear_bound", u.sup_norm(), rhs))
}
