//! Natural-parameter continuation of `u = R_k(Q|u|^{p−2}u) + λφ` from `(0, 0)`.

use thiserror::Error;

use crate::fields::{ComplexField, NonlinearityKind, NonlinearitySpec};
use crate::prelude::*;
use crate::resolvent::{ResolventConfig, ResolventOperator};
use crate::solver::{picard_solve_with, FixedPointMap, SolveOutcome, SolverConfig, SolverError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuationError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid continuation setup: {0}")]
    InvalidSpec(&'static str),
    #[error("need at least {needed} trailing converged points, found {found}")]
    InsufficientPoints { needed: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct StepConfig {
    pub initial_step: f64,
    pub max_step: f64,
    /// Smallest step tried before giving up; `None` means `1e-4 · λ_max`.
    pub min_step: Option<f64>,
    /// Keep the full field at these `λ` (matched to within `1e-12 · λ_max`).
    pub store_fields_at: Vec<f64>,
    /// Keep the field at every converged point.
    pub store_all_fields: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_step: 0.25,
            min_step: None,
            store_fields_at: Vec::new(),
            store_all_fields: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PointStatus {
    Converged,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BranchPoint {
    pub lambda: f64,
    pub sup_norm: f64,
    pub residual: f64,
    pub iterations: usize,
    pub status: PointStatus,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub field: Option<ComplexField>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Termination {
    ReachedLambdaMax,
    BlowUp,
    StepFloor,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Branch {
    pub lambda_max: f64,
    pub points: Vec<BranchPoint>,
    pub terminated_reason: Termination,
}

impl Branch {
    pub fn converged(&self) -> impl Iterator<Item = &BranchPoint> {
        self.points
            .iter()
            .filter(|p| p.status == PointStatus::Converged)
    }

    pub fn last_converged_lambda(&self) -> f64 {
        self.converged().last().map_or(0.0, |p| p.lambda)
    }
}

/// Walks `λ` from 0 to `lambda_max`. Steps double after two solves that use
/// fewer than a quarter of `max_iters` and halve after a failed solve.
pub fn continue_branch(
    f: &NonlinearitySpec,
    phi: &ComplexField,
    k: f64,
    lambda_max: f64,
    step: &StepConfig,
    solver: &SolverConfig,
    rcfg: &ResolventConfig,
) -> Result<Branch, ContinuationError> {
    if !matches!(f.kind(), NonlinearityKind::Power { .. }) {
        return Err(ContinuationError::InvalidSpec(
            "continuation needs a power nonlinearity",
        ));
    }
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(ContinuationError::InvalidSpec(
            "lambda_max must be positive",
        ));
    }
    let floor = step.min_step.unwrap_or(1e-4 * lambda_max);
    if !(step.initial_step > 0.0 && step.max_step >= step.initial_step && floor > 0.0) {
        return Err(ContinuationError::InvalidSpec(
            "need 0 < min_step, 0 < initial_step <= max_step",
        ));
    }
    solver.validate()?;
    let op = ResolventOperator::outgoing(*rcfg, k).map_err(SolverError::from)?;
    // Validates grids once; the per-step maps reuse the same operator.
    FixedPointMap::new(f, phi, &op)?;

    let wants_field = |lambda: f64| {
        step.store_all_fields
            || step
                .store_fields_at
                .iter()
                .any(|&l| (l - lambda).abs() <= 1e-12 * lambda_max)
    };
    let mut u = ComplexField::zeros(*phi.grid());
    let mut points = vec![BranchPoint {
        lambda: 0.0,
        sup_norm: 0.0,
        residual: 0.0,
        iterations: 0,
        status: PointStatus::Converged,
        field: wants_field(0.0).then(|| u.clone()),
    }];
    let mut lambda = 0.0;
    let mut h = step.initial_step.min(lambda_max);
    let mut easy = 0usize;
    let easy_limit = solver.max_iters / 4;
    let reason = loop {
        if lambda >= lambda_max {
            break Termination::ReachedLambdaMax;
        }
        // Land exactly on requested λ values and on λ_max.
        let stop = step
            .store_fields_at
            .iter()
            .copied()
            .filter(|&l| l > lambda + 1e-12 * lambda_max && l < lambda_max)
            .fold(lambda_max, f64::min);
        let target = if lambda + h >= stop - 1e-12 * lambda_max {
            stop
        } else {
            lambda + h
        };
        let dl = Complex64::new(target - lambda, 0.0);
        let scaled_phi = phi.scaled(Complex64::new(target, 0.0));
        let start = u
            .zip_map(phi, |a, b| a + b * dl)
            .map_err(SolverError::from)?;
        let map = FixedPointMap::new(f, &scaled_phi, &op)?;
        let attempt = match picard_solve_with(&map, start, solver) {
            Ok(r) => Some(r),
            Err(SolverError::NonFinite { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        match attempt {
            Some((next, rep)) if rep.converged => {
                points.push(BranchPoint {
                    lambda: target,
                    sup_norm: rep.sup_norm,
                    residual: rep.final_residual,
                    iterations: rep.iterations,
                    status: PointStatus::Converged,
                    field: wants_field(target).then(|| next.clone()),
                });
                u = next;
                lambda = target;
                if rep.iterations < easy_limit {
                    easy += 1;
                    if easy >= 2 {
                        h = (2.0 * h).min(step.max_step);
                        easy = 0;
                    }
                } else {
                    easy = 0;
                }
            }
            other => {
                let diverged = match &other {
                    None => true,
                    Some((_, rep)) => rep.outcome == SolveOutcome::Diverged,
                };
                easy = 0;
                h *= 0.5;
                if h < floor {
                    let (sup_norm, residual, iterations) = match &other {
                        Some((_, rep)) => (rep.sup_norm, rep.final_residual, rep.iterations),
                        None => (f64::INFINITY, f64::INFINITY, 0),
                    };
                    points.push(BranchPoint {
                        lambda: target,
                        sup_norm,
                        residual,
                        iterations,
                        status: PointStatus::Diverged,
                        field: None,
                    });
                    break if diverged {
                        Termination::BlowUp
                    } else {
                        Termination::StepFloor
                    };
                }
            }
        }
    };
    Ok(Branch {
        lambda_max,
        points,
        terminated_reason: reason,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "diagnosis", rename_all = "snake_case"))]
pub enum BlowupDiagnosis {
    NoBlowupDetected,
    /// `sup_norm ≈ C (λ* − λ)^{−γ}` over the trailing converged points.
    Estimate {
        lambda_star: f64,
        gamma: f64,
        amplitude: f64,
        /// Coefficient of determination of the log-log fit.
        r_squared: f64,
        points_used: usize,
    },
}

const MIN_FIT_POINTS: usize = 4;
const MAX_FIT_POINTS: usize = 8;

/// Fits the trailing converged points of a terminated branch.
pub fn blowup_probe(branch: &Branch) -> Result<BlowupDiagnosis, ContinuationError> {
    if branch.terminated_reason == Termination::ReachedLambdaMax {
        return Ok(BlowupDiagnosis::NoBlowupDetected);
    }
    let pts: Vec<(f64, f64)> = branch
        .converged()
        .filter(|p| p.lambda > 0.0 && p.sup_norm > 0.0)
        .map(|p| (p.lambda, p.sup_norm))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(ContinuationError::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            found: pts.len(),
        });
    }
    let tail = &pts[pts.len().saturating_sub(MAX_FIT_POINTS)..];
    Ok(fit_blowup(tail))
}

/// Least squares of `ln s = ln C − γ ln(λ* − λ)`, profiled over `λ*`.
pub fn fit_blowup(points: &[(f64, f64)]) -> BlowupDiagnosis {
    let last = points.last().map_or(0.0, |p| p.0);
    let first = points.first().map_or(0.0, |p| p.0);
    let span = (last - first).max(1e-12 * last.max(1.0));
    let sse = |t: f64| linear_fit(points, last + (span * 10f64.powf(t))).2;
    // Coarse scan over log-offsets, then golden-section refinement.
    let (lo_t, hi_t) = (-8.0, 4.0);
    let n = 241;
    let mut best = (lo_t, f64::INFINITY);
    for i in 0..n {
        let t = lo_t + (hi_t - lo_t) * i as f64 / (n - 1) as f64;
        let e = sse(t);
        if e < best.1 {
            best = (t, e);
        }
    }
    let dt = (hi_t - lo_t) / (n - 1) as f64;
    let (mut a, mut b) = (best.0 - dt, best.0 + dt);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let lambda_star = last + span * 10f64.powf(0.5 * (a + b));
    let (ln_c, gamma, sse_min) = linear_fit(points, lambda_star);
    let mean = points.iter().map(|p| p.1.ln()).sum::<f64>() / points.len() as f64;
    let sst: f64 = points.iter().map(|p| (p.1.ln() - mean).powi(2)).sum();
    let r_squared = if sst > 0.0 { 1.0 - sse_min / sst } else { 1.0 };
    BlowupDiagnosis::Estimate {
        lambda_star,
        gamma,
        amplitude: ln_c.exp(),
        r_squared,
        points_used: points.len(),
    }
}

/// Returns `(ln C, γ, residual sum of squares)`.
fn linear_fit(points: &[(f64, f64)], lambda_star: f64) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| -(lambda_star - p.0).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let gamma = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ln_c = my - gamma * mx;
    let sse = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - ln_c - gamma * x).powi(2))
        .sum();
    (ln_c, gamma, sse)
}
