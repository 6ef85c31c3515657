use super::{KernelKind, ResolventConfig, ResolventError, ResolventOperator};
use crate::fields::{tau, ComplexField, Grid};
use crate::prelude::*;
use crate::quadrature::GaussLegendre;
use crate::specfun::{sphere_area, FundamentalSolutionParams};

/// Grid stand-in for `κ_α = sup ‖|Φ_k| ∗ w‖_{L^∞_{τ(α)}}` over `‖w‖_{L^∞_α} = 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KappaEstimate {
    pub alpha: f64,
    pub tau_alpha: f64,
    pub k: f64,
    pub kappa_hat: f64,
    /// Where `⟨x⟩^τ (|Φ_k| ∗ w*)(x)` peaks.
    pub argmax_point: Vec<f64>,
    pub grid: Grid,
    /// Upper bound for the part of the convolution coming from outside the
    /// source box.
    pub truncation_tail_bound: f64,
}

impl KappaEstimate {
    /// `kappa_hat` plus the truncation tail.
    pub fn with_tail(&self) -> f64 {
        self.kappa_hat + self.truncation_tail_bound
    }
}

/// Applies `|Φ_k| ∗` to `w*(x) = ⟨x⟩^{−α}` (nonnegative kernels reach the supremum
/// there) and takes the `L^∞_{τ(α)}` norm on the evaluation grid.
pub fn estimate_kappa(
    alpha: f64,
    cfg: &ResolventConfig,
    k: f64,
) -> Result<KappaEstimate, ResolventError> {
    let dim = cfg.source_grid.dim();
    let tau_alpha = tau(alpha, dim)?;
    let op = ResolventOperator::new(*cfg, k, KernelKind::Magnitude)?;
    let w = extremal_profile(&cfg.source_grid, alpha);
    let image = op.apply(&w)?;
    let norm = image.weighted_norm(tau_alpha);
    let params = FundamentalSolutionParams::new(k, dim)?;
    Ok(KappaEstimate {
        alpha,
        tau_alpha,
        k,
        kappa_hat: norm.value,
        argmax_point: norm.argmax_point,
        grid: cfg.eval_grid,
        truncation_tail_bound: tail_bound(&params, alpha, tau_alpha, cfg),
    })
}

/// `⟨x⟩^{−α}` on a grid.
pub fn extremal_profile(grid: &Grid, alpha: f64) -> ComplexField {
    ComplexField::from_fn(*grid, move |x| {
        Complex64::new(crate::fields::bracket(x).powf(-alpha), 0.0)
    })
}

/// `sup_{r ≥ 1} r^{(N−1)/2} |Φ_k(r)|`.
fn far_constant(params: &FundamentalSolutionParams) -> f64 {
    let nu = params.order().value();
    let k = params.k();
    let asymptote = 0.25 * (k / (2.0 * PI)).powf(nu) * (2.0 / (PI * k)).sqrt();
    let mut best = asymptote;
    let exponent = (params.dim() as f64 - 1.0) / 2.0;
    for j in 0..=2000 {
        let r = 10f64.powf(3.0 * j as f64 / 2000.0);
        best = best.max(r.powf(exponent) * params.eval(r).norm());
    }
    best * 1.01
}

/// `∫_{B_1} |Φ_k|`.
fn near_integral(params: &FundamentalSolutionParams) -> f64 {
    let dim = params.dim();
    let area = sphere_area(dim);
    let gl = GaussLegendre::new(48);
    // r = s² removes the endpoint singularity in every dimension.
    gl.integrate(0.0, 1.0, |s| {
        let r = s * s;
        area * r.powi(dim as i32 - 1) * params.eval(r).norm() * 2.0 * s
    })
}

fn tail_bound(
    params: &FundamentalSolutionParams,
    alpha: f64,
    tau_alpha: f64,
    cfg: &ResolventConfig,
) -> f64 {
    let n = params.dim() as f64;
    let ls = cfg.source_grid.half_width();
    let rx = cfg.eval_grid.half_width() * n.sqrt();
    let area = sphere_area(params.dim());
    let cfar = far_constant(params);
    let near = near_integral(params) * (1.0 + ls * ls).powf(-alpha / 2.0);
    let r1 = ls.max(2.0 * rx);
    let excess = alpha - (n + 1.0) / 2.0;
    let outer = area * cfar * 2f64.powf((n - 1.0) / 2.0) * r1.powf(-excess) / excess;
    let middle = if 2.0 * rx > ls {
        let gl = GaussLegendre::new(16);
        area * cfar
            * gl.integrate_composite(ls, 2.0 * rx, 32, |r| {
                r.powf(n - 1.0) * (1.0 + r * r).powf(-alpha / 2.0)
            })
    } else {
        0.0
    };
    (1.0 + rx * rx).powf(tau_alpha / 2.0) * (near + outer + middle)
}
