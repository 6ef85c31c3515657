use super::VerifyError;
use crate::fields::ComplexField;
use crate::prelude::*;
use crate::quadrature::SphereRule;
use crate::resolvent::ResolventError;

#[derive(Debug, Clone)]
pub struct EnergyOptions {
    /// Quadrature tolerance the flux is judged against.
    pub tolerance: f64,
    /// Defaults to the standard rule for the dimension.
    pub directions: Option<SphereRule>,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            directions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyIdentityResult {
    pub radii: Vec<f64>,
    /// `Im ∮_{∂B_ρ} ū ∂_r u dσ`.
    pub flux_imag: Vec<f64>,
    /// Spread of the flux under a finer sphere rule and a doubled
    /// difference step.
    pub quadrature_error: Vec<f64>,
    pub tolerance: f64,
}

impl EnergyIdentityResult {
    pub fn max_abs_flux(&self) -> f64 {
        self.flux_imag.iter().fold(0.0, |m, f| m.max(f.abs()))
    }
}

fn flux(u: &ComplexField, rule: &SphereRule, rho: f64, delta: f64) -> f64 {
    let dim = u.grid().dim();
    let surface = rho.powi(dim as i32 - 1);
    let mut total = 0.0;
    for j in 0..rule.len() {
        let theta = rule.direction(j);
        let at = |r: f64| {
            let mut x = [0.0; 3];
            for a in 0..dim {
                x[a] = r * theta[a];
            }
            u.interpolate(&x[..dim]).unwrap_or_default()
        };
        let dr = (at(rho + delta) - at(rho - delta)) / (2.0 * delta);
        total += rule.weights[j] * (at(rho).conj() * dr).im;
    }
    total * surface
}

pub fn energy_identity(
    u: &ComplexField,
    radii: &[f64],
    options: &EnergyOptions,
) -> Result<EnergyIdentityResult, VerifyError> {
    let grid = *u.grid();
    let dim = grid.dim();
    let h = grid.spacing();
    let max = grid.half_width() - 2.0 * h;
    for &r in radii {
        if !(r > 2.0 * h) || r > max {
            return Err(ResolventError::RadiusOutOfRange { radius: r, max }.into());
        }
    }
    if !(options.tolerance > 0.0) {
        return Err(VerifyError::InvalidArgument("tolerance must be positive"));
    }
    let rule = options
        .directions
        .clone()
        .unwrap_or_else(|| SphereRule::default_for(dim));
    if rule.dim != dim {
        return Err(VerifyError::InvalidArgument(
            "direction set does not match the field dimension",
        ));
    }
    let fine = SphereRule::with_order(dim, 16);
    let mut flux_imag = Vec::with_capacity(radii.len());
    let mut err = Vec::with_capacity(radii.len());
    for &rho in radii {
        let f = flux(u, &rule, rho, 0.5 * h);
        let spread = (f - flux(u, &fine, rho, 0.5 * h)).abs() + (f - flux(u, &rule, rho, h)).abs();
        flux_imag.push(f);
        err.push(spread);
    }
    Ok(EnergyIdentityResult {
        radii: radii.to_vec(),
        flux_imag,
        quadrature_error: err,
        tolerance: options.tolerance,
    })
}
