use super::ResolventError;
use crate::fields::ComplexField;
use crate::prelude::*;
use crate::quadrature::SphereRule;

#[derive(Debug, Clone, Default)]
pub struct RadiationOptions {
    /// Points with `|x|` at or below this radius are left out of the ball
    /// averages (for fields singular at the origin).
    pub exclude_radius: f64,
    /// Directions for the pointwise residual; defaults to the standard rule.
    pub directions: Option<SphereRule>,
}

/// Discrete Sommerfeld residuals of a field at a set of radii.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadiationReport {
    pub radii: Vec<f64>,
    /// `(1/R) Σ_{|x| ≤ R} |∇u − iku x/|x||² h^N`.
    pub averaged_residual: Vec<f64>,
    /// `max_θ R^{(N−1)/2} |∂_r u − iku|` at `x = Rθ`.
    pub pointwise_residual: Vec<f64>,
    /// The averaged residual grows somewhere between consecutive radii.
    pub nonmonotone: bool,
}

fn check_radii(u: &ComplexField, radii: &[f64], reach: f64) -> Result<(), ResolventError> {
    let max = u.grid().half_width() - u.grid().spacing();
    for (i, &r) in radii.iter().enumerate() {
        if !(r > 0.0) || r * reach > max || (i > 0 && r <= radii[i - 1]) {
            return Err(ResolventError::RadiusOutOfRange {
                radius: r,
                max: max / reach,
            });
        }
    }
    Ok(())
}

pub fn radiation_report(
    u: &ComplexField,
    k: f64,
    radii: &[f64],
    options: &RadiationOptions,
) -> Result<RadiationReport, ResolventError> {
    check_radii(u, radii, 1.0)?;
    let grid = *u.grid();
    let dim = grid.dim();
    let vol = grid.cell_volume();
    let rmax = radii.last().copied().unwrap_or(0.0);
    let ik = Complex64::new(0.0, k);
    // (radius, integrand) for interior points inside the largest ball.
    let mut samples: Vec<(f64, f64)> = (0..grid.len())
        .filter_map(|i| {
            let r = grid.radius(i);
            if r <= options.exclude_radius || r > rmax {
                return None;
            }
            let g = u.gradient(i)?;
            let x = grid.coords(i);
            let uval = u.values()[i];
            let s: f64 = (0..dim)
                .map(|a| (g[a] - ik * uval * (x[a] / r)).norm_sqr())
                .sum();
            Some((r, s * vol))
        })
        .collect();
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let mut averaged = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    let mut cursor = 0;
    for &r in radii {
        while cursor < samples.len() && samples[cursor].0 <= r {
            acc += samples[cursor].1;
            cursor += 1;
        }
        averaged.push(acc / r);
    }
    let rule = options
        .directions
        .clone()
        .unwrap_or_else(|| SphereRule::default_for(dim));
    let delta = 0.5 * grid.spacing();
    let exponent = (dim as f64 - 1.0) / 2.0;
    let pointwise = radii
        .iter()
        .map(|&r| {
            (0..rule.len())
                .map(|j| {
                    let theta = rule.direction(j);
                    let at = |rad: f64| -> Complex64 {
                        let mut x = [0.0; 3];
                        for a in 0..dim {
                            x[a] = rad * theta[a];
                        }
                        u.interpolate(&x[..dim]).unwrap_or_default()
                    };
                    let dr = (at(r + delta) - at(r - delta)) / (2.0 * delta);
                    r.powf(exponent) * (dr - ik * at(r)).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let nonmonotone = averaged.windows(2).any(|w| w[1] > w[0]);
    Ok(RadiationReport {
        radii: radii.to_vec(),
        averaged_residual: averaged,
        pointwise_residual: pointwise,
        nonmonotone,
    })
}

/// Far-field amplitude extracted at one radius.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FarField {
    pub directions: Vec<Vec<f64>>,
    /// `g(θ) = R^{(N−1)/2} e^{−ikR} u_sc(Rθ)`.
    pub amplitude: Vec<Complex64>,
    pub extraction_radius: f64,
    /// `|g_R(θ) − g_{1.1R}(θ)|`.
    pub convergence_indicator: Vec<f64>,
}

pub fn far_field(
    u_sc: &ComplexField,
    k: f64,
    directions: &SphereRule,
    radius: f64,
) -> Result<FarField, ResolventError> {
    let grid = *u_sc.grid();
    let dim = grid.dim();
    if directions.dim != dim || directions.is_empty() {
        return Err(ResolventError::GridMismatch(
            "direction set does not match the field dimension",
        ));
    }
    let max = grid.half_width();
    if !(radius > 0.0) || 1.1 * radius > max {
        return Err(ResolventError::RadiusOutOfRange {
            radius,
            max: max / 1.1,
        });
    }
    let exponent = (dim as f64 - 1.0) / 2.0;
    let extract = |r: f64, theta: &[f64]| -> Complex64 {
        let mut x = [0.0; 3];
        for a in 0..dim {
            x[a] = r * theta[a];
        }
        let v = u_sc.interpolate(&x[..dim]).unwrap_or_default();
        v * Complex64::from_polar(r.powf(exponent), -k * r)
    };
    let mut dirs = Vec::with_capacity(directions.len());
    let mut amplitude = Vec::with_capacity(directions.len());
    let mut indicator = Vec::with_capacity(directions.len());
    for j in 0..directions.len() {
        let theta = directions.direction(j);
        let g = extract(radius, theta);
        let g_far = extract(1.1 * radius, theta);
        dirs.push(theta.to_vec());
        amplitude.push(g);
        indicator.push((g - g_far).norm());
    }
    Ok(FarField {
        directions: dirs,
        amplitude,
        extraction_radius: radius,
        convergence_indicator: indicator,
    })
}
