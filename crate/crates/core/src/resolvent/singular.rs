//! Weights for the cell containing the kernel singularity.

use crate::prelude::*;
use crate::quadrature::GaussLegendre;
use crate::specfun::{hankel1, BesselOrder, FundamentalSolutionParams};

/// `∫_{[0,1]³} |x|^{−1} dx = (3/2) ln(2 + √3) − π/4`.
pub(crate) const UNIT_CUBE_INV_R: f64 = 1.190_038_681_989_776_2;
/// `∫_{[0,1]²} ln|x| dx = (ln 2)/2 − 3/2 + π/4`.
pub(crate) const UNIT_SQUARE_LOG_R: f64 = -0.368_028_246_322_578_9;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// How the singular cell `y = x` is weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SingularRule {
    /// Exact integral of `Φ_k` over the ball with the cell's volume.
    #[default]
    CellAverage,
    /// Exact integral of the leading singular term over the cube, plus Gauss
    /// quadrature of the bounded remainder.
    Subtraction,
}

/// `∫_{B_ρ} Φ_k`, with `|B_ρ| = h^N`.
pub(crate) fn ball_integral(params: &FundamentalSolutionParams, h: f64) -> Complex64 {
    let k = params.k();
    let i = Complex64::new(0.0, 1.0);
    match params.dim() {
        2 => {
            let rho = h / PI.sqrt();
            let h1 = hankel1(BesselOrder::new(1.0).unwrap_or(BesselOrder::ZERO), k * rho)
                .unwrap_or_default();
            i * (PI / 2.0) * rho * h1 / k - 1.0 / (k * k)
        }
        _ => {
            let rho = h * (3.0 / (4.0 * PI)).cbrt();
            let e = Complex64::from_polar(1.0, k * rho);
            e * rho / (i * k) + (e - 1.0) / (k * k)
        }
    }
}

/// `∫_{B_ρ} |Φ_k|`, with `|B_ρ| = h^N`.
pub(crate) fn ball_integral_abs(params: &FundamentalSolutionParams, h: f64) -> f64 {
    match params.dim() {
        2 => {
            let rho = h / PI.sqrt();
            let gl = GaussLegendre::new(32);
            // r = ρs² tames the logarithm at the origin.
            gl.integrate(0.0, 1.0, |s| {
                if s == 0.0 {
                    return 0.0;
                }
                let r = rho * s * s;
                2.0 * PI * r * params.eval(r).norm() * 2.0 * rho * s
            })
        }
        _ => {
            let rho = h * (3.0 / (4.0 * PI)).cbrt();
            0.5 * rho * rho
        }
    }
}

/// `Φ_k − S` where `S` is the leading singular term, continued to `r = 0`.
fn regular_part(params: &FundamentalSolutionParams, r: f64) -> Complex64 {
    let k = params.k();
    match params.dim() {
        2 => {
            if r < 1e-300 {
                return Complex64::new(-((0.5 * k).ln() + EULER_GAMMA) / (2.0 * PI), 0.25);
            }
            params.eval(r) + r.ln() / (2.0 * PI)
        }
        _ => {
            if k * r < 1e-8 {
                return Complex64::new(-0.5 * k * k * r, k) / (4.0 * PI);
            }
            let e = Complex64::from_polar(1.0, k * r) - 1.0;
            e / (4.0 * PI * r)
        }
    }
}

/// `∫_{[−h/2, h/2]^N} Φ_k`, split into the exact singular part and a
/// product Gauss rule of `order` points per axis on the remainder.
pub(crate) fn cube_integral(params: &FundamentalSolutionParams, h: f64, order: usize) -> Complex64 {
    let gl = GaussLegendre::new(order.max(1));
    let nodes: Vec<(f64, f64)> = gl.on_interval(-0.5 * h, 0.5 * h).collect();
    let dim = params.dim();
    let mut regular = Complex64::new(0.0, 0.0);
    match dim {
        2 => {
            for &(x, wx) in &nodes {
                for &(y, wy) in &nodes {
                    regular += regular_part(params, (x * x + y * y).sqrt()) * (wx * wy);
                }
            }
            // ∫_{[−h/2,h/2]²} ln r = h²(ln h + ∫_{[−1/2,1/2]²} ln r)
            let log_int = h * h * (h.ln() + UNIT_SQUARE_LOG_R - 2.0_f64.ln());
            regular - log_int / (2.0 * PI)
        }
        _ => {
            for &(x, wx) in &nodes {
                for &(y, wy) in &nodes {
                    for &(z, wz) in &nodes {
                        regular +=
                            regular_part(params, (x * x + y * y + z * z).sqrt()) * (wx * wy * wz);
                    }
                }
            }
            // ∫_{[−h/2,h/2]³} 1/r = 2h² ∫_{[0,1]³} 1/r
            regular + 2.0 * h * h * UNIT_CUBE_INV_R / (4.0 * PI)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_cell_constants() {
        let c3 = 1.5 * (2.0 + 3.0_f64.sqrt()).ln() - PI / 4.0;
        assert_relative_eq!(UNIT_CUBE_INV_R, c3, max_relative = 1e-15);
        let c2 = 0.5 * 2.0_f64.ln() - 1.5 + PI / 4.0;
        assert_relative_eq!(UNIT_SQUARE_LOG_R, c2, max_relative = 1e-15);

        // Independent check: polar integration over the unit cube corner in 3-D.
        // ∫_{[0,1]³} 1/r = 3 ∫∫ over the face x = 1 pyramid = 3 ∫_{[0,1]²} ∫_0^1 t dt/√(1+y²+z²) ...
        // reduces to (3/2)∫_{[0,1]²} (1 + y² + z²)^{−1/2} dy dz.
        let gl = GaussLegendre::new(40);
        let c3_num = 1.5
            * gl.integrate(0.0, 1.0, |y| {
                gl.integrate(0.0, 1.0, |z| 1.0 / (1.0 + y * y + z * z).sqrt())
            });
        assert_relative_eq!(c3_num, UNIT_CUBE_INV_R, max_relative = 1e-13);
        // 2-D: ∫_{[0,1]²} ln r = 2 ∫_{triangle} ln r, polar about the origin.
        let c2_num = 2.0
            * gl.integrate(0.0, PI / 4.0, |t| {
                let rm = 1.0 / t.cos();
                // ∫_0^{rm} r ln r dr = rm²(2 ln rm − 1)/4
                rm * rm * (2.0 * rm.ln() - 1.0) / 4.0
            });
        assert_relative_eq!(c2_num, UNIT_SQUARE_LOG_R, max_relative = 1e-13);
    }

    #[test]
    fn ball_and_cube_weights_agree_to_leading_order() {
        for dim in [2usize, 3] {
            let p = FundamentalSolutionParams::new(1.0, dim).unwrap();
            for h in [0.2, 0.1, 0.05] {
                let ball = ball_integral(&p, h);
                let cube = cube_integral(&p, h, 8);
                let scale = cube.norm();
                // Ball and cube differ only in shape; the leading singular part
                // integrates to within a few percent.
                assert!(
                    (ball - cube).norm() < 0.05 * scale,
                    "dim {dim} h {h}: {ball} vs {cube}"
                );
            }
        }
    }

    #[test]
    fn cube_integral_converges_in_order() {
        // The remainder is only Lipschitz at the origin, so convergence is algebraic.
        for dim in [2usize, 3] {
            let p = FundamentalSolutionParams::new(2.0, dim).unwrap();
            let a = cube_integral(&p, 0.3, 8);
            let b = cube_integral(&p, 0.3, 16);
            let c = cube_integral(&p, 0.3, 32);
            assert!((b - c).norm() < 1e-5 * c.norm(), "dim {dim}");
            assert!((b - c).norm() < (a - c).norm());
        }
    }

    #[test]
    fn small_ball_limits() {
        let p = FundamentalSolutionParams::new(1.0, 3).unwrap();
        let h = 1e-3;
        let rho = h * (3.0 / (4.0 * PI)).cbrt();
        let b = ball_integral(&p, h);
        assert_relative_eq!(b.re, rho * rho / 2.0, max_relative = 1e-3);
        assert_relative_eq!(
            ball_integral_abs(&p, h),
            rho * rho / 2.0,
            max_relative = 1e-15
        );
        let p2 = FundamentalSolutionParams::new(1.0, 2).unwrap();
        let h = 0.01;
        assert!(ball_integral_abs(&p2, h) >= ball_integral(&p2, h).norm());
    }
}
