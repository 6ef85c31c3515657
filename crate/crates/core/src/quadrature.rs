//! Gauss–Legendre rules and quadrature on the unit sphere `S^{N−1}`
//! (`N ∈ {2, 3}`).

use crate::prelude::*;

/// `n`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are roots of `P_n` found by Newton iteration from the Chebyshev-like
    /// initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let dp = legendre_with_derivative(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `panels` equal subintervals of `[a, b]`.
    pub fn integrate_composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        f: impl Fn(f64) -> f64,
    ) -> f64 {
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + width * p as f64;
                self.integrate(lo, lo + width, &f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Points and positive weights on `S^{N−1}` with weights summing to the
/// sphere measure. Directions are stored with three components; the third is
/// zero for `N = 2`.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Default rule: 26-point Lebedev on `S²`, 16 equispaced points on `S¹`.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => Self::circle(16),
            _ => Self::lebedev26(),
        }
    }

    /// Degree-7 Lebedev rule: octahedron vertices, edge midpoints, cube corners.
    pub fn lebedev26() -> Self {
        let mut points = Vec::with_capacity(26);
        let mut weights = Vec::with_capacity(26);
        let area = 4.0 * PI;
        for axis in 0..3 {
            for s in [-1.0, 1.0] {
                let mut p = [0.0; 3];
                p[axis] = s;
                points.push(p);
                weights.push(area / 21.0);
            }
        }
        let r2 = core::f64::consts::FRAC_1_SQRT_2;
        for zero_axis in 0..3 {
            for s1 in [-1.0, 1.0] {
                for s2 in [-1.0, 1.0] {
                    let mut p = [0.0; 3];
                    let (a, b) = match zero_axis {
                        0 => (1, 2),
                        1 => (0, 2),
                        _ => (0, 1),
                    };
                    p[a] = s1 * r2;
                    p[b] = s2 * r2;
                    points.push(p);
                    weights.push(area * 4.0 / 105.0);
                }
            }
        }
        let r3 = 1.0 / 3.0_f64.sqrt();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    points.push([sx * r3, sy * r3, sz * r3]);
                    weights.push(area * 9.0 / 280.0);
                }
            }
        }
        Self {
            dim: 3,
            points,
            weights,
        }
    }

    /// Gauss–Legendre in `cos θ` times `2n` equispaced azimuths; exact for
    /// spherical harmonics of degree below `2n`.
    pub fn product_gauss(n: usize) -> Self {
        let gl = GaussLegendre::new(n.max(1));
        let n_phi = 2 * n.max(1);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(gl.len() * n_phi);
        let mut weights = Vec::with_capacity(gl.len() * n_phi);
        for (&ct, &w) in gl.nodes().iter().zip(gl.weights()) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = dphi * (j as f64 + 0.5);
                let (sp, cp) = phi.sin_cos();
                points.push([st * cp, st * sp, ct]);
                weights.push(w * dphi);
            }
        }
        Self {
            dim: 3,
            points,
            weights,
        }
    }

    /// `n` equispaced points on the unit circle.
    pub fn circle(n: usize) -> Self {
        let n = n.max(1);
        let d = 2.0 * PI / n as f64;
        let points = (0..n)
            .map(|j| {
                let (s, c) = (d * j as f64).sin_cos();
                [c, s, 0.0]
            })
            .collect();
        Self {
            dim: 2,
            points,
            weights: vec![d; n],
        }
    }

    /// Rule of roughly `order` points per angular direction for dimension `dim`.
    pub fn with_order(dim: usize, order: usize) -> Self {
        match dim {
            2 => Self::circle(2 * order.max(1)),
            _ => Self::product_gauss(order.max(1)),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Direction `j` truncated to the rule dimension.
    pub fn direction(&self, j: usize) -> &[f64] {
        &self.points[j][..self.dim]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15
        let exact = 2.0 / 16.0;
        assert_relative_eq!(
            gl.integrate(-1.0, 1.0, |x| x.powi(14) * 1.0),
            exact * 16.0 / 15.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            gl.integrate(0.0, 2.0, |x| x.powi(15)),
            2.0_f64.powi(16) / 16.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(gl.weights().iter().sum::<f64>(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn gauss_legendre_32_is_spectral_on_sine() {
        let gl = GaussLegendre::new(32);
        assert_relative_eq!(gl.integrate(0.0, PI, f64::sin), 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            gl.integrate_composite(0.0, 10.0, 4, |x| (-x).exp()),
            1.0 - (-10.0_f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn sphere_rules_have_sphere_measure() {
        assert_relative_eq!(
            SphereRule::lebedev26().total_weight(),
            4.0 * PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            SphereRule::product_gauss(9).total_weight(),
            4.0 * PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            SphereRule::circle(12).total_weight(),
            2.0 * PI,
            max_relative = 1e-14
        );
        assert!(SphereRule::lebedev26().weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn lebedev_degree_seven() {
        // ∫ x²y²z² dσ = 4π/105, ∫ x⁴ dσ = 4π/5, ∫ x⁶ dσ = 4π/7
        let rule = SphereRule::lebedev26();
        let integ = |f: &dyn Fn(&[f64; 3]) -> f64| -> f64 {
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * f(p))
                .sum()
        };
        assert_relative_eq!(
            integ(&|p| (p[0] * p[1] * p[2]).powi(2)),
            4.0 * PI / 105.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            integ(&|p| p[0].powi(4)),
            4.0 * PI / 5.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            integ(&|p| p[2].powi(6)),
            4.0 * PI / 7.0,
            max_relative = 1e-13
        );
        assert!(integ(&|p| p[0].powi(3) * p[1]).abs() < 1e-14);
    }
}
