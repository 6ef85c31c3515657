use super::VerifyError;
use crate::prelude::*;
use crate::quadrature::GaussLegendre;
use crate::specfun::{bessel_j, BesselOrder, FundamentalSolutionParams};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourierPositivityResult {
    pub dim: usize,
    pub k: f64,
    pub delta: f64,
    pub frequencies: Vec<f64>,
    /// Unitary transform `(2π)^{−N/2} ∫ e^{−ix·ξ} 1_{B_δ}Ψ_k dx` at `|ξ| = frequencies[j]`.
    pub transform_values: Vec<f64>,
    pub min_value: f64,
}

/// `count` equally spaced frequencies on `[0, 50/δ]`.
pub fn default_frequencies(delta: f64, count: usize) -> Vec<f64> {
    let top = 50.0 / delta;
    let n = count.max(2);
    (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect()
}

/// `ρ^{−ν} ∫₀^δ J_ν(sρ) f(s) s^{N/2} ds` with `ν = (N−2)/2`, the unitary
/// Fourier transform of the radial function `f(|x|) 1_{|x|<δ}` at `|ξ| = ρ`.
/// `f` may blow up like `s^{2−N}` at the origin.
pub fn radial_transform(dim: usize, delta: f64, profile: impl Fn(f64) -> f64, rho: f64) -> f64 {
    let nu = (dim as f64 - 2.0) / 2.0;
    let half = dim as f64 / 2.0;
    let gl = GaussLegendre::new(24);
    let panels = 4 + (2.0 * rho * delta / PI).ceil() as usize;
    // s = δt² keeps the integrand smooth at s = 0.
    let kernel = |s: f64| -> f64 {
        if rho == 0.0 {
            s.powf(nu) / (2f64.powf(nu) * libm::tgamma(nu + 1.0))
        } else {
            let order = BesselOrder::new(nu).unwrap_or(BesselOrder::ZERO);
            bessel_j(order, s * rho).unwrap_or(0.0) * rho.powf(-nu)
        }
    };
    gl.integrate_composite(0.0, 1.0, panels, |t| {
        if t == 0.0 {
            return 0.0;
        }
        let s = delta * t * t;
        kernel(s) * profile(s) * s.powf(half) * 2.0 * delta * t
    })
}

pub fn fourier_positivity(
    dim: usize,
    k: f64,
    delta: f64,
    frequencies: &[f64],
) -> Result<FourierPositivityResult, VerifyError> {
    if dim < 3 {
        return Err(VerifyError::InvalidArgument(
            "fourier positivity needs N >= 3",
        ));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(VerifyError::InvalidArgument("delta must be positive"));
    }
    if frequencies.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
        return Err(VerifyError::InvalidArgument(
            "frequencies must be finite and nonnegative",
        ));
    }
    let params = FundamentalSolutionParams::new(k, dim)?;
    let values = crate::par::map_indices(frequencies.len(), |i| {
        radial_transform(dim, delta, |s| params.real_part(s), frequencies[i])
    });
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FourierPositivityResult {
        dim,
        k,
        delta,
        frequencies: frequencies.to_vec(),
        transform_values: values,
        min_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::first_y_zero;

    #[test]
    fn zero_frequency_is_the_plain_integral() {
        // N = 3: ∫_{B_δ} cos(kr)/(4πr) dx = δ sin(kδ)/k + (cos(kδ) − 1)/k².
        let k = 1.3;
        let delta = 0.9;
        let r = fourier_positivity(3, k, delta, &[0.0, 1e-6]).unwrap();
        let plain = (delta * (k * delta).sin() / k + ((k * delta).cos() - 1.0) / (k * k))
            * (2.0 * PI).powf(-1.5);
        assert!((r.transform_values[0] - plain).abs() < 1e-12 * plain);
        assert!((r.transform_values[1] - plain).abs() < 1e-9 * plain);
    }

    #[test]
    fn three_dimensional_closed_form() {
        // For N = 3 the transform of cos(kr)/(4πr) on B_δ is
        // (2π)^{−3/2}/(4πρ) ∫₀^δ 4π sin(ρs) cos(ks) ds.
        let (k, delta) = (1.0, 1.2);
        for rho in [0.5, 2.0, 7.3] {
            let v = fourier_positivity(3, k, delta, &[rho])
                .unwrap()
                .transform_values[0];
            let integral = |a: f64| (1.0 - (a * delta).cos()) / a;
            let exact = (2.0 * PI).powf(-1.5) / rho * 0.5 * (integral(rho + k) + integral(rho - k));
            assert!((v - exact).abs() < 1e-12, "rho {rho}: {v} vs {exact}");
        }
    }

    #[test]
    fn positive_at_the_critical_radius() {
        for dim in 3..=6 {
            let z = first_y_zero(BesselOrder::for_dimension(dim).unwrap()).unwrap();
            let r = fourier_positivity(dim, 1.0, z, &default_frequencies(z, 200)).unwrap();
            assert!(r.min_value >= -1e-8, "N = {dim}: {}", r.min_value);
        }
    }

    #[test]
    fn synthetic_monotone_profile_is_positive() {
        // t^{(N−1)/2} f(t) = (1 − t)² on (0, 1) is nonincreasing.
        let f = |t: f64| (1.0 - t).powi(2) * t.powf(-1.0);
        for rho in default_frequencies(1.0, 150) {
            assert!(radial_transform(3, 1.0, f, rho) >= -1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fourier_positivity(2, 1.0, 1.0, &[1.0]).is_err());
        assert!(fourier_positivity(3, 1.0, -1.0, &[1.0]).is_err());
        assert!(fourier_positivity(3, 1.0, 1.0, &[-1.0]).is_err());
    }
}
