use super::bessel::jy_unchecked;
use super::{BesselOrder, SpecfunError};
use crate::prelude::*;

/// Wavenumber and dimension of the outgoing fundamental solution
/// `Φ_k(x) = (i/4) (k/(2π|x|))^{(N−2)/2} H⁽¹⁾_{(N−2)/2}(k|x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FundamentalSolutionParams {
    k: f64,
    dim: usize,
}

impl FundamentalSolutionParams {
    pub fn new(k: f64, dim: usize) -> Result<Self, SpecfunError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(SpecfunError::InvalidWavenumber(k));
        }
        if dim < 2 {
            return Err(SpecfunError::InvalidDimension(dim));
        }
        Ok(Self { k, dim })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> BesselOrder {
        BesselOrder((self.dim as f64 - 2.0) / 2.0)
    }

    /// `Φ_k` at radius `r > 0`. No regularization near the origin: the value
    /// grows like `r^{2−N}` (`log r` for `N = 2`).
    pub fn eval(&self, r: f64) -> Complex64 {
        let nu = self.order().value();
        let (j, y) = jy_unchecked(nu, self.k * r);
        let prefactor = if nu == 0.0 {
            0.25
        } else {
            0.25 * (self.k / (2.0 * PI * r)).powf(nu)
        };
        // (i/4)·c·(J + iY) = c/4 · (−Y + iJ)
        Complex64::new(-prefactor * y, prefactor * j)
    }

    /// `Ψ_k = Re Φ_k`.
    pub fn real_part(&self, r: f64) -> f64 {
        self.eval(r).re
    }

    /// Surface measure `|S^{N−1}|`.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }
}

pub fn fundamental_solution(
    params: FundamentalSolutionParams,
    r: f64,
) -> Result<Complex64, SpecfunError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(SpecfunError::NonPositiveArgument(r));
    }
    Ok(params.eval(r))
}

/// `|S^{N−1}| = 2π^{N/2}/Γ(N/2)`.
pub(crate) fn sphere_area(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * PI.powf(half) / libm::tgamma(half)
}
