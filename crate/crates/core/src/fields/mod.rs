//! Grids, complex fields and their weighted sup-norms, incident waves and
//! nonlinearities.

mod field;
mod grid;
mod incident;
mod nonlinearity;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use thiserror::Error;

pub use field::{ComplexField, RealField, WeightedNormResult};
pub use grid::{Grid, DEFAULT_POINT_CAP};
pub use incident::{make_incident, IncidentKind, IncidentWave};
pub use nonlinearity::{
    critical_exponent, CustomRule, DerivativeRule, NonlinearityKind, NonlinearitySpec,
    Perturbation, PointRule, RegimeTag,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldsError {
    #[error("field dimension must be 2 or 3, got {0}")]
    InvalidDimension(usize),
    #[error("box half-width must be positive and finite, got {0}")]
    InvalidHalfWidth(f64),
    #[error("need at least 2 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("grid with {points} points exceeds the cap of {cap}")]
    MemoryCap { points: usize, cap: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("grids are not aligned (equal spacing and an even size difference are required)")]
    NotAligned,
    #[error("decay exponent alpha = {alpha} must exceed {min}")]
    InvalidAlpha { alpha: f64, min: f64 },
    #[error("power exponent p = {p} outside (2, 2*) for dimension {dim}")]
    InvalidExponent { p: f64, dim: usize },
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
    #[error("direction must be a unit vector in R^2 or R^3")]
    InvalidDirection,
    #[error("sphere quadrature weights must be positive and sum to the sphere measure")]
    InvalidQuadrature,
    #[error("regime precondition violated: {0}")]
    RegimeViolation(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

/// `⟨x⟩ = (1 + |x|²)^{1/2}`.
pub fn bracket(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|c| c * c).sum::<f64>()).sqrt()
}

/// Decay exponent gained through the resolvent:
/// `α − (N+1)/2` for `(N+1)/2 < α < N`, and `(N−1)/2` for `α ≥ N`.
pub fn tau(alpha: f64, dim: usize) -> Result<f64, FieldsError> {
    let n = dim as f64;
    let min = (n + 1.0) / 2.0;
    if !(alpha.is_finite() && alpha > min) {
        return Err(FieldsError::InvalidAlpha { alpha, min });
    }
    Ok(if alpha < n {
        alpha - min
    } else {
        (n - 1.0) / 2.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::*;
    use proptest::prelude::*;

    #[test]
    fn tau_branches() {
        assert_eq!(tau(2.5, 3).unwrap(), 0.5);
        assert_eq!(tau(5.0, 3).unwrap(), 1.0);
        for n in 2..7 {
            let nf = n as f64;
            assert_eq!(tau(nf, n).unwrap(), (nf - 1.0) / 2.0);
            assert!((tau(nf - 1e-12, n).unwrap() - (nf - 1.0) / 2.0).abs() < 1e-11);
        }
        assert!(tau(2.0, 3).is_err());
    }

    fn field_strategy() -> impl Strategy<Value = ComplexField> {
        let g = Grid::new(2, 3.0, 7).unwrap();
        proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), g.len()).prop_map(move |v| {
            ComplexField::from_values(
                g,
                v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn weighted_norm_is_absolutely_homogeneous(w in field_strategy(), cr in -4.0f64..4.0, ci in -4.0f64..4.0, alpha in 0.0f64..5.0) {
            let c = Complex64::new(cr, ci);
            let lhs = w.scaled(c).weighted_norm(alpha).value;
            let rhs = c.norm() * w.weighted_norm(alpha).value;
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }

        #[test]
        fn weighted_norm_monotone_in_alpha(w in field_strategy(), a1 in 0.0f64..4.0, da in 0.0f64..2.0) {
            // every grid point has ⟨x⟩ ≥ 1
            prop_assert!(w.weighted_norm(a1).value <= w.weighted_norm(a1 + da).value);
        }
    }
}
