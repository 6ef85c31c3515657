use super::{ComplexField, FieldsError, Grid};
use crate::prelude::*;
use crate::quadrature::SphereRule;

const UNIT_TOL: f64 = 1e-10;

/// Free wave `φ` with `Δφ + k²φ = 0`.
#[derive(Debug, Clone)]
pub enum IncidentKind {
    /// `e^{ik x·ξ}`.
    Plane { direction: Vec<f64> },
    /// `Σ_j w_j e^{ik x·ξ_j} g(ξ_j)`.
    Herglotz {
        rule: SphereRule,
        density: Vec<Complex64>,
    },
    /// Caller-supplied samples, used as is.
    Custom(ComplexField),
}

#[derive(Debug, Clone)]
pub struct IncidentWave {
    pub k: f64,
    pub kind: IncidentKind,
}

impl IncidentWave {
    pub fn plane(k: f64, direction: &[f64]) -> Result<Self, FieldsError> {
        check_k(k)?;
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(2..=3).contains(&direction.len()) || (norm - 1.0).abs() > UNIT_TOL {
            return Err(FieldsError::InvalidDirection);
        }
        Ok(Self {
            k,
            kind: IncidentKind::Plane {
                direction: direction.to_vec(),
            },
        })
    }

    pub fn herglotz(
        k: f64,
        rule: SphereRule,
        density: Vec<Complex64>,
    ) -> Result<Self, FieldsError> {
        check_k(k)?;
        if density.len() != rule.len() {
            return Err(FieldsError::LengthMismatch {
                expected: rule.len(),
                got: density.len(),
            });
        }
        let measure = crate::specfun::sphere_area(rule.dim);
        let total = rule.total_weight();
        if rule.weights.iter().any(|&w| !(w > 0.0)) || (total - measure).abs() > 1e-10 * measure {
            return Err(FieldsError::InvalidQuadrature);
        }
        if rule.points.iter().any(|p| {
            let n: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            (n - 1.0).abs() > UNIT_TOL
        }) {
            return Err(FieldsError::InvalidDirection);
        }
        Ok(Self {
            k,
            kind: IncidentKind::Herglotz { rule, density },
        })
    }

    /// Herglotz wave with density sampled from `g` at the rule's nodes.
    pub fn herglotz_fn(
        k: f64,
        rule: SphereRule,
        g: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self, FieldsError> {
        let density = (0..rule.len()).map(|j| g(rule.direction(j))).collect();
        Self::herglotz(k, rule, density)
    }

    pub fn custom(k: f64, field: ComplexField) -> Result<Self, FieldsError> {
        check_k(k)?;
        Ok(Self {
            k,
            kind: IncidentKind::Custom(field),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            IncidentKind::Plane { direction } => direction.len(),
            IncidentKind::Herglotz { rule, .. } => rule.dim,
            IncidentKind::Custom(f) => f.grid().dim(),
        }
    }

    /// Value at a point; `None` for custom samples.
    pub fn eval(&self, x: &[f64]) -> Option<Complex64> {
        let k = self.k;
        match &self.kind {
            IncidentKind::Plane { direction } => {
                let phase: f64 = direction.iter().zip(x).map(|(a, b)| a * b).sum();
                Some(Complex64::from_polar(1.0, k * phase))
            }
            IncidentKind::Herglotz { rule, density } => Some(
                rule.weights
                    .iter()
                    .zip(density)
                    .enumerate()
                    .map(|(j, (&w, &g))| {
                        let phase: f64 = rule.direction(j).iter().zip(x).map(|(a, b)| a * b).sum();
                        Complex64::from_polar(w, k * phase) * g
                    })
                    .sum(),
            ),
            IncidentKind::Custom(_) => None,
        }
    }

    /// Samples `φ` on `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<ComplexField, FieldsError> {
        if self.dim() != grid.dim() {
            return Err(FieldsError::GridMismatch);
        }
        match &self.kind {
            IncidentKind::Custom(f) => {
                if f.grid() == grid {
                    Ok(f.clone())
                } else {
                    f.restrict_to(grid)
                }
            }
            _ => Ok(ComplexField::from_fn(*grid, |x| {
                self.eval(x).unwrap_or_default()
            })),
        }
    }
}

/// Samples an incident wave on a grid.
pub fn make_incident(spec: &IncidentWave, grid: &Grid) -> Result<ComplexField, FieldsError> {
    spec.sample(grid)
}

fn check_k(k: f64) -> Result<(), FieldsError> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(FieldsError::InvalidWavenumber(k))
    }
}
