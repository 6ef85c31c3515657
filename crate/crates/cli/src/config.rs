//! JSON run configuration and its translation into solver objects.

use std::path::Path;

use helmscat_core::continuation::StepConfig;
use helmscat_core::fields::{
    ComplexField, Grid, IncidentWave, NonlinearitySpec, Perturbation, RealField, RegimeTag,
};
use helmscat_core::quadrature::SphereRule;
use helmscat_core::resolvent::{ResolventConfig, SingularRule};
use helmscat_core::solver::SolverConfig;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub problem: Option<Problem>,
    pub solver: SolverConfig,
    pub resolvent: ResolventSettings,
    pub continuation: ContinuationSettings,
    pub kappa: KappaSettings,
    pub farfield: FarFieldSettings,
    pub verify: VerifySettings,
    pub animate: AnimateSettings,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub dim: usize,
    pub k: f64,
    /// Half-width `L` of the source box `[−L, L]^N`.
    pub half_width: f64,
    /// Points per axis `M` on the source box.
    pub points: usize,
    /// Extra evaluation points per side beyond the source box.
    #[serde(default)]
    pub eval_padding: usize,
    pub nonlinearity: NonlinearityConfig,
    pub incident: IncidentConfig,
}

/// Radial coefficient profiles on the source grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `amplitude (1 − |x|²/radius²)^power` inside the ball, zero outside.
    Bump {
        amplitude: f64,
        radius: f64,
        power: i32,
    },
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    Constant {
        value: f64,
    },
}

impl Profile {
    pub fn sample(&self, grid: Grid) -> RealField {
        match *self {
            Profile::Bump {
                amplitude,
                radius,
                power,
            } => RealField::from_fn(grid, move |x| {
                let r2 = norm2(x) / (radius * radius);
                if r2 < 1.0 {
                    amplitude * (1.0 - r2).powi(power)
                } else {
                    0.0
                }
            }),
            Profile::Gaussian { amplitude, width } => RealField::from_fn(grid, move |x| {
                amplitude * (-norm2(x) / (width * width)).exp()
            }),
            Profile::Constant { value } => RealField::from_fn(grid, move |_| value),
        }
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    Source,
    Saturating,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    Zero {
        alpha: f64,
    },
    Power {
        q: Profile,
        p: f64,
        alpha: f64,
        #[serde(default)]
        tags: Vec<RegimeTag>,
    },
    Affine {
        a: Profile,
        #[serde(default)]
        b: Option<Profile>,
        #[serde(default = "default_perturbation")]
        b_kind: PerturbationKind,
        alpha: f64,
        #[serde(default)]
        tags: Vec<RegimeTag>,
    },
}

fn default_perturbation() -> PerturbationKind {
    PerturbationKind::Source
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IncidentConfig {
    Plane {
        direction: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Herglotz wave with constant density over a product/circle rule.
    Herglotz {
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `φ ≡ 0` (homogeneous problem).
    None,
}

fn one() -> f64 {
    1.0
}

fn default_order() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolventSettings {
    pub singular_rule: SingularRule,
    pub quadrature_order: usize,
}

impl Default for ResolventSettings {
    fn default() -> Self {
        Self {
            singular_rule: SingularRule::CellAverage,
            quadrature_order: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationSettings {
    pub lambda_max: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// Defaults to `1e-4 · lambda_max`.
    pub min_step: Option<f64>,
    /// Field files are written at these `λ`.
    pub store_fields_at: Vec<f64>,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        let step = StepConfig::default();
        Self {
            lambda_max: 1.0,
            initial_step: step.initial_step,
            max_step: step.max_step,
            min_step: None,
            store_fields_at: Vec::new(),
        }
    }
}

impl ContinuationSettings {
    pub fn step(&self) -> StepConfig {
        StepConfig {
            initial_step: self.initial_step,
            max_step: self.max_step,
            min_step: self.min_step,
            store_fields_at: self.store_fields_at.clone(),
            store_all_fields: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KappaSettings {
    /// Defaults to the nonlinearity's `alpha`.
    pub alpha: Option<f64>,
    /// Cap on `|u|` for the Lipschitz estimate.
    pub lipschitz_cap: Option<f64>,
    pub lipschitz_samples: usize,
}

impl Default for KappaSettings {
    fn default() -> Self {
        Self {
            alpha: None,
            lipschitz_cap: None,
            lipschitz_samples: 2000,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FarFieldSettings {
    /// Defaults to 0.85 of the evaluation half-width divided by 1.1.
    pub radius: Option<f64>,
    /// Order of the direction rule (`0` selects the standard rule).
    pub directions_order: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySettings {
    pub nu: f64,
    pub pairs: usize,
    pub sturm_tolerance: f64,
    pub dim: usize,
    pub k: f64,
    /// Defaults to `z_N / k`.
    pub delta: Option<f64>,
    pub frequencies: usize,
    pub fourier_tolerance: f64,
    /// Flux radii; default to `L/4, L/2, 3L/4` of the evaluation box.
    pub radii: Option<Vec<f64>>,
    pub energy_tolerance: f64,
    pub margin_tolerance: f64,
    /// Incident scalings for the power-law fit of the defocusing bound.
    pub scales: Vec<f64>,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            nu: 0.5,
            pairs: 5,
            sturm_tolerance: 1e-9,
            dim: 3,
            k: 1.0,
            delta: None,
            frequencies: 400,
            fourier_tolerance: 1e-8,
            radii: None,
            energy_tolerance: 1e-10,
            margin_tolerance: 1e-10,
            scales: vec![1.0, 2.0, 4.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnimateSettings {
    pub times: Vec<f64>,
    /// Axis held fixed by the slice.
    pub axis: usize,
    /// Index along `axis`; defaults to the middle plane.
    pub index: Option<usize>,
}

impl Default for AnimateSettings {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            axis: 2,
            index: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok((cfg, bytes))
    }

    pub fn problem(&self) -> Result<&Problem, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| CliError::Config("this action needs a `problem` section".into()))
    }
}

/// Grids, operators' inputs and the nonlinearity built from a [`Problem`].
pub struct Setup {
    pub source: Grid,
    pub eval: Grid,
    pub rcfg: ResolventConfig,
    pub nonlinearity: NonlinearitySpec,
    pub phi: ComplexField,
    pub k: f64,
}

fn cfg_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl Problem {
    pub fn setup(&self, resolvent: &ResolventSettings) -> Result<Setup, CliError> {
        let source = Grid::new(self.dim, self.half_width, self.points).map_err(cfg_err)?;
        let eval = if self.eval_padding == 0 {
            source
        } else {
            Grid::from_spacing(
                self.dim,
                source.spacing(),
                self.points + 2 * self.eval_padding,
            )
            .map_err(cfg_err)?
        };
        let rcfg = ResolventConfig::new(
            source,
            eval,
            resolvent.singular_rule,
            resolvent.quadrature_order,
        )
        .map_err(cfg_err)?;
        let nonlinearity = self.nonlinearity.build(source)?;
        let phi = self.incident.sample(self.k, &eval)?;
        Ok(Setup {
            source,
            eval,
            rcfg,
            nonlinearity,
            phi,
            k: self.k,
        })
    }
}

impl NonlinearityConfig {
    pub fn build(&self, grid: Grid) -> Result<NonlinearitySpec, CliError> {
        let (spec, tags) = match self {
            NonlinearityConfig::Zero { alpha } => (
                NonlinearitySpec::zero(grid, *alpha).map_err(cfg_err)?,
                &[][..],
            ),
            NonlinearityConfig::Power { q, p, alpha, tags } => (
                NonlinearitySpec::power(q.sample(grid), *p, *alpha).map_err(cfg_err)?,
                tags.as_slice(),
            ),
            NonlinearityConfig::Affine {
                a,
                b,
                b_kind,
                alpha,
                tags,
            } => {
                let pert = match (b, b_kind) {
                    (None, _) => Perturbation::None,
                    (Some(p), PerturbationKind::Source) => {
                        Perturbation::Source(p.sample(grid).to_complex())
                    }
                    (Some(p), PerturbationKind::Saturating) => {
                        Perturbation::Saturating(p.sample(grid))
                    }
                };
                (
                    NonlinearitySpec::affine(a.sample(grid), pert, *alpha).map_err(cfg_err)?,
                    tags.as_slice(),
                )
            }
        };
        tags.iter()
            .try_fold(spec, |s, &t| s.with_tag(t))
            .map_err(cfg_err)
    }
}

impl IncidentConfig {
    pub fn sample(&self, k: f64, grid: &Grid) -> Result<ComplexField, CliError> {
        let (wave, amplitude) = match self {
            IncidentConfig::Plane {
                direction,
                amplitude,
            } => (
                IncidentWave::plane(k, direction).map_err(cfg_err)?,
                *amplitude,
            ),
            IncidentConfig::Herglotz { order, amplitude } => {
                let rule = SphereRule::with_order(grid.dim(), *order);
                let wave = IncidentWave::herglotz_fn(k, rule, |_| Complex64::new(1.0, 0.0))
                    .map_err(cfg_err)?;
                (wave, *amplitude)
            }
            IncidentConfig::None => return Ok(ComplexField::zeros(*grid)),
        };
        if !amplitude.is_finite() {
            return Err(CliError::Config("incident amplitude must be finite".into()));
        }
        Ok(wave
            .sample(grid)
            .map_err(cfg_err)?
            .scaled(Complex64::new(amplitude, 0.0)))
    }
}
