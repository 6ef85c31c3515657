use alloc::sync::Arc;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComplexField, FieldsError, Grid, RealField};
use crate::prelude::*;

/// Pointwise rule `f(x, u)`.
pub type PointRule = Arc<dyn Fn(&[f64], Complex64) -> Complex64 + Send + Sync>;
/// Real-linear derivative rule `(x, u, v) ↦ f′(x, u)v`.
pub type DerivativeRule = Arc<dyn Fn(&[f64], Complex64, Complex64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RegimeTag {
    /// Asymptotically linear: `a(x)u + b(x, u)` with real `a`, sublinear `b`.
    F1,
    /// Linearly bounded: `|f(x, u)| ≤ Q(x)|u| + b(x)`.
    F2,
    /// Power type with `Q ≤ 0` and compact support.
    Defocusing,
}

/// Bounded perturbation `b(x, u)` of an affine nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    None,
    /// `b(x, u) = s(x)`.
    Source(ComplexField),
    /// `b(x, u) = c(x) u/(1 + |u|)`, so `|b| ≤ |c|`.
    Saturating(RealField),
}

#[derive(Clone)]
pub struct CustomRule {
    pub f: PointRule,
    pub derivative: Option<DerivativeRule>,
    pub grid: Grid,
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule")
            .field("grid", &self.grid)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum NonlinearityKind {
    /// `Q(x)|u|^{p−2}u`.
    Power {
        q: RealField,
        p: f64,
    },
    /// `a(x)u + b(x, u)`.
    Affine {
        a: RealField,
        b: Perturbation,
    },
    Custom(CustomRule),
}

/// `f(x, u)` together with its decay exponent `α`, an optional Lipschitz estimate
/// `ℓ_α` and regime tags.
#[derive(Debug, Clone)]
pub struct NonlinearitySpec {
    kind: NonlinearityKind,
    alpha: f64,
    lipschitz_ell: Option<f64>,
    lipschitz_cap: Option<f64>,
    tags: Vec<RegimeTag>,
}

/// Critical Sobolev exponent `2N/(N − 2)`; infinite for `N ≤ 2`.
pub fn critical_exponent(dim: usize) -> f64 {
    if dim <= 2 {
        f64::INFINITY
    } else {
        2.0 * dim as f64 / (dim as f64 - 2.0)
    }
}

fn check_alpha(alpha: f64, dim: usize) -> Result<(), FieldsError> {
    let min = (dim as f64 + 1.0) / 2.0;
    if alpha.is_finite() && alpha > min {
        Ok(())
    } else {
        Err(FieldsError::InvalidAlpha { alpha, min })
    }
}

impl NonlinearitySpec {
    pub fn power(q: RealField, p: f64, alpha: f64) -> Result<Self, FieldsError> {
        let dim = q.grid().dim();
        check_alpha(alpha, dim)?;
        if !(p > 2.0 && p < critical_exponent(dim)) {
            return Err(FieldsError::InvalidExponent { p, dim });
        }
        Ok(Self::new(NonlinearityKind::Power { q, p }, alpha))
    }

    /// `f ≡ 0`, written as a power nonlinearity with `Q ≡ 0`, `p = 3`.
    pub fn zero(grid: Grid, alpha: f64) -> Result<Self, FieldsError> {
        Self::power(RealField::zeros(grid), 3.0, alpha)
    }

    pub fn affine(a: RealField, b: Perturbation, alpha: f64) -> Result<Self, FieldsError> {
        check_alpha(alpha, a.grid().dim())?;
        match &b {
            Perturbation::Source(s) if s.grid() != a.grid() => {
                return Err(FieldsError::GridMismatch)
            }
            Perturbation::Saturating(c) if c.grid() != a.grid() => {
                return Err(FieldsError::GridMismatch)
            }
            _ => {}
        }
        Ok(Self::new(NonlinearityKind::Affine { a, b }, alpha))
    }

    pub fn custom(
        grid: Grid,
        f: PointRule,
        derivative: Option<DerivativeRule>,
        alpha: f64,
    ) -> Result<Self, FieldsError> {
        check_alpha(alpha, grid.dim())?;
        Ok(Self::new(
            NonlinearityKind::Custom(CustomRule {
                f,
                derivative,
                grid,
            }),
            alpha,
        ))
    }

    fn new(kind: NonlinearityKind, alpha: f64) -> Self {
        Self {
            kind,
            alpha,
            lipschitz_ell: None,
            lipschitz_cap: None,
            tags: Vec::new(),
        }
    }

    /// Adds a regime tag after checking what can be checked on the grid.
    pub fn with_tag(mut self, tag: RegimeTag) -> Result<Self, FieldsError> {
        let dim = self.grid().dim() as f64;
        match (tag, &self.kind) {
            (RegimeTag::Defocusing, NonlinearityKind::Power { q, .. }) => {
                if q.values().iter().any(|&v| v > 0.0) {
                    return Err(FieldsError::RegimeViolation("defocusing requires Q <= 0"));
                }
                let g = q.grid();
                if (0..g.len()).any(|i| g.on_boundary(i) && q.values()[i] != 0.0) {
                    return Err(FieldsError::RegimeViolation(
                        "defocusing requires Q to vanish on the box boundary",
                    ));
                }
            }
            (RegimeTag::F1, NonlinearityKind::Affine { .. }) => {
                let min = dim * (dim + 3.0) / (2.0 * (dim + 1.0));
                if self.alpha <= min {
                    return Err(FieldsError::InvalidAlpha {
                        alpha: self.alpha,
                        min,
                    });
                }
            }
            (RegimeTag::F2, NonlinearityKind::Affine { .. }) => {}
            _ => {
                return Err(FieldsError::RegimeViolation(
                    "tag does not fit this nonlinearity kind",
                ))
            }
        }
        if !self.tags.contains(&tag) {
            self.tags.push(tag);
            self.tags.sort();
        }
        Ok(self)
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lipschitz_ell(&self) -> Option<f64> {
        self.lipschitz_ell
    }

    /// Cap `M` used for the stored `ℓ_α` estimate.
    pub fn lipschitz_cap(&self) -> Option<f64> {
        self.lipschitz_cap
    }

    pub fn tags(&self) -> &[RegimeTag] {
        &self.tags
    }

    pub fn has_tag(&self, tag: RegimeTag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn grid(&self) -> &Grid {
        match &self.kind {
            NonlinearityKind::Power { q, .. } => q.grid(),
            NonlinearityKind::Affine { a, .. } => a.grid(),
            NonlinearityKind::Custom(c) => &c.grid,
        }
    }

    /// The coefficient `Q` (power) or `a` (affine).
    pub fn coefficient(&self) -> Option<&RealField> {
        match &self.kind {
            NonlinearityKind::Power { q, .. } => Some(q),
            NonlinearityKind::Affine { a, .. } => Some(a),
            NonlinearityKind::Custom(_) => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match &self.kind {
            NonlinearityKind::Power { p, .. } => Some(*p),
            _ => None,
        }
    }

    /// Same rule with `Q` (or `a` and `b`) multiplied by `c`; tags and the
    /// Lipschitz estimate are dropped.
    pub fn scaled(&self, c: f64) -> Result<Self, FieldsError> {
        let kind = match &self.kind {
            NonlinearityKind::Power { q, p } => NonlinearityKind::Power {
                q: q.scaled(c),
                p: *p,
            },
            NonlinearityKind::Affine { a, b } => NonlinearityKind::Affine {
                a: a.scaled(c),
                b: match b {
                    Perturbation::None => Perturbation::None,
                    Perturbation::Source(s) => {
                        Perturbation::Source(s.scaled(Complex64::new(c, 0.0)))
                    }
                    Perturbation::Saturating(r) => Perturbation::Saturating(r.scaled(c)),
                },
            },
            NonlinearityKind::Custom(_) => {
                return Err(FieldsError::Unsupported("scaling a custom rule"));
            }
        };
        Ok(Self::new(kind, self.alpha))
    }

    /// `f(x_i, u)` at grid point `i`.
    pub fn eval_at(&self, i: usize, x: &[f64], u: Complex64) -> Complex64 {
        match &self.kind {
            NonlinearityKind::Power { q, p } => power_value(q.values()[i], *p, u),
            NonlinearityKind::Affine { a, b } => {
                let lin = u * a.values()[i];
                lin + match b {
                    Perturbation::None => Complex64::new(0.0, 0.0),
                    Perturbation::Source(s) => s.values()[i],
                    Perturbation::Saturating(c) => u * (c.values()[i] / (1.0 + u.norm())),
                }
            }
            NonlinearityKind::Custom(c) => (c.f)(x, u),
        }
    }

    /// `N_f(u)(x) = f(x, u(x))`.
    pub fn apply(&self, u: &ComplexField) -> Result<ComplexField, FieldsError> {
        let grid = *self.grid();
        if u.grid() != &grid {
            return Err(FieldsError::GridMismatch);
        }
        let dim = grid.dim();
        let vals = u.values();
        let out = crate::par::map_indices(grid.len(), |i| {
            self.eval_at(i, &grid.coords(i)[..dim], vals[i])
        });
        ComplexField::from_values(grid, out)
    }

    /// Directional derivative `N_f′(u)v`, real-linear in `v`.
    pub fn derivative(
        &self,
        u: &ComplexField,
        v: &ComplexField,
    ) -> Result<ComplexField, FieldsError> {
        let grid = *self.grid();
        if u.grid() != &grid || v.grid() != &grid {
            return Err(FieldsError::GridMismatch);
        }
        let dim = grid.dim();
        let (uv, vv) = (u.values(), v.values());
        let out: Vec<Complex64> = match &self.kind {
            NonlinearityKind::Power { q, p } => (0..grid.len())
                .map(|i| power_derivative(q.values()[i], *p, uv[i], vv[i]))
                .collect(),
            NonlinearityKind::Affine { a, b } => (0..grid.len())
                .map(|i| {
                    let mut d = vv[i] * a.values()[i];
                    if let Perturbation::Saturating(c) = b {
                        d += saturating_derivative(c.values()[i], uv[i], vv[i]);
                    }
                    d
                })
                .collect(),
            NonlinearityKind::Custom(c) => {
                let rule = c
                    .derivative
                    .as_ref()
                    .ok_or(FieldsError::Unsupported("custom rule without derivative"))?;
                (0..grid.len())
                    .map(|i| rule(&grid.coords(i)[..dim], uv[i], vv[i]))
                    .collect()
            }
        };
        ComplexField::from_values(grid, out)
    }

    /// Per-point modulus scale used to steer sampling towards the extremal `x`.
    fn coefficient_modulus(&self, i: usize) -> f64 {
        match &self.kind {
            NonlinearityKind::Power { q, .. } => q.values()[i].abs(),
            NonlinearityKind::Affine { a, b } => {
                a.values()[i].abs()
                    + match b {
                        Perturbation::Saturating(c) => c.values()[i].abs(),
                        _ => 0.0,
                    }
            }
            NonlinearityKind::Custom(_) => 1.0,
        }
    }

    fn quotient(&self, i: usize, x: &[f64], weight: f64, u: Complex64, v: Complex64) -> f64 {
        let d = u - v;
        if d.norm() == 0.0 {
            return 0.0;
        }
        weight * ((self.eval_at(i, x, u) - self.eval_at(i, x, v)) / d).norm()
    }

    /// Randomized lower estimate of
    /// `ℓ_α = sup ⟨x⟩^α |f(x,u) − f(x,v)|/|u − v|` over complex `|u|, |v| ≤ cap`.
    ///
    /// Half of the samples use the grid point maximizing `⟨x⟩^α` times the
    /// coefficient modulus, the rest a uniform point; the best sample is then
    /// refined by coordinate search. The stored estimate only ever grows.
    pub fn estimate_lipschitz(&mut self, cap: f64, samples: usize, seed: u64) -> f64 {
        let grid = *self.grid();
        let dim = grid.dim();
        let alpha = self.alpha;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..grid.len())
            .map(|i| grid.bracket(i).powf(alpha))
            .collect();
        let steer = (0..grid.len())
            .max_by(|&a, &b| {
                let wa = weights[a] * self.coefficient_modulus(a);
                let wb = weights[b] * self.coefficient_modulus(b);
                wa.partial_cmp(&wb).unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap_or(0);
        let disc = |rng: &mut ChaCha8Rng| {
            let r = cap * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, 2.0 * PI * rng.gen::<f64>())
        };
        let mut best = (
            0.0,
            steer,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        for s in 0..samples.max(1) {
            let i = if s % 2 == 0 {
                steer
            } else {
                rng.gen_range(0..grid.len())
            };
            let x = grid.coords(i);
            let u = disc(&mut rng);
            let v = disc(&mut rng);
            let q = self.quotient(i, &x[..dim], weights[i], u, v);
            if q > best.0 {
                best = (q, i, u, v);
            }
        }
        // Coordinate refinement in (Re u, Im u, Re v, Im v).
        let (mut val, i, mut u, mut v) = best;
        let x = grid.coords(i);
        let mut step = 0.25 * cap;
        let clamp = |z: Complex64| {
            if z.norm() > cap {
                z * (cap / z.norm())
            } else {
                z
            }
        };
        while step > 1e-9 * cap && val > 0.0 {
            let mut improved = false;
            for c in 0..8 {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                let delta = match c / 2 {
                    0 | 2 => Complex64::new(sign * step, 0.0),
                    _ => Complex64::new(0.0, sign * step),
                };
                let (cu, cv) = if c / 2 < 2 {
                    (clamp(u + delta), v)
                } else {
                    (u, clamp(v + delta))
                };
                let q = self.quotient(i, &x[..dim], weights[i], cu, cv);
                if q > val {
                    val = q;
                    u = cu;
                    v = cv;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        let prev = self.lipschitz_ell.unwrap_or(0.0);
        if val >= prev {
            self.lipschitz_ell = Some(val);
            self.lipschitz_cap = Some(cap);
        }
        val
    }

    /// `(‖Q‖, ‖b‖)` in `L^∞_α` for the linearly bounded regime, where `Q = |a|` and
    /// `b` bounds the perturbation pointwise.
    pub fn f2_bounds(&self) -> Result<(f64, f64), FieldsError> {
        match &self.kind {
            NonlinearityKind::Affine { a, b } => {
                let qn = a.weighted_norm(self.alpha).value;
                let bn = match b {
                    Perturbation::None => 0.0,
                    Perturbation::Source(s) => s.weighted_norm(self.alpha).value,
                    Perturbation::Saturating(c) => c.weighted_norm(self.alpha).value,
                };
                Ok((qn, bn))
            }
            _ => Err(FieldsError::RegimeViolation(
                "linear bound needs an affine nonlinearity",
            )),
        }
    }

    /// `sup_{|u| ≤ M, x} ⟨x⟩^α |b(x, u)| / M` at each `M`; tends to zero under
    /// the asymptotically linear regime.
    pub fn f1_growth_ratios(&self, caps: &[f64]) -> Result<Vec<f64>, FieldsError> {
        match &self.kind {
            NonlinearityKind::Affine { b, .. } => Ok(caps
                .iter()
                .map(|&m| {
                    let sup = match b {
                        Perturbation::None => 0.0,
                        Perturbation::Source(s) => s.weighted_norm(self.alpha).value,
                        Perturbation::Saturating(c) => {
                            c.weighted_norm(self.alpha).value * m / (1.0 + m)
                        }
                    };
                    sup / m
                })
                .collect()),
            _ => Err(FieldsError::RegimeViolation(
                "growth ratios need an affine nonlinearity",
            )),
        }
    }
}

/// `q|u|^{p−2}u`, zero at `u = 0`.
#[inline]
pub(crate) fn power_value(q: f64, p: f64, u: Complex64) -> Complex64 {
    if q == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = u.norm();
    if m == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let s = if p == 3.0 { m } else { m.powf(p - 2.0) };
    u * (q * s)
}

/// `q((p/2)|u|^{p−2}v + ((p−2)/2)|u|^{p−4}u²v̄)`, zero at `u = 0`.
#[inline]
pub(crate) fn power_derivative(q: f64, p: f64, u: Complex64, v: Complex64) -> Complex64 {
    let m = u.norm();
    if q == 0.0 || m == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = m.powf(p - 2.0);
    let b = m.powf(p - 4.0);
    (v * (0.5 * p * a) + u * u * v.conj() * (0.5 * (p - 2.0) * b)) * q
}

fn saturating_derivative(c: f64, u: Complex64, v: Complex64) -> Complex64 {
    // d/dθ [u/(1+|u|)] along v, with d|u| = Re(ū v)/|u|.
    let m = u.norm();
    let denom = 1.0 + m;
    let dm = if m == 0.0 { 0.0 } else { (u.conj() * v).re / m };
    (v / denom - u * (dm / (denom * denom))) * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::{prop_assert, proptest};

    fn grid() -> Grid {
        Grid::new(3, 2.0, 9).unwrap()
    }

    fn gaussian_q(g: Grid, amp: f64) -> RealField {
        RealField::from_fn(g, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            if r2 < 1.0 {
                amp * (-2.0 * r2).exp()
            } else {
                0.0
            }
        })
    }

    #[test]
    fn construction_checks() {
        let g = grid();
        assert!(matches!(
            NonlinearitySpec::power(RealField::zeros(g), 2.0, 3.0),
            Err(FieldsError::InvalidExponent { .. })
        ));
        assert!(NonlinearitySpec::power(RealField::zeros(g), 6.0, 3.0).is_err());
        assert!(matches!(
            NonlinearitySpec::power(RealField::zeros(g), 3.0, 2.0),
            Err(FieldsError::InvalidAlpha { .. })
        ));
        let positive = NonlinearitySpec::power(gaussian_q(g, 1.0), 3.0, 3.0).unwrap();
        assert!(positive.with_tag(RegimeTag::Defocusing).is_err());
        let wide = NonlinearitySpec::power(RealField::from_fn(g, |_| -1.0), 3.0, 3.0).unwrap();
        assert!(wide.with_tag(RegimeTag::Defocusing).is_err());
        let ok = NonlinearitySpec::power(gaussian_q(g, -1.0), 3.0, 3.0)
            .unwrap()
            .with_tag(RegimeTag::Defocusing)
            .unwrap();
        assert!(ok.has_tag(RegimeTag::Defocusing));
    }

    #[test]
    fn apply_trivial_cases() {
        let g = grid();
        let f = NonlinearitySpec::power(gaussian_q(g, -1.0), 3.0, 3.0).unwrap();
        assert_eq!(f.apply(&ComplexField::zeros(g)).unwrap().sup_norm(), 0.0);
        let minus_one = NonlinearitySpec::power(RealField::from_fn(g, |_| -1.0), 3.0, 3.0).unwrap();
        let ones = ComplexField::from_fn(g, |_| Complex64::new(1.0, 0.0));
        for v in minus_one.apply(&ones).unwrap().values() {
            assert_eq!(*v, Complex64::new(-1.0, 0.0));
        }
    }

    #[test]
    fn apply_matches_independent_recomputation() {
        let g = grid();
        let q = gaussian_q(g, 0.7);
        let f = NonlinearitySpec::power(q.clone(), 3.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = ComplexField::from_values(
            g,
            (0..g.len())
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect(),
        )
        .unwrap();
        let out = f.apply(&u).unwrap();
        for i in 0..g.len() {
            let w = u.values()[i];
            let expect = Complex64::new(
                w.re * w.norm() * q.values()[i],
                w.im * w.norm() * q.values()[i],
            );
            assert!((out.values()[i] - expect).norm() <= 1e-14 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn derivative_vanishes_at_zero_and_matches_quartic_expansion() {
        let g = grid();
        let q = gaussian_q(g, -1.3);
        let f = NonlinearitySpec::power(q.clone(), 3.5, 3.0).unwrap();
        let v = ComplexField::from_fn(g, |x| Complex64::new(x[0], 1.0));
        assert_eq!(
            f.derivative(&ComplexField::zeros(g), &v)
                .unwrap()
                .sup_norm(),
            0.0
        );

        // p = 4 in N = 3 is outside the admissible range, so check the formula directly.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let u = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let got = power_derivative(0.8, 4.0, u, v);
            let expect = (v * (2.0 * u.norm_sqr()) + u * u * v.conj()) * 0.8;
            assert!((got - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = grid();
        let f = NonlinearitySpec::power(gaussian_q(g, -1.0), 3.0, 3.0).unwrap();
        let u = ComplexField::from_fn(g, |x| Complex64::new(1.0 + 0.3 * x[0], 0.5 - 0.2 * x[1]));
        let v = ComplexField::from_fn(g, |x| Complex64::new(0.4 * x[2], 1.0));
        let d = f.derivative(&u, &v).unwrap();
        let fu = f.apply(&u).unwrap();
        let mut errs = Vec::new();
        for theta in [1e-3, 1e-4, 1e-5] {
            let shifted = u.zip_map(&v, |a, b| a + b * theta).unwrap();
            let fd = f.apply(&shifted).unwrap();
            let err = (0..g.len())
                .map(|i| ((fd.values()[i] - fu.values()[i]) / theta - d.values()[i]).norm())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[0] < 1e-2);
        assert!(
            errs[1] < errs[0] * 0.2 && errs[2] < errs[1] * 0.2,
            "{errs:?}"
        );
    }

    #[test]
    fn lipschitz_estimates() {
        let g = grid();
        let mut zero = NonlinearitySpec::zero(g, 3.0).unwrap();
        assert_eq!(zero.estimate_lipschitz(5.0, 200, 1), 0.0);

        // Q supported in the unit ball with sup q; for p = 3 the sup over |u|,|v| ≤ M
        // of ⟨x⟩^α|Q| · ||u|u − |v|v|/|u − v| is at most 2M·max⟨x⟩^α|Q|.
        let q = gaussian_q(g, 0.6);
        let qw = q.weighted_norm(3.0).value;
        let cap = 2.0;
        let mut f = NonlinearitySpec::power(q, 3.0, 3.0).unwrap();
        let est = f.estimate_lipschitz(cap, 400, 7);
        assert!(est <= 2.0 * qw * cap * (1.0 + 1e-12), "{est}");
        assert!(est >= qw * cap * 0.99, "{est}");
        assert_eq!(f.lipschitz_ell(), Some(est));
        assert_eq!(f.lipschitz_cap(), Some(cap));

        let a = RealField::from_fn(g, |x| 0.5 * (-(x[0] * x[0])).exp());
        let an = a.weighted_norm(3.0).value;
        let mut aff = NonlinearitySpec::affine(a, Perturbation::None, 3.0).unwrap();
        assert_relative_eq!(aff.estimate_lipschitz(1.0, 50, 3), an, max_relative = 1e-12);
    }

    #[test]
    fn lipschitz_brute_force_lattice() {
        // Brute force over a lattice of (u, v) at the steering point.
        let g = grid();
        let q = gaussian_q(g, 1.0);
        let cap = 1.5;
        let mut f = NonlinearitySpec::power(q.clone(), 3.0, 3.0).unwrap();
        let est = f.estimate_lipschitz(cap, 300, 11);
        let qw = q.weighted_norm(3.0).value;
        let mut brute: f64 = 0.0;
        let n = 24;
        for a in 0..n {
            for b in 0..n {
                let u = Complex64::from_polar(cap * (a + 1) as f64 / n as f64, 0.3);
                let v =
                    Complex64::from_polar(cap * (b + 1) as f64 / n as f64, 0.3 + 0.05 * b as f64);
                if a == b && b == 0 {
                    continue;
                }
                let num = power_value(1.0, 3.0, u) - power_value(1.0, 3.0, v);
                if (u - v).norm() > 0.0 {
                    brute = brute.max(qw * (num / (u - v)).norm());
                }
            }
        }
        assert!(est >= 0.95 * brute, "est {est} brute {brute}");
    }

    #[test]
    fn lipschitz_doubles_with_q() {
        let g = grid();
        let mut f = NonlinearitySpec::power(gaussian_q(g, -0.4), 3.0, 3.0).unwrap();
        let mut f2 = f.scaled(2.0).unwrap();
        let a = f.estimate_lipschitz(1.0, 100, 42);
        let b = f2.estimate_lipschitz(1.0, 100, 42);
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn affine_regime_helpers() {
        let g = grid();
        let a = RealField::from_fn(g, |_| 0.1);
        let c = RealField::from_fn(g, |x| if x[0].abs() < 0.6 { 0.3 } else { 0.0 });
        let f = NonlinearitySpec::affine(a, Perturbation::Saturating(c), 3.5)
            .unwrap()
            .with_tag(RegimeTag::F2)
            .unwrap()
            .with_tag(RegimeTag::F1)
            .unwrap();
        let (qn, bn) = f.f2_bounds().unwrap();
        assert!(qn > 0.1 && bn > 0.29);
        let ratios = f.f1_growth_ratios(&[1.0, 10.0, 100.0]).unwrap();
        assert!(ratios[2] < ratios[1] && ratios[1] < ratios[0]);
        let u = ComplexField::from_fn(g, |x| Complex64::new(x[1], 0.5));
        let v = ComplexField::from_fn(g, |x| Complex64::new(1.0, x[2]));
        let d = f.derivative(&u, &v).unwrap();
        let theta = 1e-6;
        let fd = f
            .apply(&u.zip_map(&v, |a, b| a + b * theta).unwrap())
            .unwrap()
            .zip_map(&f.apply(&u).unwrap(), |a, b| (a - b) / theta)
            .unwrap();
        assert!(fd.sup_distance(&d).unwrap() < 1e-5);
    }

    proptest! {
        #[test]
        fn defocusing_power_is_dissipative(re in -3.0f64..3.0, im in -3.0f64..3.0, q in -2.0f64..0.0, p in 2.05f64..5.9) {
            let u = Complex64::new(re, im);
            let f = power_value(q, p, u);
            let pairing = (u.conj() * f).re;
            prop_assert!(pairing <= 0.0);
            let expect = q * u.norm().powf(p);
            prop_assert!((pairing - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }

        #[test]
        fn derivative_is_real_linear(ur in -2.0f64..2.0, ui in -2.0f64..2.0, vr in -2.0f64..2.0, vi in -2.0f64..2.0, s in -3.0f64..3.0) {
            let u = Complex64::new(ur, ui);
            let v = Complex64::new(vr, vi);
            let a = power_derivative(-1.0, 3.0, u, v * s);
            let b = power_derivative(-1.0, 3.0, u, v) * s;
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }
}
