use super::{FieldsError, Grid};
use crate::prelude::*;

/// `max_x ⟨x⟩^α |w(x)|` over the grid and where it is attained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedNormResult {
    pub alpha: f64,
    pub value: f64,
    pub argmax_index: usize,
    pub argmax_point: Vec<f64>,
}

fn weighted_max(grid: &Grid, alpha: f64, modulus: impl Fn(usize) -> f64) -> WeightedNormResult {
    let mut best = 0.0;
    let mut arg = 0;
    for idx in 0..grid.len() {
        let m = modulus(idx);
        if m == 0.0 {
            continue;
        }
        let v = if alpha == 0.0 {
            m
        } else {
            grid.bracket(idx).powf(alpha) * m
        };
        if v > best {
            best = v;
            arg = idx;
        }
    }
    WeightedNormResult {
        alpha,
        value: best,
        argmax_index: arg,
        argmax_point: grid.coords(arg)[..grid.dim()].to_vec(),
    }
}

/// Complex samples on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self, FieldsError> {
        if values.len() != grid.len() {
            return Err(FieldsError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(FieldsError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid point; `f` receives the first `N` coordinates.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64 + Sync + Send) -> Self {
        let dim = grid.dim();
        let values = crate::par::map_indices(grid.len(), |i| f(&grid.coords(i)[..dim]));
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn weighted_norm(&self, alpha: f64) -> WeightedNormResult {
        weighted_max(&self.grid, alpha, |i| self.values[i].norm())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(
        &self,
        other: &ComplexField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, FieldsError> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `max |self − other|`.
    pub fn sup_distance(&self, other: &ComplexField) -> Result<f64, FieldsError> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm())))
    }

    pub fn re(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }

    pub fn im(&self) -> RealField {
        RealField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.im).collect(),
        }
    }

    pub(crate) fn check_same_grid(&self, other: &ComplexField) -> Result<(), FieldsError> {
        if self.grid != other.grid {
            return Err(FieldsError::GridMismatch);
        }
        Ok(())
    }

    /// Centered-difference gradient; `None` on the boundary layer.
    pub fn gradient(&self, idx: usize) -> Option<[Complex64; 3]> {
        if self.grid.on_boundary(idx) {
            return None;
        }
        let h2 = 2.0 * self.grid.spacing();
        let mut g = [Complex64::new(0.0, 0.0); 3];
        let strides = strides(&self.grid);
        for (axis, slot) in g.iter_mut().enumerate().take(self.grid.dim()) {
            let s = strides[axis];
            *slot = (self.values[idx + s] - self.values[idx - s]) / h2;
        }
        Some(g)
    }

    /// Seven-point (five-point in 2-D) Laplacian; `None` on the boundary layer.
    pub fn laplacian(&self, idx: usize) -> Option<Complex64> {
        if self.grid.on_boundary(idx) {
            return None;
        }
        let h = self.grid.spacing();
        let strides = strides(&self.grid);
        let c = self.values[idx];
        let mut acc = Complex64::new(0.0, 0.0);
        for &s in &strides[..self.grid.dim()] {
            acc += self.values[idx + s] + self.values[idx - s] - 2.0 * c;
        }
        Some(acc / (h * h))
    }

    /// Multilinear interpolation; `None` outside the box.
    pub fn interpolate(&self, x: &[f64]) -> Option<Complex64> {
        let dim = self.grid.dim();
        if !self.grid.contains(x) {
            return None;
        }
        let h = self.grid.spacing();
        let m = self.grid.points_per_axis();
        let l = self.grid.half_width();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for axis in 0..dim {
            let t = (x[axis] + l) / h;
            let i = (t.floor() as usize).min(m - 2);
            base[axis] = i;
            frac[axis] = (t - i as f64).clamp(0.0, 1.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << dim) {
            let mut w = 1.0;
            let mut mi = [0usize; 3];
            for axis in 0..dim {
                let bit = (corner >> axis) & 1;
                mi[axis] = base[axis] + bit;
                w *= if bit == 1 {
                    frac[axis]
                } else {
                    1.0 - frac[axis]
                };
            }
            if w != 0.0 {
                acc += self.values[self.grid.flat_index(&mi)] * w;
            }
        }
        Some(acc)
    }

    /// Samples on an aligned sub-grid.
    pub fn restrict_to(&self, inner: &Grid) -> Result<ComplexField, FieldsError> {
        let off = self
            .grid
            .aligned_offset(inner)
            .ok_or(FieldsError::NotAligned)?;
        let values = (0..inner.len())
            .map(|i| {
                let mut mi = inner.multi_index(i);
                for v in mi.iter_mut().take(inner.dim()) {
                    *v += off;
                }
                self.values[self.grid.flat_index(&mi)]
            })
            .collect();
        Ok(ComplexField {
            grid: *inner,
            values,
        })
    }

    /// Zero-extension to an aligned larger grid.
    pub fn extend_to(&self, outer: &Grid) -> Result<ComplexField, FieldsError> {
        let off = outer
            .aligned_offset(&self.grid)
            .ok_or(FieldsError::NotAligned)?;
        let mut out = ComplexField::zeros(*outer);
        for (i, &v) in self.values.iter().enumerate() {
            let mut mi = self.grid.multi_index(i);
            for c in mi.iter_mut().take(self.grid.dim()) {
                *c += off;
            }
            out.values[outer.flat_index(&mi)] = v;
        }
        Ok(out)
    }
}

pub(crate) fn strides(grid: &Grid) -> [usize; 3] {
    let m = grid.points_per_axis();
    match grid.dim() {
        2 => [m, 1, 0],
        _ => [m * m, m, 1],
    }
}

/// Real samples on a [`Grid`]; carries coefficients such as `Q` and `a`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, FieldsError> {
        if values.len() != grid.len() {
            return Err(FieldsError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldsError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.coords(i)[..dim])).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn weighted_norm(&self, alpha: f64) -> WeightedNormResult {
        weighted_max(&self.grid, alpha, |i| self.values[i].abs())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    /// Indices where the field is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] != 0.0)
            .collect()
    }

    /// Largest distance between two support points (grid samples only).
    pub fn support_diameter(&self) -> f64 {
        // Extremal pairs are found among support points that touch the complement.
        let strides = strides(&self.grid);
        let dim = self.grid.dim();
        let edge: Vec<[f64; 3]> = self
            .support()
            .into_iter()
            .filter(|&i| {
                self.grid.on_boundary(i)
                    || strides[..dim]
                        .iter()
                        .any(|&s| self.values[i + s] == 0.0 || self.values[i - s] == 0.0)
            })
            .map(|i| self.grid.coords(i))
            .collect();
        let mut diam2 = 0.0_f64;
        for (a, p) in edge.iter().enumerate() {
            for q in &edge[a + 1..] {
                let d = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                diam2 = diam2.max(d);
            }
        }
        diam2.sqrt()
    }

    /// Samples on an aligned sub-grid.
    pub fn restrict_to(&self, inner: &Grid) -> Result<RealField, FieldsError> {
        let c = self.to_complex().restrict_to(inner)?;
        Ok(c.re())
    }
}
