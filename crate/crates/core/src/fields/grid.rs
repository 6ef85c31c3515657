use super::FieldsError;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Default ceiling on `M^N`; a complex field at this size takes 256 MiB.
pub const DEFAULT_POINT_CAP: usize = 1 << 24;

/// Uniform grid on the box `[−L, L]^N`, `N ∈ {2, 3}`, with `M` points per axis.
///
/// Points are stored row-major with the last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self, FieldsError> {
        Self::with_cap(dim, half_width, points_per_axis, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(
        dim: usize,
        half_width: f64,
        points_per_axis: usize,
        cap: usize,
    ) -> Result<Self, FieldsError> {
        if !(2..=3).contains(&dim) {
            return Err(FieldsError::InvalidDimension(dim));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(FieldsError::InvalidHalfWidth(half_width));
        }
        if points_per_axis < 2 {
            return Err(FieldsError::TooFewPoints(points_per_axis));
        }
        let points = points_per_axis
            .checked_pow(dim as u32)
            .ok_or(FieldsError::MemoryCap {
                points: usize::MAX,
                cap,
            })?;
        if points > cap {
            return Err(FieldsError::MemoryCap { points, cap });
        }
        Ok(Self {
            dim,
            half_width,
            points_per_axis,
        })
    }

    /// Grid with spacing `h` whose `M` points per axis straddle the origin
    /// symmetrically, `L = h(M − 1)/2`.
    pub fn from_spacing(
        dim: usize,
        spacing: f64,
        points_per_axis: usize,
    ) -> Result<Self, FieldsError> {
        Self::new(
            dim,
            0.5 * spacing * (points_per_axis as f64 - 1.0),
            points_per_axis,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the `i`-th sample along any axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        -self.half_width + self.spacing() * i as f64
    }

    /// Multi-index of a flat index; unused trailing entries are zero.
    pub fn multi_index(&self, mut idx: usize) -> [usize; 3] {
        let m = self.points_per_axis;
        let mut out = [0usize; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % m;
            idx /= m;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Coordinates of a grid point; the third entry is zero when `N = 2`.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.axis_coord(mi[axis]);
        }
        x
    }

    /// `⟨x⟩ = (1 + |x|²)^{1/2}` at a grid point.
    pub fn bracket(&self, idx: usize) -> f64 {
        let x = self.coords(idx);
        (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.coords(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Whether a point sits on the outermost layer of the box.
    pub fn on_boundary(&self, idx: usize) -> bool {
        let mi = self.multi_index(idx);
        mi[..self.dim]
            .iter()
            .any(|&i| i == 0 || i + 1 == self.points_per_axis)
    }

    /// Offset (in cells per axis) at which `inner` sits inside `self`, when both
    /// share spacing, dimension and the origin is a common lattice point.
    pub fn aligned_offset(&self, inner: &Grid) -> Option<usize> {
        if self.dim != inner.dim || inner.points_per_axis > self.points_per_axis {
            return None;
        }
        let diff = self.points_per_axis - inner.points_per_axis;
        let rel = (self.spacing() - inner.spacing()).abs() / self.spacing();
        if !diff.is_multiple_of(2) || rel > 1e-12 {
            return None;
        }
        Some(diff / 2)
    }

    /// Whether a point of `R^N` lies inside the box (inclusive).
    pub fn contains(&self, x: &[f64]) -> bool {
        x[..self.dim]
            .iter()
            .all(|&c| c >= -self.half_width && c <= self.half_width)
    }

    /// Largest radius `R` such that the ball `B_R` stays `margin_cells` away from the
    /// box faces.
    pub fn inscribed_radius(&self, margin_cells: usize) -> f64 {
        self.half_width - self.spacing() * margin_cells as f64
    }
}
