use super::singular::{ball_integral, ball_integral_abs, cube_integral, SingularRule};
use super::ResolventError;
use crate::fields::{ComplexField, Grid, DEFAULT_POINT_CAP};
use crate::prelude::*;
use crate::specfun::FundamentalSolutionParams;

#[cfg(feature = "std")]
use super::fft::{smooth_size, CubeFft};

/// Source and evaluation lattices for `Φ_k ∗ h`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResolventConfig {
    pub source_grid: Grid,
    pub eval_grid: Grid,
    pub singular_rule: SingularRule,
    /// Gauss points per axis for singular-cell remainders.
    pub quadrature_order: usize,
}

impl ResolventConfig {
    pub fn new(
        source_grid: Grid,
        eval_grid: Grid,
        singular_rule: SingularRule,
        quadrature_order: usize,
    ) -> Result<Self, ResolventError> {
        let cfg = Self {
            source_grid,
            eval_grid,
            singular_rule,
            quadrature_order,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Source and evaluation on the same grid, cell-average rule.
    pub fn on_grid(grid: Grid) -> Self {
        Self {
            source_grid: grid,
            eval_grid: grid,
            singular_rule: SingularRule::CellAverage,
            quadrature_order: 8,
        }
    }

    pub fn validate(&self) -> Result<(), ResolventError> {
        let (s, e) = (&self.source_grid, &self.eval_grid);
        if s.dim() != e.dim() {
            return Err(ResolventError::GridMismatch(
                "source and evaluation dimensions differ",
            ));
        }
        if (s.spacing() - e.spacing()).abs() > 1e-12 * s.spacing() {
            return Err(ResolventError::GridMismatch(
                "source and evaluation spacings differ",
            ));
        }
        if (s.points_per_axis() + e.points_per_axis()) % 2 != 0 {
            return Err(ResolventError::GridMismatch(
                "point counts must differ by an even number so both lattices contain the origin offsets",
            ));
        }
        if self.quadrature_order == 0 {
            return Err(ResolventError::GridMismatch(
                "quadrature order must be positive",
            ));
        }
        Ok(())
    }

    /// Signed cell shift `c = (M_e − M_s)/2` between the two lattices.
    fn shift(&self) -> isize {
        (self.eval_grid.points_per_axis() as isize - self.source_grid.points_per_axis() as isize)
            / 2
    }
}

/// Which kernel the operator convolves with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum KernelKind {
    /// `Φ_k`.
    Outgoing,
    /// `conj Φ_k`.
    Incoming,
    /// `|Φ_k|`.
    Magnitude,
    /// `Ψ_k = Re Φ_k`.
    RealPart,
}

/// Discrete `h ↦ Σ_y w(x − y) h(y)` with `w(d) = h^N Φ_k(|d|)` away from the
/// singular cell.
#[derive(Debug)]
pub struct ResolventOperator {
    config: ResolventConfig,
    params: FundamentalSolutionParams,
    kind: KernelKind,
    /// Weights indexed by the absolute cell offset per axis.
    table: Vec<Complex64>,
    table_side: usize,
    #[cfg(feature = "std")]
    fast: Option<FastPath>,
}

#[cfg(feature = "std")]
#[derive(Debug)]
struct FastPath {
    fft: CubeFft,
    spectrum: Vec<Complex64>,
}

impl ResolventOperator {
    pub fn new(config: ResolventConfig, k: f64, kind: KernelKind) -> Result<Self, ResolventError> {
        config.validate()?;
        let dim = config.source_grid.dim();
        let params = FundamentalSolutionParams::new(k, dim)?;
        let c = config.shift();
        let ms = config.source_grid.points_per_axis() as isize;
        let me = config.eval_grid.points_per_axis() as isize;
        let dmin = -(ms - 1) - c;
        let dmax = me - 1 - c;
        let table_side = (dmin.unsigned_abs().max(dmax.unsigned_abs())) + 1;
        let table_len = table_side
            .checked_pow(dim as u32)
            .filter(|&n| n <= 4 * DEFAULT_POINT_CAP)
            .ok_or(ResolventError::MemoryCap {
                points: usize::MAX,
                cap: 4 * DEFAULT_POINT_CAP,
            })?;
        let h = config.source_grid.spacing();
        let vol = config.source_grid.cell_volume();
        let self_weight = {
            let w = match config.singular_rule {
                SingularRule::CellAverage => ball_integral(&params, h),
                SingularRule::Subtraction => cube_integral(&params, h, config.quadrature_order),
            };
            match kind {
                KernelKind::Outgoing => w,
                KernelKind::Incoming => w.conj(),
                KernelKind::RealPart => Complex64::new(w.re, 0.0),
                KernelKind::Magnitude => {
                    Complex64::new(ball_integral_abs(&params, h).max(w.norm()), 0.0)
                }
            }
        };
        let table = crate::par::map_indices(table_len, |idx| {
            let mut r2 = 0usize;
            let mut rest = idx;
            for _ in 0..dim {
                let d = rest % table_side;
                rest /= table_side;
                r2 += d * d;
            }
            if r2 == 0 {
                return self_weight;
            }
            let phi = params.eval(h * (r2 as f64).sqrt()) * vol;
            match kind {
                KernelKind::Outgoing => phi,
                KernelKind::Incoming => phi.conj(),
                KernelKind::Magnitude => Complex64::new(phi.norm(), 0.0),
                KernelKind::RealPart => Complex64::new(phi.re, 0.0),
            }
        });
        #[cfg_attr(not(feature = "std"), allow(unused_mut))]
        let mut op = Self {
            config,
            params,
            kind,
            table,
            table_side,
            #[cfg(feature = "std")]
            fast: None,
        };
        #[cfg(feature = "std")]
        {
            op.fast = op.build_fast_path();
        }
        Ok(op)
    }

    pub fn outgoing(config: ResolventConfig, k: f64) -> Result<Self, ResolventError> {
        Self::new(config, k, KernelKind::Outgoing)
    }

    pub fn config(&self) -> &ResolventConfig {
        &self.config
    }

    pub fn k(&self) -> f64 {
        self.params.k()
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Weight for the signed cell offset `x − y = h·d`.
    pub fn weight(&self, d: &[isize]) -> Complex64 {
        let idx = d[..self.config.source_grid.dim()]
            .iter()
            .rev()
            .fold(0usize, |acc, &v| acc * self.table_side + v.unsigned_abs());
        self.table[idx]
    }

    /// Weight coupling evaluation point `e` to source point `s` (flat indices).
    pub fn pair_weight(&self, e: usize, s: usize) -> Complex64 {
        let me = self.config.eval_grid.multi_index(e);
        let ms = self.config.source_grid.multi_index(s);
        let c = self.config.shift();
        let mut d = [0isize; 3];
        for axis in 0..self.config.source_grid.dim() {
            d[axis] = me[axis] as isize - ms[axis] as isize - c;
        }
        self.weight(&d)
    }

    fn check_input(&self, h: &ComplexField) -> Result<(), ResolventError> {
        if h.grid() != &self.config.source_grid {
            return Err(ResolventError::GridMismatch(
                "density is not on the source grid",
            ));
        }
        Ok(())
    }

    /// Applies the operator, on the FFT path when available.
    pub fn apply(&self, h: &ComplexField) -> Result<ComplexField, ResolventError> {
        self.check_input(h)?;
        #[cfg(feature = "std")]
        if let Some(fast) = &self.fast {
            return Ok(self.apply_fft(fast, h));
        }
        self.apply_direct(h)
    }

    /// Reference path: direct summation over all source points.
    pub fn apply_direct(&self, h: &ComplexField) -> Result<ComplexField, ResolventError> {
        self.check_input(h)?;
        let src = self.config.source_grid;
        let eval = self.config.eval_grid;
        let dim = src.dim();
        let c = self.config.shift();
        let support: Vec<(usize, [usize; 3])> = (0..src.len())
            .filter(|&i| h.values()[i] != Complex64::new(0.0, 0.0))
            .map(|i| (i, src.multi_index(i)))
            .collect();
        let values = crate::par::map_indices(eval.len(), |e| {
            let me = eval.multi_index(e);
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, ms) in &support {
                let mut idx = 0usize;
                for axis in (0..dim).rev() {
                    let d = me[axis] as isize - ms[axis] as isize - c;
                    idx = idx * self.table_side + d.unsigned_abs();
                }
                acc += self.table[idx] * h.values()[*s];
            }
            acc
        });
        Ok(ComplexField::from_values(eval, values)?)
    }

    #[cfg(feature = "std")]
    fn build_fast_path(&self) -> Option<FastPath> {
        let dim = self.config.source_grid.dim();
        let ms = self.config.source_grid.points_per_axis();
        let me = self.config.eval_grid.points_per_axis();
        let span = ms + me - 1;
        let side = smooth_size(span);
        let len = side.checked_pow(dim as u32)?;
        if len > 4 * DEFAULT_POINT_CAP {
            return None;
        }
        let fft = CubeFft::new(side, dim);
        let c = self.config.shift();
        let dmin = -(ms as isize - 1) - c;
        // Kernel entry for offset d sits at position d − dmin on every axis.
        let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
        for a in 0..span.pow(dim as u32) {
            let mut rest = a;
            let mut pos = 0usize;
            let mut tidx = 0usize;
            let mut digits = [0usize; 3];
            for slot in digits.iter_mut().take(dim) {
                *slot = rest % span;
                rest /= span;
            }
            for &digit in &digits[..dim] {
                pos = pos * side + digit;
                tidx = tidx * self.table_side + (digit as isize + dmin).unsigned_abs();
            }
            spectrum[pos] = self.table[tidx];
        }
        fft.forward(&mut spectrum);
        Some(FastPath { fft, spectrum })
    }

    #[cfg(feature = "std")]
    fn apply_fft(&self, fast: &FastPath, h: &ComplexField) -> ComplexField {
        use rayon::prelude::*;
        let src = self.config.source_grid;
        let eval = self.config.eval_grid;
        let dim = src.dim();
        let side = fast.fft.side();
        let ms = src.points_per_axis();
        let mut buf = vec![Complex64::new(0.0, 0.0); fast.fft.len()];
        for (i, &v) in h.values().iter().enumerate() {
            let mi = src.multi_index(i);
            let pos = (0..dim).fold(0usize, |acc, axis| acc * side + mi[axis]);
            buf[pos] = v;
        }
        fast.fft.forward(&mut buf);
        buf.par_iter_mut()
            .zip(fast.spectrum.par_iter())
            .for_each(|(b, s)| *b *= s);
        fast.fft.inverse(&mut buf);
        let scale = 1.0 / fast.fft.len() as f64;
        let values = (0..eval.len())
            .map(|e| {
                let mi = eval.multi_index(e);
                let pos =
                    (0..dim).fold(0usize, |acc, axis| acc * side + (mi[axis] + ms - 1) % side);
                buf[pos] * scale
            })
            .collect();
        ComplexField::from_values(eval, values).expect("finite convolution output")
    }

    /// Whether [`apply`](Self::apply) runs on the FFT path.
    pub fn uses_fft(&self) -> bool {
        #[cfg(feature = "std")]
        {
            self.fast.is_some()
        }
        #[cfg(not(feature = "std"))]
        {
            false
        }
    }
}

/// `R_k h` on the configured grids.
pub fn apply_resolvent(
    h: &ComplexField,
    cfg: &ResolventConfig,
    k: f64,
) -> Result<ComplexField, ResolventError> {
    ResolventOperator::outgoing(*cfg, k)?.apply(h)
}
