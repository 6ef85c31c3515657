//! Multi-dimensional complex FFT on a cube of side `P` built from rustfft
//! line transforms.

use alloc::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::prelude::*;

/// Smallest `n ≥ min` with no prime factors beyond 5.
pub(crate) fn smooth_size(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut r = n;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

pub(crate) struct CubeFft {
    side: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl core::fmt::Debug for CubeFft {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CubeFft")
            .field("side", &self.side)
            .field("dim", &self.dim)
            .finish()
    }
}

impl CubeFft {
    pub(crate) fn new(side: usize, dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            side,
            dim,
            forward: planner.plan_fft_forward(side),
            inverse: planner.plan_fft_inverse(side),
        }
    }

    pub(crate) fn side(&self) -> usize {
        self.side
    }

    pub(crate) fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalized inverse transform.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let p = self.side;
        debug_assert_eq!(data.len(), self.len());
        // Last axis: contiguous lines.
        data.par_chunks_mut(p).for_each_init(
            || vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
            |scratch, line| plan.process_with_scratch(line, scratch),
        );
        // Remaining axes: gather strided lines, transform, scatter back.
        for axis in (0..self.dim - 1).rev() {
            let stride = p.pow((self.dim - 1 - axis) as u32);
            let block = stride * p;
            data.par_chunks_mut(block).for_each_init(
                || {
                    (
                        vec![Complex64::new(0.0, 0.0); p],
                        vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()],
                    )
                },
                |(line, scratch), chunk| {
                    for offset in 0..stride {
                        for (j, slot) in line.iter_mut().enumerate() {
                            *slot = chunk[offset + j * stride];
                        }
                        plan.process_with_scratch(line, scratch);
                        for (j, v) in line.iter().enumerate() {
                            chunk[offset + j * stride] = *v;
                        }
                    }
                },
            );
        }
    }
}
