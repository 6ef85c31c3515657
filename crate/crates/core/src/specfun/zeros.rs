use super::bessel::jy_unchecked;
use super::{BesselOrder, SpecfunError};
use crate::prelude::*;

/// Sampling step used to bracket sign changes. Zeros of cylinder functions are
/// spaced close to `π`, so no zero is skipped at this step for the orders used.
const BRACKET_STEP: f64 = PI / 8.0;
const SEARCH_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CylinderKind {
    /// `J_ν`
    First,
    /// `Y_ν`
    Second,
}

impl CylinderKind {
    pub fn eval(self, nu: BesselOrder, t: f64) -> f64 {
        let (j, y) = jy_unchecked(nu.value(), t);
        match self {
            CylinderKind::First => j,
            CylinderKind::Second => y,
        }
    }
}

/// Increasing positive zeros of `J_ν` or `Y_ν`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroTable {
    pub order: BesselOrder,
    pub kind: CylinderKind,
    pub zeros: Vec<f64>,
    /// Width of the final bisection bracket (worst case over all entries).
    pub precision: f64,
}

impl ZeroTable {
    /// Checks that every entry sits at a sign change of the tabulated function,
    /// probing `±offset` around it.
    pub fn sign_changes_hold(&self, offset: f64) -> bool {
        let increasing = self.zeros.windows(2).all(|w| w[0] < w[1]);
        increasing
            && self.zeros.iter().all(|&z| {
                let lo = self.kind.eval(self.order, z - offset);
                let hi = self.kind.eval(self.order, z + offset);
                lo * hi < 0.0
            })
    }
}

/// `z_N`-style first positive zero of `Y_ν`.
pub fn first_y_zero(nu: BesselOrder) -> Result<f64, SpecfunError> {
    if nu.is_half() {
        // Y_{1/2}(t) = −√(2/(πt)) cos t
        return Ok(PI / 2.0);
    }
    let (zeros, _) = bracketed_zeros(nu, CylinderKind::Second, 1)?;
    Ok(zeros[0])
}

/// First `count` positive zeros of `J_ν`.
pub fn j_zeros(nu: BesselOrder, count: usize) -> Result<ZeroTable, SpecfunError> {
    if nu.is_half() {
        return Ok(ZeroTable {
            order: nu,
            kind: CylinderKind::First,
            zeros: (1..=count).map(|n| n as f64 * PI).collect(),
            precision: 0.0,
        });
    }
    let (zeros, precision) = bracketed_zeros(nu, CylinderKind::First, count)?;
    Ok(ZeroTable {
        order: nu,
        kind: CylinderKind::First,
        zeros,
        precision,
    })
}

/// Zeros of `Y_ν` (same bracketing route as [`j_zeros`]).
pub fn y_zeros(nu: BesselOrder, count: usize) -> Result<ZeroTable, SpecfunError> {
    let (zeros, precision) = bracketed_zeros(nu, CylinderKind::Second, count)?;
    Ok(ZeroTable {
        order: nu,
        kind: CylinderKind::Second,
        zeros,
        precision,
    })
}

/// Sample at `π/8` spacing, bisect each bracket to adjacent floats.
pub(crate) fn bracketed_zeros(
    nu: BesselOrder,
    kind: CylinderKind,
    count: usize,
) -> Result<(Vec<f64>, f64), SpecfunError> {
    let f = |t: f64| kind.eval(nu, t);
    let mut zeros = Vec::with_capacity(count);
    let mut precision = 0.0_f64;
    let mut a = BRACKET_STEP;
    let mut fa = f(a);
    let mut step = 1usize;
    while zeros.len() < count {
        step += 1;
        let b = BRACKET_STEP * step as f64;
        if b > SEARCH_LIMIT {
            return Err(SpecfunError::ZeroNotFound {
                what: match kind {
                    CylinderKind::First => "J",
                    CylinderKind::Second => "Y",
                },
                limit: SEARCH_LIMIT,
            });
        }
        let fb = f(b);
        if fb == 0.0 {
            zeros.push(b);
        } else if fa * fb < 0.0 {
            let (z, width) = bisect(&f, a, b, fa);
            precision = precision.max(width);
            zeros.push(z);
        }
        a = b;
        fa = fb;
    }
    Ok((zeros, precision))
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> (f64, f64) {
    for _ in 0..200 {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, 0.0);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    (a + 0.5 * (b - a), b - a)
}
