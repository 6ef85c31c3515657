use super::VerifyError;
use crate::prelude::*;
use crate::quadrature::GaussLegendre;
use crate::specfun::{bessel_j, j_zeros, BesselOrder};

/// Areas of two consecutive arches of `t^{1/2}|J_ν(t)|`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SturmResult {
    pub order: f64,
    /// `m`: the arches are `[j_{2m−2}, j_{2m−1}]` and `[j_{2m−1}, j_{2m}]`, `j_0 = 0`.
    pub pair_index: usize,
    pub left_integral: f64,
    pub right_integral: f64,
    /// `left − right`.
    pub margin: f64,
    /// Difference between the 32- and 48-node rules, summed over both arches.
    pub quadrature_error: f64,
}

fn arch(nu: BesselOrder, a: f64, b: f64, gl: &GaussLegendre) -> f64 {
    let f = |t: f64| t.sqrt() * bessel_j(nu, t).unwrap_or(0.0).abs();
    if a == 0.0 {
        // t = b s² smooths the t^{ν+1/2} behaviour at the origin.
        gl.integrate(0.0, 1.0, |s| {
            if s == 0.0 {
                0.0
            } else {
                f(b * s * s) * 2.0 * b * s
            }
        })
    } else {
        gl.integrate(a, b, f)
    }
}

pub fn sturm_check(nu: BesselOrder, pairs: usize) -> Result<Vec<SturmResult>, VerifyError> {
    if nu.value() < 0.5 {
        return Err(VerifyError::InvalidArgument(
            "the inequality is stated for orders >= 1/2",
        ));
    }
    if pairs == 0 {
        return Err(VerifyError::InvalidArgument("pairs must be at least 1"));
    }
    let table = j_zeros(nu, 2 * pairs)?;
    let mut z = Vec::with_capacity(2 * pairs + 1);
    z.push(0.0);
    z.extend_from_slice(&table.zeros);
    let coarse = GaussLegendre::new(32);
    let fine = GaussLegendre::new(48);
    Ok(crate::par::map_indices(pairs, |i| {
        let m = i + 1;
        let (a, b, c) = (z[2 * m - 2], z[2 * m - 1], z[2 * m]);
        let left = arch(nu, a, b, &fine);
        let right = arch(nu, b, c, &fine);
        let err = (left - arch(nu, a, b, &coarse)).abs() + (right - arch(nu, b, c, &coarse)).abs();
        SturmResult {
            order: nu.value(),
            pair_index: m,
            left_integral: left,
            right_integral: right,
            margin: left - right,
            quadrature_error: err,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_arches_are_equal() {
        let expected = 2.0 * (2.0 / PI).sqrt();
        for r in sturm_check(BesselOrder::HALF, 20).unwrap() {
            assert!((r.left_integral - expected).abs() < 1e-12, "{r:?}");
            assert!((r.right_integral - expected).abs() < 1e-12, "{r:?}");
            assert!(r.margin.abs() < 1e-12);
        }
    }

    #[test]
    fn integer_orders_have_positive_margins() {
        for nu in [1.0, 2.0, 3.0] {
            let rs = sturm_check(BesselOrder::new(nu).unwrap(), 10).unwrap();
            assert!(rs.iter().all(|r| r.margin > 0.0), "nu {nu}: {rs:?}");
        }
    }

    #[test]
    fn margins_shrink_for_three_halves() {
        let rs = sturm_check(BesselOrder::new(1.5).unwrap(), 12).unwrap();
        assert!(rs.windows(2).all(|w| w[1].margin < w[0].margin));
    }

    #[test]
    fn rejects_low_order() {
        assert!(sturm_check(BesselOrder::ZERO, 3).is_err());
        assert!(sturm_check(BesselOrder::HALF, 0).is_err());
    }
}
