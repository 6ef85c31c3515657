use super::VerifyError;
use crate::fields::{critical_exponent, ComplexField, NonlinearityKind, NonlinearitySpec};
use crate::prelude::*;
use crate::solver::BoundCheck;

/// Integrals and bound chain for a defocusing power nonlinearity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DefocusingReport {
    /// `∫ |Q| |u|^p`.
    pub integral_p: f64,
    /// `∫ |Q| |u|^{p−1}`.
    pub integral_p_minus_1: f64,
    /// `|Ω|`, `Ω = {Q ≠ 0}`.
    pub omega_measure: f64,
    pub q_sup: f64,
    pub phi_sup: f64,
    /// `(2*)′`; equals 1 for `N = 2`.
    pub dual_exponent: f64,
    /// `‖Q|u|^{p−1}‖_{(2*)′}`.
    pub d_norm: f64,
    /// `D = |Ω|^{1/(2*)′} ‖Q‖_∞ ‖φ‖_∞^{p−1}`.
    pub d_bound: f64,
    /// In order: `first_bound`, `holder_bound`, `energy_bound`, `final_bound`.
    pub checks: Vec<BoundCheck>,
}

impl DefocusingReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn defocusing_inequalities(
    u: &ComplexField,
    phi: &ComplexField,
    f: &NonlinearitySpec,
) -> Result<DefocusingReport, VerifyError> {
    let (q, p) = match f.kind() {
        NonlinearityKind::Power { q, p } => (q, *p),
        _ => {
            return Err(VerifyError::RegimeViolation(
                "defocusing checks need a power nonlinearity",
            ))
        }
    };
    let grid = *q.grid();
    if q.values().iter().any(|&v| v > 0.0) {
        return Err(VerifyError::RegimeViolation("Q must be nonpositive"));
    }
    if (0..grid.len()).any(|i| grid.on_boundary(i) && q.values()[i] != 0.0) {
        return Err(VerifyError::RegimeViolation(
            "Q must vanish on the box boundary",
        ));
    }
    let restricted;
    let u_src = if u.grid() == &grid {
        u
    } else {
        restricted = u.restrict_to(&grid)?;
        &restricted
    };
    let vol = grid.cell_volume();
    let dim = grid.dim();
    let r = if dim <= 2 {
        1.0
    } else {
        let c = critical_exponent(dim);
        c / (c - 1.0)
    };
    let mut ip = 0.0;
    let mut ip1 = 0.0;
    let mut q_int = 0.0;
    let mut omega = 0.0;
    let mut d_sum = 0.0;
    for (&qv, uv) in q.values().iter().zip(u_src.values()) {
        if qv == 0.0 {
            continue;
        }
        let a = qv.abs();
        let m = uv.norm();
        let mp1 = m.powf(p - 1.0);
        ip += a * mp1 * m;
        ip1 += a * mp1;
        q_int += a;
        omega += 1.0;
        d_sum += (a * mp1).powf(r);
    }
    ip *= vol;
    ip1 *= vol;
    q_int *= vol;
    omega *= vol;
    let d_norm = (d_sum * vol).powf(1.0 / r);
    let q_sup = q.sup_norm();
    let phi_sup = phi.sup_norm();
    let d_bound = omega.powf(1.0 / r) * q_sup * phi_sup.powf(p - 1.0);
    let checks = vec![
        BoundCheck::new("first_bound", ip, phi_sup * ip1),
        BoundCheck::new("holder_bound", ip1, phi_sup.powf(p - 1.0) * q_int),
        BoundCheck::new("energy_bound", ip, omega * q_sup * phi_sup.powf(p)),
        BoundCheck::new("final_bound", d_norm, d_bound),
    ];
    Ok(DefocusingReport {
        integral_p: ip,
        integral_p_minus_1: ip1,
        omega_measure: omega,
        q_sup,
        phi_sup,
        dual_exponent: r,
        d_norm,
        d_bound,
        checks,
    })
}

/// `‖u‖_∞ ≤ C(1 + ‖φ‖_∞^{(p−1)^m})` fitted over a family of solves.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerBoundFit {
    pub m: u32,
    /// `(p − 1)^m`.
    pub exponent: f64,
    pub c: f64,
    /// Least-squares slope of `ln ‖u‖_∞` against `ln ‖φ‖_∞`.
    pub observed_exponent: f64,
    /// The observed growth is no faster than `exponent`.
    pub covers_all: bool,
}

/// Picks the smallest `m ≤ max_m` whose exponent dominates the observed growth,
/// then the smallest `C` covering every sample.
pub fn fit_power_bound(
    samples: &[(f64, f64)],
    p: f64,
    max_m: u32,
) -> Result<PowerBoundFit, VerifyError> {
    if !(p > 2.0) {
        return Err(VerifyError::InvalidArgument("p must exceed 2"));
    }
    if max_m == 0 {
        return Err(VerifyError::InvalidArgument("max_m must be at least 1"));
    }
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(a, b)| a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(VerifyError::InvalidArgument(
            "need two samples with positive norms",
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0.ln()).sum::<f64>() / n;
    let my = pts.iter().map(|q| q.1.ln()).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|q| (q.0.ln() - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(VerifyError::InvalidArgument(
            "samples need distinct incident norms",
        ));
    }
    let sxy: f64 = pts.iter().map(|q| (q.0.ln() - mx) * (q.1.ln() - my)).sum();
    let observed = sxy / sxx;
    let mut m = 1;
    while m < max_m && (p - 1.0).powi(m as i32) < observed {
        m += 1;
    }
    let exponent = (p - 1.0).powi(m as i32);
    let c = pts
        .iter()
        .map(|&(a, b)| b / (1.0 + a.powf(exponent)))
        .fold(0.0, f64::max);
    Ok(PowerBoundFit {
        m,
        exponent,
        c,
        observed_exponent: observed,
        covers_all: observed <= exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Grid, RealField};

    fn bump(g: Grid, amp: f64) -> RealField {
        RealField::from_fn(g, move |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            if r2 < 0.5 {
                amp * (1.0 - 2.0 * r2).powi(2)
            } else {
                0.0
            }
        })
    }

    #[test]
    fn zero_q_is_tight() {
        let g = Grid::new(3, 2.0, 9).unwrap();
        let phi = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0, x[0]));
        let f = NonlinearitySpec::power(RealField::zeros(g), 3.0, 3.0).unwrap();
        let rep = defocusing_inequalities(&phi, &phi, &f).unwrap();
        for c in &rep.checks {
            assert_eq!(c.margin, 0.0, "{c:?}");
        }
    }

    #[test]
    fn holder_steps_hold_for_any_field() {
        let g = Grid::new(3, 2.0, 11).unwrap();
        let f = NonlinearitySpec::power(bump(g, -3.0), 3.0, 3.0).unwrap();
        let phi = ComplexField::from_fn(g, |_| Complex64::new(2.0, 0.0));
        // |u| ≤ ‖φ‖ makes the first bound hold trivially; the rest follow by Hölder.
        let u = ComplexField::from_fn(g, |x| Complex64::new(1.0 + 0.5 * x[0].sin(), 0.3));
        let rep = defocusing_inequalities(&u, &phi, &f).unwrap();
        assert!(
            rep.checks.iter().all(|c| c.margin >= 0.0),
            "{:?}",
            rep.checks
        );
        assert!((rep.dual_exponent - 1.2).abs() < 1e-15);
    }

    #[test]
    fn violation_is_reported_not_hidden() {
        let g = Grid::new(3, 2.0, 11).unwrap();
        let f = NonlinearitySpec::power(bump(g, -1.0), 3.0, 3.0).unwrap();
        let phi = ComplexField::from_fn(g, |_| Complex64::new(0.1, 0.0));
        let u = ComplexField::from_fn(g, |_| Complex64::new(5.0, 0.0));
        let rep = defocusing_inequalities(&u, &phi, &f).unwrap();
        assert!(rep.check("first_bound").unwrap().margin < 0.0);
    }

    #[test]
    fn regime_checks() {
        let g = Grid::new(3, 2.0, 9).unwrap();
        let u = ComplexField::zeros(g);
        let pos = NonlinearitySpec::power(bump(g, 1.0), 3.0, 3.0).unwrap();
        assert!(defocusing_inequalities(&u, &u, &pos).is_err());
        let wide = NonlinearitySpec::power(RealField::from_fn(g, |_| -1.0), 3.0, 3.0).unwrap();
        assert!(defocusing_inequalities(&u, &u, &wide).is_err());
    }

    #[test]
    fn power_fit_picks_the_smallest_covering_exponent() {
        let samples: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&a| (a, 3.0 * a.powi(3)))
            .collect();
        let fit = fit_power_bound(&samples, 3.0, 5).unwrap();
        assert!((fit.observed_exponent - 3.0).abs() < 1e-12);
        assert_eq!(fit.m, 2);
        assert_eq!(fit.exponent, 4.0);
        assert!(fit.covers_all);
        for &(a, b) in &samples {
            assert!(b <= fit.c * (1.0 + a.powf(fit.exponent)));
        }
        let capped = fit_power_bound(&samples, 2.5, 1).unwrap();
        assert!(!capped.covers_all);
    }
}
