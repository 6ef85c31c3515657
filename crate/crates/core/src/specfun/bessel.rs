use super::{BesselOrder, SpecfunError};
use crate::prelude::*;

const EPS: f64 = f64::EPSILON;
const FPMIN: f64 = f64::MIN_POSITIVE / EPS;
const MAXIT: usize = 100_000;
/// Below this argument Temme's series is used, above it Steed's CF2.
const SERIES_LIMIT: f64 = 2.0;

/// Taylor coefficients `c_1, c_2, ...` of `1/Γ(z) = Σ c_k z^k`.
const RGAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Values of `J_ν, Y_ν` and their derivatives at one argument.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JyValues {
    pub j: f64,
    pub y: f64,
    #[allow(dead_code)]
    pub jp: f64,
    #[allow(dead_code)]
    pub yp: f64,
}

pub fn bessel_j(nu: BesselOrder, t: f64) -> Result<f64, SpecfunError> {
    check_argument(t)?;
    Ok(jy_unchecked(nu.value(), t).0)
}

pub fn bessel_y(nu: BesselOrder, t: f64) -> Result<f64, SpecfunError> {
    check_argument(t)?;
    Ok(jy_unchecked(nu.value(), t).1)
}

/// `H⁽¹⁾_ν(t) = J_ν(t) + i Y_ν(t)`.
pub fn hankel1(nu: BesselOrder, t: f64) -> Result<Complex64, SpecfunError> {
    check_argument(t)?;
    let (j, y) = jy_unchecked(nu.value(), t);
    Ok(Complex64::new(j, y))
}

fn check_argument(t: f64) -> Result<(), SpecfunError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(SpecfunError::NonPositiveArgument(t))
    }
}

/// Argument above which the Hankel expansion is summed instead of the series/CF
/// route. Past this point the expansion's smallest term is below `1e-17`.
pub(crate) fn asymptotic_threshold(nu: f64) -> f64 {
    25.0 + nu * nu
}

/// `(J_ν(t), Y_ν(t))` for `ν ≥ 0`, `t > 0` without argument checks.
pub(crate) fn jy_unchecked(nu: f64, t: f64) -> (f64, f64) {
    if nu == 0.5 {
        let amp = (2.0 / (PI * t)).sqrt();
        let (s, c) = t.sin_cos();
        return (amp * s, -amp * c);
    }
    if t >= asymptotic_threshold(nu) {
        jy_asymptotic(nu, t)
    } else {
        let v = jy_series_cf(nu, t);
        (v.j, v.y)
    }
}

/// Hankel's large-argument expansion, summed until the terms stop shrinking.
pub(crate) fn jy_asymptotic(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..400usize {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        let mag = term.abs();
        if mag > prev && kf > nu {
            break;
        }
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag <= 1e-17 * p.abs().max(q.abs()) {
            break;
        }
        prev = mag;
    }
    // cos/sin of χ = x − (ν/2 + 1/4)π without forming the rounded difference
    let shift = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (ss, cs) = shift.sin_cos();
    let cos_chi = cx * cs + sx * ss;
    let sin_chi = sx * cs - cx * ss;
    let amp = (2.0 / (PI * x)).sqrt();
    (
        amp * (p * cos_chi - q * sin_chi),
        amp * (p * sin_chi + q * cos_chi),
    )
}

/// `gam1 = (1/Γ(1−μ) − 1/Γ(1+μ))/(2μ)`, `gam2 = (1/Γ(1−μ) + 1/Γ(1+μ))/2`,
/// `1/Γ(1+μ)`, `1/Γ(1−μ)` for `|μ| ≤ 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    for pair in RGAMMA.chunks(2).rev() {
        gam2 = gam2 * mu2 + pair[0];
        gam1 = gam1 * mu2 + pair.get(1).copied().unwrap_or(0.0);
    }
    let gam1 = -gam1;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// Temme's series for `t < 2`, Steed's complex continued fraction otherwise;
/// `J_ν` is recovered from the CF1 ratio and the Wronskian, `Y_ν` by upward
/// recurrence from the reduced order `μ = ν − n_l`.
pub(crate) fn jy_series_cf(nu: f64, x: f64) -> JyValues {
    let nl = if x < SERIES_LIMIT {
        (nu + 0.5) as usize
    } else {
        let shifted = nu - x + 1.5;
        if shifted > 0.0 {
            shifted as usize
        } else {
            0
        }
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1 for J'_ν/J_ν by modified Lentz.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < SERIES_LIMIT {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS {
            1.0
        } else {
            pimu / pimu.sin()
        };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                break;
            }
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                break;
            }
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = if rjl < 0.0 { -mag } else { mag };
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let j = rjl1 * scale;
    let jp = rjp1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    JyValues {
        j,
        y: rymu,
        jp,
        yp: nu * xi * rymu - ry1,
    }
}
