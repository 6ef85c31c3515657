//! Binary field files and CSV slices.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic    8 bytes  "NLHFIELD"
//! version  u32      1
//! dim      u32
//! M        u64      points per axis
//! L        f64      half-width
//! k        f64      wavenumber
//! values   M^dim × (re f64, im f64), row-major, last axis fastest
//! ```

use std::fmt::Write as _;

use helmscat_core::fields::{ComplexField, Grid};
use num_complex::Complex64;
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"NLHFIELD";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 8 + 8;

#[derive(Debug, Error, PartialEq)]
pub enum FieldFileError {
    #[error("not a field file (bad magic)")]
    BadMagic,
    #[error("unsupported field file version {0}")]
    Version(u32),
    #[error("truncated field file: expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid header: {0}")]
    Header(String),
}

pub fn encode(u: &ComplexField, k: f64) -> Vec<u8> {
    let g = u.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * u.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(g.points_per_axis() as u64).to_le_bytes());
    out.extend_from_slice(&g.half_width().to_le_bytes());
    out.extend_from_slice(&k.to_le_bytes());
    for v in u.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8-byte slice"))
}

/// Returns the field and the stored wavenumber.
pub fn decode(bytes: &[u8]) -> Result<(ComplexField, f64), FieldFileError> {
    if bytes.len() < HEADER_LEN {
        return Err(FieldFileError::Length {
            expected: HEADER_LEN,
            got: bytes.len(),
        });
    }
    if &bytes[..8] != MAGIC {
        return Err(FieldFileError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4-byte slice"));
    if version != VERSION {
        return Err(FieldFileError::Version(version));
    }
    let dim = u32::from_le_bytes(bytes[12..16].try_into().expect("4-byte slice")) as usize;
    let m = u64::from_le_bytes(bytes[16..24].try_into().expect("8-byte slice")) as usize;
    let l = f64_at(bytes, 24);
    let k = f64_at(bytes, 32);
    let grid = Grid::new(dim, l, m).map_err(|e| FieldFileError::Header(e.to_string()))?;
    let expected = HEADER_LEN + 16 * grid.len();
    if bytes.len() != expected {
        return Err(FieldFileError::Length {
            expected,
            got: bytes.len(),
        });
    }
    let values = (0..grid.len())
        .map(|i| {
            let at = HEADER_LEN + 16 * i;
            Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8))
        })
        .collect();
    let field = ComplexField::from_values(grid, values)
        .map_err(|e| FieldFileError::Header(e.to_string()))?;
    Ok((field, k))
}

/// Points with `index` along `axis`, as `(coords, value)` in row-major order.
pub fn slice(
    u: &ComplexField,
    axis: usize,
    index: Option<usize>,
) -> Result<Vec<([f64; 3], Complex64)>, String> {
    let g = u.grid();
    if axis >= g.dim() {
        return Err(format!(
            "axis {axis} out of range for a {}-dimensional field",
            g.dim()
        ));
    }
    let m = g.points_per_axis();
    let index = index.unwrap_or(m / 2);
    if index >= m {
        return Err(format!("slice index {index} out of range (M = {m})"));
    }
    Ok((0..g.len())
        .filter(|&i| g.multi_index(i)[axis] == index)
        .map(|i| (g.coords(i), u.values()[i]))
        .collect())
}

/// CSV with one row per slice point: coordinates then `re,im,abs`.
pub fn slice_csv(u: &ComplexField, axis: usize, index: Option<usize>) -> Result<String, String> {
    let dim = u.grid().dim();
    let names = ["x", "y", "z"];
    let mut s = String::new();
    for n in &names[..dim] {
        s.push_str(n);
        s.push(',');
    }
    s.push_str("re,im,abs\n");
    for (x, v) in slice(u, axis, index)? {
        for c in &x[..dim] {
            let _ = write!(s, "{},", crate::output::num(*c));
        }
        let _ = writeln!(
            s,
            "{},{},{}",
            crate::output::num(v.re),
            crate::output::num(v.im),
            crate::output::num(v.norm())
        );
    }
    Ok(s)
}

/// `Re ψ(t, ·) = Re(e^{−ikt} u)` on a slice.
pub fn time_frame_csv(
    u: &ComplexField,
    k: f64,
    t: f64,
    axis: usize,
    index: Option<usize>,
) -> Result<String, String> {
    let dim = u.grid().dim();
    let names = ["x", "y", "z"];
    let phase = Complex64::from_polar(1.0, -k * t);
    let mut s = String::new();
    for n in &names[..dim] {
        s.push_str(n);
        s.push(',');
    }
    s.push_str("re_psi\n");
    for (x, v) in slice(u, axis, index)? {
        for c in &x[..dim] {
            let _ = write!(s, "{},", crate::output::num(*c));
        }
        let _ = writeln!(s, "{}", crate::output::num((v * phase).re));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexField {
        let g = Grid::new(3, 1.5, 5).unwrap();
        ComplexField::from_fn(g, |x| Complex64::new(x[0] + 2.0 * x[1], x[2] - 0.25))
    }

    #[test]
    fn round_trip_is_exact() {
        let u = sample();
        let bytes = encode(&u, 1.25);
        let (v, k) = decode(&bytes).unwrap();
        assert_eq!(k, 1.25);
        assert_eq!(v, u);
        assert_eq!(bytes.len(), HEADER_LEN + 16 * 125);
    }

    #[test]
    fn rejects_corruption() {
        let u = sample();
        let mut bytes = encode(&u, 1.0);
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(FieldFileError::Length { .. })
        ));
        bytes[0] = b'X';
        assert_eq!(decode(&bytes), Err(FieldFileError::BadMagic));
        let mut bytes = encode(&u, 1.0);
        bytes[8] = 9;
        assert_eq!(decode(&bytes), Err(FieldFileError::Version(9)));
    }

    #[test]
    fn quarter_period_frame_is_imaginary_part() {
        let u = sample();
        let k = 2.0;
        let t = std::f64::consts::PI / (2.0 * k);
        let frame = time_frame_csv(&u, k, t, 2, None).unwrap();
        let im: Vec<f64> = slice(&u, 2, None)
            .unwrap()
            .iter()
            .map(|(_, v)| v.im)
            .collect();
        for (line, want) in frame.lines().skip(1).zip(im) {
            let got: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!((got - want).abs() < 1e-11 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn full_period_matches_time_zero() {
        let u = sample();
        let k = 1.0;
        let a = time_frame_csv(&u, k, 0.0, 0, Some(1)).unwrap();
        let b = time_frame_csv(&u, k, 2.0 * std::f64::consts::PI / k, 0, Some(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn slice_bounds() {
        let u = sample();
        assert!(slice(&u, 3, None).is_err());
        assert!(slice(&u, 0, Some(5)).is_err());
        assert_eq!(slice(&u, 1, Some(0)).unwrap().len(), 25);
    }
}
