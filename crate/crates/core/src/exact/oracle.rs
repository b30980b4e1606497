//! Brute-force principal value of `-(1/pi) \iint_{B(0,R)} f(xi) / (xi - z)^2 dA`.
//!
//! Inside the disk the integral is taken in polar coordinates about `z` with
//! `B(z, eps)` removed, in the variable `t = ln rho`, for each `eps` of a
//! decreasing list; the truncated values differ from the principal value by a
//! series in `eps^2` and are extrapolated to `eps = 0`. Outside the disk the
//! kernel is bounded and a plain polar integral about the origin is used.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const OUTER_TOL: f64 = 1e-11;
const INNER_TOL: f64 = 1e-13;
const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: Complex64,
    /// Extrapolation difference plus propagated quadrature error.
    pub error: f64,
}

/// One Gauss-Kronrod 7/15 panel: (Kronrod value, |Kronrod - Gauss|).
fn gk15(f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = Complex64::default();
    let mut gauss = Complex64::default();
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let pair = if x == 0.0 { f(c) } else { f(c - h * x) + f(c + h * x) };
        kron += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Globally adaptive quadrature: bisects the worst panel until the summed
/// error estimate falls below `tol`.
fn adaptive(f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64, panels: usize, tol: f64) -> Result<(Complex64, f64)> {
    let width = (b - a) / panels as f64;
    let mut pieces: Vec<(f64, f64, Complex64, f64)> = (0..panels)
        .map(|p| {
            let (lo, hi) = (a + p as f64 * width, if p + 1 == panels { b } else { a + (p + 1) as f64 * width });
            let (v, e) = gk15(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            let value = pieces.iter().map(|p| p.2).sum();
            return Ok((value, total_err));
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "error estimate {total_err:e} above {tol:e} after {} panels on [{a}, {b}]",
                pieces.len()
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// `eps_0 = min(R - |z|, R) / 2` halved four times.
pub fn default_eps_list(z: Complex64, radius: f64) -> Vec<f64> {
    let eps0 = 0.5 * (radius - z.norm()).min(radius);
    (0..5).map(|j| eps0 / f64::powi(2.0, j)).collect()
}

/// Integral over `B(0,R)` minus `B(z,eps)` for `|z| + eps < R`, with its error estimate.
fn truncated_interior(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, radius: f64, eps: f64) -> Result<(Complex64, f64)> {
    let gap = radius * radius - z.norm_sqr();
    let mut inner_err = 0.0f64;
    let mut failure = None;
    let mut outer = |phi: f64| {
        let dir = Complex64::from_polar(1.0, phi);
        let b = (z.conj() * dir).re;
        let rho_max = -b + (b * b + gap).sqrt();
        let mut integrand = |t: f64| f(z + dir * t.exp());
        match adaptive(&mut integrand, eps.ln(), rho_max.ln(), 2, INNER_TOL) {
            Ok((v, e)) => {
                inner_err = inner_err.max(e);
                v * dir.conj() * dir.conj()
            }
            Err(err) => {
                failure.get_or_insert(err);
                Complex64::default()
            }
        }
    };
    let (v, e) = adaptive(&mut outer, 0.0, 2.0 * PI, 8, OUTER_TOL)?;
    if let Some(err) = failure {
        return Err(err);
    }
    Ok((-v / PI, (e + 2.0 * PI * inner_err) / PI))
}

fn exterior(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, radius: f64) -> Result<(Complex64, f64)> {
    let mut inner_err = 0.0f64;
    let mut failure = None;
    let mut outer = |rho: f64| {
        let mut integrand = |alpha: f64| {
            let xi = Complex64::from_polar(rho, alpha);
            f(xi) / ((xi - z) * (xi - z))
        };
        match adaptive(&mut integrand, 0.0, 2.0 * PI, 8, INNER_TOL) {
            Ok((v, e)) => {
                inner_err = inner_err.max(e);
                v * rho
            }
            Err(err) => {
                failure.get_or_insert(err);
                Complex64::default()
            }
        }
    };
    let (v, e) = adaptive(&mut outer, 0.0, radius, 4, OUTER_TOL)?;
    if let Some(err) = failure {
        return Err(err);
    }
    Ok((-v / PI, (e + radius * radius * inner_err) / PI))
}

/// Principal value of the transform of `f chi_{B(0,R)}` at `z`.
///
/// For `|z| < R` every `eps` must satisfy `|z| + eps < R` and the list must be
/// strictly decreasing; at least two values are needed for extrapolation.
/// Points outside the closed disk ignore `eps_list`.
pub fn singular_quadrature_oracle(
    f: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
    radius: f64,
    eps_list: &[f64],
) -> Result<OracleEstimate> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("support radius must be positive, got {radius}")));
    }
    let r = z.norm();
    if (r - radius).abs() <= 1e-9 * radius {
        return Err(Error::Domain(format!("z = {z} lies on the support circle")));
    }
    if r > radius {
        let (value, error) = exterior(f, z, radius)?;
        return Ok(OracleEstimate {
            value,
            error: error + 1e-15 * (1.0 + value.norm()),
        });
    }
    if eps_list.len() < 2 {
        return Err(Error::Domain("need at least two excision radii".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) || eps_list.iter().any(|&e| !(e > 0.0 && r + e < radius)) {
        return Err(Error::Domain(format!(
            "excision radii must decrease and keep B(z, eps) inside the disk: {eps_list:?}"
        )));
    }

    let mut values = Vec::with_capacity(eps_list.len());
    let mut quad_err = 0.0f64;
    for &eps in eps_list {
        let (v, e) = truncated_interior(f, z, radius, eps)?;
        values.push(v);
        quad_err = quad_err.max(e);
    }
    // Neville extrapolation to x = eps^2 = 0; the last diagonal entry and its
    // predecessor give the truncation estimate.
    let xs: Vec<f64> = eps_list.iter().map(|e| e * e).collect();
    let n = xs.len();
    let mut table = values.clone();
    let mut previous = table[n - 1];
    for m in 1..n {
        previous = table[n - 1];
        for j in (m..n).rev() {
            table[j] = (table[j - 1] * xs[j] - table[j] * xs[j - m]) / (xs[j] - xs[j - m]);
        }
    }
    let value = table[n - 1];
    // Sum of |Lagrange weights| at 0 bounds how far quadrature noise is amplified.
    let amplification: f64 = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&m| m != j)
                .map(|m| (xs[m] / (xs[m] - xs[j])).abs())
                .product::<f64>()
        })
        .sum();
    let error = (value - previous).norm() + amplification * quad_err + 1e-15 * (1.0 + value.norm());
    Ok(OracleEstimate { value, error })
}
