//! Wirtinger derivatives on angular Fourier coefficients.
//!
//! For `g = sum_k g_k(r) e^{ik theta}`:
//!
//! ```text
//! (dg/dz)_{k-1}    = (g_k' + k g_k / r) / 2
//! (dg/dzbar)_{k+1} = (g_k' - k g_k / r) / 2
//! ```
//!
//! `g_k'` comes from a finite-difference stencil along the radii. At `r = 0`
//! only harmonic 0 of a derivative can be nonzero; it is `g_1'(0)` for `d/dz`
//! and `g_{-1}'(0)` for `d/dzbar`, since `g_{+-1}(r) / r -> g_{+-1}'(0)`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{analyze, profile_range, synthesize, CoefficientTable, GridFunction, Profiles};

/// Tolerance on the moment conditions of custom stencils.
const MOMENT_TOL: f64 = 1e-12;

/// Radial derivative approximation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceStencil {
    /// Forward difference `(g_{i+1} - g_i) / (r_{i+1} - r_i)`; backward at the last radius.
    #[default]
    #[serde(rename = "right2")]
    RightTwoPoint,
    /// Three-point formula on the non-uniform radii, one-sided second order at the ends.
    Central,
    /// `g'(r_i) ~ (1/h) sum_j w_j g_{i + o_j}` with `h` the mean spacing under the stencil.
    /// Where the offsets leave the grid the central formula is used instead.
    Custom { offsets: Vec<i64>, weights: Vec<f64> },
}

impl DifferenceStencil {
    pub fn custom(offsets: Vec<i64>, weights: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() || offsets.len() != weights.len() {
            return Err(Error::InvalidStencil(format!(
                "{} offsets for {} weights",
                offsets.len(),
                weights.len()
            )));
        }
        let mut sorted = offsets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != offsets.len() {
            return Err(Error::InvalidStencil("repeated offset".into()));
        }
        let sum: f64 = weights.iter().sum();
        let first: f64 = offsets.iter().zip(&weights).map(|(&o, &w)| o as f64 * w).sum();
        if sum.abs() > MOMENT_TOL {
            return Err(Error::InvalidStencil(format!("weights sum to {sum}, not 0")));
        }
        if (first - 1.0).abs() > MOMENT_TOL {
            return Err(Error::InvalidStencil(format!("first moment is {first}, not 1")));
        }
        Ok(Self::Custom { offsets, weights })
    }

    /// Accuracy order on uniform spacing.
    pub fn order(&self) -> usize {
        match self {
            Self::RightTwoPoint => 1,
            Self::Central => 2,
            Self::Custom { offsets, weights } => {
                // Highest j with sum w o^j / j! matching the Taylor series of a derivative.
                let mut order = 0;
                for j in 2..offsets.len() + 2 {
                    let moment: f64 = offsets
                        .iter()
                        .zip(weights)
                        .map(|(&o, &w)| w * (o as f64).powi(j as i32))
                        .sum();
                    if moment.abs() > MOMENT_TOL {
                        break;
                    }
                    order = j - 1;
                }
                order + 1
            }
        }
    }

    /// `g'(r_i)` from samples of one radial profile.
    pub fn derivative_at(&self, radii: &[f64], g: &[Complex64], i: usize) -> Complex64 {
        let n = radii.len();
        match self {
            Self::RightTwoPoint => {
                let (a, b) = if i + 1 < n { (i, i + 1) } else { (i - 1, i) };
                (g[b] - g[a]) / (radii[b] - radii[a])
            }
            Self::Central => central(radii, g, i),
            Self::Custom { offsets, weights } => {
                let lo = *offsets.iter().min().expect("validated non-empty");
                let hi = *offsets.iter().max().expect("validated non-empty");
                let (first, last) = (i as i64 + lo, i as i64 + hi);
                if first < 0 || last >= n as i64 || hi == lo {
                    return central(radii, g, i);
                }
                let h = (radii[last as usize] - radii[first as usize]) / (hi - lo) as f64;
                let acc: Complex64 = offsets
                    .iter()
                    .zip(weights)
                    .map(|(&o, &w)| g[(i as i64 + o) as usize] * w)
                    .sum();
                acc / h
            }
        }
    }
}

impl FromStr for DifferenceStencil {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "right2" => Ok(Self::RightTwoPoint),
            "central" => Ok(Self::Central),
            other => Err(format!("unknown stencil '{other}' (expected right2|central)")),
        }
    }
}

fn central(radii: &[f64], g: &[Complex64], i: usize) -> Complex64 {
    let n = radii.len();
    if n == 2 {
        return (g[1] - g[0]) / (radii[1] - radii[0]);
    }
    if i == 0 {
        let (h1, h2) = (radii[1] - radii[0], radii[2] - radii[1]);
        return g[0] * (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) + g[1] * ((h1 + h2) / (h1 * h2))
            - g[2] * (h1 / (h2 * (h1 + h2)));
    }
    if i == n - 1 {
        let (h1, h2) = (radii[n - 1] - radii[n - 2], radii[n - 2] - radii[n - 3]);
        return g[n - 1] * ((2.0 * h1 + h2) / (h1 * (h1 + h2))) - g[n - 2] * ((h1 + h2) / (h1 * h2))
            + g[n - 3] * (h1 / (h2 * (h1 + h2)));
    }
    let (h1, h2) = (radii[i] - radii[i - 1], radii[i + 1] - radii[i]);
    g[i - 1] * (-h2 / (h1 * (h1 + h2))) + g[i] * ((h2 - h1) / (h1 * h2)) + g[i + 1] * (h1 / (h2 * (h1 + h2)))
}

/// Shared body of both derivatives: `sign = +1` for `d/dz`, `-1` for `d/dzbar`.
fn wirtinger(g: &CoefficientTable, stencil: &DifferenceStencil, sign: i64) -> CoefficientTable {
    let grid = g.grid().clone();
    let input = Profiles::of(g);
    let mut out = Profiles::zeros(&grid);
    wirtinger_sweeps(grid.radii(), stencil, sign, input.data(), out.data_mut(), grid.n_angles());
    out.into_table(grid)
}

/// Radial part of the Wirtinger derivatives on harmonic-major buffers (see
/// `Profiles`): harmonic `k` of the input feeds harmonic `k - sign` of `out`.
pub(crate) fn wirtinger_sweeps(
    radii: &[f64],
    stencil: &DifferenceStencil,
    sign: i64,
    input: &[Complex64],
    out: &mut [Complex64],
    m: usize,
) {
    let n = radii.len();
    out.fill(Complex64::default());
    let half = (m / 2) as i64;
    for k in -half..half {
        let target = k - sign;
        let Some(dst) = profile_range(target, n, m) else {
            continue;
        };
        let column = &input[profile_range(k, n, m).unwrap()];
        if column.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        let kf = (sign * k) as f64;
        let derived = &mut out[dst];
        for i in 1..n {
            let d = stencil.derivative_at(radii, column, i);
            derived[i] = (d + column[i] * (kf / radii[i])) * 0.5;
        }
        if target == 0 {
            derived[0] = stencil.derivative_at(radii, column, 0);
        }
    }
}

pub fn dz_coefficients(g: &CoefficientTable, stencil: &DifferenceStencil) -> CoefficientTable {
    wirtinger(g, stencil, 1)
}

/// Coefficients of `dg/dzbar`; input harmonic `k` lands on `k + 1`.
pub fn dzbar_coefficients(g: &CoefficientTable, stencil: &DifferenceStencil) -> CoefficientTable {
    wirtinger(g, stencil, -1)
}

/// `df/dz` sampled on the grid.
pub fn dz(f: &GridFunction, stencil: &DifferenceStencil) -> GridFunction {
    synthesize(&dz_coefficients(&analyze(f), stencil))
}

/// `df/dzbar` sampled on the grid.
pub fn dzbar(f: &GridFunction, stencil: &DifferenceStencil) -> GridFunction {
    synthesize(&dzbar_coefficients(&analyze(f), stencil))
}
