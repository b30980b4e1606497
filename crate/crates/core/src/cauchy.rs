//! Fourier coefficients `p_k(r)` of the Cauchy-type potential
//!
//! ```text
//! Pt[h](z) = -(1/pi) \iint h(xi) / (xi - z) dA(xi),    P[h] = Pt[h] - Pt[h](0)
//! p_k(r) =  2 \int_0^r (r/rho)^k h_{k+1}(rho) d rho     (k < 0)
//! p_k(r) = -2 \int_r^S (r/rho)^k h_{k+1}(rho) d rho     (k >= 0)
//! ```
//!
//! `d/dzbar Pt[h] = h` and `d/dz Pt[h] = T[h]`.

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{profile_range, synthesize, CoefficientTable, GridFunction, Profiles};
use crate::radial::{RadialCells, RadialModel};

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyCoefficients {
    pub table: CoefficientTable,
    /// Value of the potential at the origin; 0 once normalized.
    pub origin_value: Complex64,
}

impl CauchyCoefficients {
    /// `P = Pt - Pt(0)`: only the `k = 0` column moves. Idempotent.
    pub fn normalize_at_origin(&self) -> Self {
        let mut table = self.table.clone();
        let v = self.origin_value;
        if v != Complex64::default() {
            let mut column = table.column(0);
            for p in column.iter_mut() {
                *p -= v;
            }
            // The origin is pinned to zero exactly, not to the rounded difference.
            column[0] = Complex64::default();
            table.set_column(0, &column);
        }
        Self {
            table,
            origin_value: Complex64::default(),
        }
    }

    /// Synthesizes the series at the grid nodes.
    pub fn evaluate_potential(&self) -> GridFunction {
        synthesize(&self.table)
    }
}

/// Recursive sweeps, one per harmonic, `O(NM)` after analysis.
pub fn cauchy_coefficients(h: &CoefficientTable, model: RadialModel) -> Result<CauchyCoefficients> {
    h.check_support()?;
    let grid = h.grid().clone();
    let cells = RadialCells::new(&grid, model);
    let input = Profiles::of(h);
    let mut out = Profiles::zeros(&grid);
    cauchy_sweeps(&cells, input.data(), out.data_mut(), grid.n_angles());
    let table = out.into_table(grid);
    let origin_value = table.get(0, 0);
    Ok(CauchyCoefficients { table, origin_value })
}

/// Per-radius integration from scratch, `O(N^2 M)`. Reference for the sweep.
pub fn cauchy_coefficients_direct(h: &CoefficientTable, model: RadialModel) -> Result<CauchyCoefficients> {
    h.check_support()?;
    let grid = h.grid().clone();
    let cells = RadialCells::new(&grid, model);
    let mut table = CoefficientTable::zeros(grid.clone());
    for k in h.k_min()..h.k_end() {
        let profile = h.column(k + 1);
        let mut column = vec![Complex64::default(); grid.n_radii()];
        for (i, &r) in grid.radii().iter().enumerate() {
            if i == 0 && k != 0 {
                continue;
            }
            let mut acc = Complex64::default();
            if k < 0 {
                for c in 0..i {
                    acc += cells.cell_integral(&profile, c, k, 0, r);
                }
                acc *= 2.0;
            } else {
                for c in i..cells.n_cells() {
                    acc += cells.cell_integral(&profile, c, k, 0, r);
                }
                acc *= -2.0;
            }
            column[i] = acc;
        }
        table.set_column(k, &column);
    }
    let origin_value = table.get(0, 0);
    Ok(CauchyCoefficients { table, origin_value })
}

/// Sweeps every harmonic of a harmonic-major input (see `Profiles`) into `out`.
pub(crate) fn cauchy_sweeps(cells: &RadialCells<'_>, input: &[Complex64], out: &mut [Complex64], m: usize) {
    let n = cells.radii.len();
    let half = (m / 2) as i64;
    for k in -half..half {
        let column = &mut out[profile_range(k, n, m).unwrap()];
        match profile_range(k + 1, n, m) {
            Some(r) => sweep_cauchy(cells, &input[r], k, column),
            None => column.fill(Complex64::default()),
        }
    }
}

fn sweep_cauchy(cells: &RadialCells<'_>, profile: &[Complex64], k: i64, column: &mut [Complex64]) {
    let radii = cells.radii;
    let n = radii.len();
    let zero = Complex64::default();
    if profile.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
        column.fill(zero);
        return;
    }
    if k < 0 {
        column[0] = zero;
        for i in 1..n {
            let (step, ratio) = cells.outward_step(profile, i - 1, k, 0);
            column[i] = column[i - 1] * ratio + step * 2.0;
        }
    } else {
        column[n - 1] = zero;
        for i in (0..n - 1).rev() {
            let (step, ratio) = cells.inward_step(profile, i, k, 0);
            column[i] = column[i + 1] * ratio - step * 2.0;
        }
        if k != 0 {
            column[0] = zero;
        }
    }
}
