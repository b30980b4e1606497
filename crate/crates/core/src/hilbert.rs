//! Fourier coefficients `c_k(r)` of the planar Hilbert (Beurling) transform
//!
//! ```text
//! T[h](z) = -(1/pi) p.v. \iint h(xi) / (xi - z)^2 dA(xi)
//! ```
//!
//! for `h` supported in the closed disk of the grid's support radius. With
//! `S` the outer edge of the radial model,
//!
//! ```text
//! c_k(r) = A_k \int_0^{min(r,S)} r^k rho^{-k-1} h_{k+2} + B_k \int_{min(r,S)}^S r^k rho^{-k-1} h_{k+2} + h_{k+2}(r)
//! c_0(0) = -2 \int_0^S h_2(rho)/rho,   c_k(0) = 0 for k != 0
//! ```
//!
//! which covers the interior, boundary and exterior radii in one expression.
//! Two routes are provided: [`hilbert_coefficients_direct`] integrates from
//! scratch at every radius (`O(N^2 M)`), [`hilbert_coefficients_recursive`]
//! sweeps each harmonic once across the radii (`O(N M)`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{analyze, profile_range, synthesize, CoefficientTable, GridFunction, Profiles};
use crate::radial::{RadialCells, RadialModel};

/// `|h_2(0)|` above this fraction of the table's sup norm is rejected.
const ORIGIN_HARMONIC_TOL: f64 = 1e-10;

/// Kernel constants of the coefficient formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertKernelConstants;

impl HilbertKernelConstants {
    /// `2(k+1)` for `k < 0`, else 0.
    pub fn a(k: i64) -> i64 {
        if k < 0 {
            2 * (k + 1)
        } else {
            0
        }
    }

    /// `-2(k+1)` for `k >= 0`, else 0.
    pub fn b(k: i64) -> i64 {
        if k >= 0 {
            -2 * (k + 1)
        } else {
            0
        }
    }
}

/// Validates support and the origin harmonic. `h_2(0)` is then read as
/// exactly zero, see [`profile`].
pub(crate) fn admissible_input(h: &CoefficientTable) -> Result<()> {
    h.check_support()?;
    check_origin_harmonic(h.get(0, 2), || h.sup_norm())
}

pub(crate) fn check_origin_harmonic(origin: Complex64, sup_norm: impl FnOnce() -> f64) -> Result<()> {
    // The scale is at least 1, so the sup norm is only needed past this bound.
    if origin.norm() > ORIGIN_HARMONIC_TOL && origin.norm() > ORIGIN_HARMONIC_TOL * sup_norm() {
        return Err(Error::OriginHarmonic { value: origin.norm() });
    }
    Ok(())
}

/// Radial profile `h_{k+2}` feeding output harmonic `k`.
fn profile(h: &CoefficientTable, k: i64) -> Vec<Complex64> {
    let mut p = h.column(k + 2);
    if k == 0 {
        p[0] = Complex64::new(0.0, 0.0);
    }
    p
}

/// Closed-form evaluation at every radius, independent of neighbouring radii.
pub fn hilbert_coefficients_direct(h: &CoefficientTable, model: RadialModel) -> Result<CoefficientTable> {
    admissible_input(h)?;
    let grid = h.grid().clone();
    let cells = RadialCells::new(&grid, model);
    let n = grid.n_radii();
    let mut out = CoefficientTable::zeros(grid.clone());

    for k in h.k_min()..h.k_end() {
        let profile = profile(h, k);
        let (a_k, b_k) = (HilbertKernelConstants::a(k) as f64, HilbertKernelConstants::b(k) as f64);
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        if k == 0 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..cells.n_cells() {
                acc += cells.cell_integral(&profile, c, 0, -1, 0.0);
            }
            column[0] = -2.0 * acc;
        }
        for (i, &r) in grid.radii().iter().enumerate().skip(1) {
            let mut acc = Complex64::new(0.0, 0.0);
            if k < 0 {
                for c in 0..i {
                    acc += cells.cell_integral(&profile, c, k, -1, r);
                }
                acc *= a_k;
            } else {
                for c in i..cells.n_cells() {
                    acc += cells.cell_integral(&profile, c, k, -1, r);
                }
                acc *= b_k;
            }
            column[i] = acc + cells.node_value(&profile, i);
        }
        out.set_column(k, &column);
    }
    Ok(out)
}

/// Same contract as [`hilbert_coefficients_direct`], computed with one
/// outward sweep per negative harmonic and one inward sweep per
/// non-negative harmonic.
pub fn hilbert_coefficients_recursive(h: &CoefficientTable, model: RadialModel) -> Result<CoefficientTable> {
    admissible_input(h)?;
    let grid = h.grid().clone();
    let cells = RadialCells::new(&grid, model);
    let mut input = Profiles::of(h);
    let mut out = Profiles::zeros(&grid);
    hilbert_sweeps(&cells, input.data_mut(), out.data_mut(), grid.n_angles());
    Ok(out.into_table(grid))
}

/// Sweeps every harmonic of a harmonic-major input (see `Profiles`) into
/// `out`. The origin sample of `h_2` is zeroed in place first.
pub(crate) fn hilbert_sweeps(cells: &RadialCells<'_>, input: &mut [Complex64], out: &mut [Complex64], m: usize) {
    let n = cells.radii.len();
    if let Some(r) = profile_range(2, n, m) {
        input[r.start] = Complex64::new(0.0, 0.0);
    }
    let half = (m / 2) as i64;
    for k in -half..half {
        let column = &mut out[profile_range(k, n, m).unwrap()];
        match profile_range(k + 2, n, m) {
            Some(r) => sweep_hilbert(cells, &input[r], k, column),
            None => column.fill(Complex64::new(0.0, 0.0)),
        }
    }
}

/// One radial sweep of harmonic `k`, writing `c_k(r_i)` for every `i`.
///
/// Each step uses `c(r) - h(r) = (r/r')^k (c(r') - h(r')) + kernel * \int_{r'}^{r}`,
/// with the integral expressed in powers of `r/rho` so nothing overflows.
fn sweep_hilbert(cells: &RadialCells<'_>, profile: &[Complex64], k: i64, column: &mut [Complex64]) {
    let radii = cells.radii;
    let n = radii.len();
    let zero = Complex64::new(0.0, 0.0);
    if profile.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
        column.fill(zero);
        return;
    }
    // `d` carries c - h between radii.
    if k < 0 {
        let a_k = HilbertKernelConstants::a(k) as f64;
        column[0] = zero;
        let mut d = zero;
        for i in 1..n {
            let (step, ratio) = cells.outward_step(profile, i - 1, k, -1);
            d = d * ratio + step * a_k;
            column[i] = d + cells.node_value(profile, i);
        }
    } else {
        let b_k = HilbertKernelConstants::b(k) as f64;
        // No part of the support lies beyond the outermost radius.
        let mut d = zero;
        column[n - 1] = cells.node_value(profile, n - 1);
        for i in (0..n - 1).rev() {
            let (step, ratio) = cells.inward_step(profile, i, k, -1);
            d = d * ratio + step * b_k;
            column[i] = d + cells.node_value(profile, i);
        }
        if k != 0 {
            column[0] = zero;
        }
    }
}

/// `T[h]` sampled on the whole grid: analyze, recursive coefficients, synthesize.
pub fn transform_scheme1(h: &GridFunction, model: RadialModel) -> Result<GridFunction> {
    // Rows past the support transform to exact zeros, so the coefficient
    // check inside catches support violations.
    let coeffs = hilbert_coefficients_recursive(&analyze(h), model)?;
    Ok(synthesize(&coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PolarGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_supported_table(grid: Arc<PolarGrid>, seed: u64) -> CoefficientTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = CoefficientTable::zeros(grid.clone());
        for i in 0..=grid.support_index() {
            for k in t.k_min()..t.k_end() {
                if i == 0 && k != 0 {
                    continue;
                }
                t.set(i, k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        t
    }

    #[test]
    fn kernel_constants() {
        for k in -10..10 {
            assert_eq!(HilbertKernelConstants::a(k) * HilbertKernelConstants::b(k), 0);
        }
        assert_eq!(HilbertKernelConstants::a(-1), 0);
        assert_eq!(HilbertKernelConstants::b(-1), 0);
        assert_eq!(HilbertKernelConstants::a(-3), -4);
        assert_eq!(HilbertKernelConstants::b(2), -6);
    }

    #[test]
    fn direct_and_recursive_agree() {
        for (model, outer) in [(RadialModel::Linear, 1.5), (RadialModel::Constant, 1.5), (RadialModel::Linear, 1.0), (RadialModel::Constant, 1.0)] {
            let grid = Arc::new(PolarGrid::build(25, 16, 1.0, outer).unwrap());
            let h = random_supported_table(grid, 5);
            let d = hilbert_coefficients_direct(&h, model).unwrap();
            let r = hilbert_coefficients_recursive(&h, model).unwrap();
            let diff = d.sup_distance(&r).unwrap();
            assert!(diff < 1e-12, "{model:?} outer={outer}: {diff}");
        }
    }

    #[test]
    fn origin_row_vanishes_except_k0() {
        let grid = Arc::new(PolarGrid::build(12, 16, 1.0, 2.0).unwrap());
        let h = random_supported_table(grid, 9);
        for model in [RadialModel::Linear, RadialModel::Constant] {
            let c = hilbert_coefficients_recursive(&h, model).unwrap();
            for k in c.k_min()..c.k_end() {
                if k != 0 {
                    assert_eq!(c.get(0, k), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn minus_one_row_copies_h1() {
        let grid = Arc::new(PolarGrid::build(12, 16, 1.0, 2.0).unwrap());
        let h = random_supported_table(grid.clone(), 13);
        let c = hilbert_coefficients_recursive(&h, RadialModel::Linear).unwrap();
        for i in 1..grid.support_index() {
            assert_eq!(c.get(i, -1), h.get(i, 1));
        }
    }

    #[test]
    fn two_radius_grid_reproduces_origin_formula() {
        let grid = Arc::new(PolarGrid::build(2, 8, 1.0, 1.0).unwrap());
        let mut h = CoefficientTable::zeros(grid.clone());
        h.set(1, 2, Complex64::new(0.7, -0.2));
        let c = hilbert_coefficients_recursive(&h, RadialModel::Linear).unwrap();
        // h_2 linear from 0 to 0.7-0.2i on [0, 1]: -2 \int h_2/rho = -2 h_2(1)
        assert!((c.get(0, 0) - Complex64::new(-1.4, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn disk_indicator() {
        // T[chi_{B(0,1)}] is 0 inside and -1/z^2 outside: only c_{-2} survives.
        let grid = Arc::new(PolarGrid::build(41, 16, 1.0, 2.0).unwrap());
        let mut h = CoefficientTable::zeros(grid.clone());
        for i in 0..=grid.support_index() {
            h.set(i, 0, Complex64::new(1.0, 0.0));
        }
        let c = hilbert_coefficients_recursive(&h, RadialModel::Linear).unwrap();
        for (i, &r) in grid.radii().iter().enumerate() {
            for k in c.k_min()..c.k_end() {
                let expected = if k == -2 && r > 1.0 { -1.0 / (r * r) } else { 0.0 };
                assert!((c.get(i, k).re - expected).abs() < 1e-14, "i={i} k={k}: {}", c.get(i, k));
            }
        }
    }

    #[test]
    fn exterior_decay_is_geometric() {
        let grid = Arc::new(PolarGrid::build(30, 16, 1.0, 3.0).unwrap());
        let h = random_supported_table(grid.clone(), 17);
        let c = hilbert_coefficients_recursive(&h, RadialModel::Linear).unwrap();
        let l = grid.support_index();
        let radii = grid.radii();
        for k in -8..0 {
            for i in l + 2..grid.n_radii() {
                let predicted = c.get(l + 1, k) * (radii[i] / radii[l + 1]).powi(k as i32);
                assert!((c.get(i, k) - predicted).norm() <= 1e-14 * (1.0 + predicted.norm()));
            }
        }
        for k in 0..8 {
            for i in l + 1..grid.n_radii() {
                assert_eq!(c.get(i, k), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let grid = Arc::new(PolarGrid::build(10, 8, 1.0, 1.0).unwrap());
        let zero = CoefficientTable::zeros(grid.clone());
        let c = hilbert_coefficients_direct(&zero, RadialModel::Constant).unwrap();
        assert_eq!(c.sup_norm(), 0.0);
        let t = transform_scheme1(&GridFunction::zeros(grid), RadialModel::Linear).unwrap();
        assert_eq!(t.sup_norm(), 0.0);
    }

    #[test]
    fn rejects_nonvanishing_origin_harmonic() {
        let grid = Arc::new(PolarGrid::build(10, 8, 1.0, 1.0).unwrap());
        let mut h = CoefficientTable::zeros(grid);
        h.set(0, 2, Complex64::new(0.1, 0.0));
        assert!(matches!(
            hilbert_coefficients_recursive(&h, RadialModel::Linear),
            Err(Error::OriginHarmonic { .. })
        ));
    }

    #[test]
    fn rejects_support_violation() {
        let grid = Arc::new(PolarGrid::build(10, 8, 1.0, 2.0).unwrap());
        let mut h = CoefficientTable::zeros(grid.clone());
        h.set(grid.support_index() + 1, 0, Complex64::new(1.0, 0.0));
        assert!(matches!(
            hilbert_coefficients_direct(&h, RadialModel::Linear),
            Err(Error::SupportViolation { .. })
        ));
    }

    #[test]
    fn large_angular_counts_stay_finite() {
        let grid = Arc::new(PolarGrid::build(40, 2048, 1.0, 1.2).unwrap());
        let h = random_supported_table(grid, 23);
        let c = hilbert_coefficients_recursive(&h, RadialModel::Linear).unwrap();
        assert!(c.raw().iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }
}
