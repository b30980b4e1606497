//! Radial interpolation of Fourier coefficient profiles and the closed-form
//! integrals of `(r/rho)^k rho^m` against them.
//!
//! Every transform in this crate reduces to sums of
//! `int_a^b (r/rho)^k rho^m h(rho) d rho` over grid cells, where `h` is a
//! piecewise-constant or piecewise-linear model of one coefficient profile.
//! Callers keep `r/rho <= 1` raised to `k >= 0`, or `rho/r <= 1` raised to
//! `|k|` for `k < 0`, so the powers never overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::PolarGrid;

/// Powers with `|k|` above this are evaluated as `exp(k ln x)`.
const POWI_LIMIT: i64 = 64;

/// Interpolation used for the coefficient profiles `h_k(r)` between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialModel {
    /// `h_k` equals the node value on `[rho_{i-1}, rho_i)`, the half-open
    /// interval between neighbouring midpoints. Pieces stop at the midpoint
    /// past the support radius (or at `R` on grids that end there).
    #[serde(alias = "const")]
    Constant,
    /// Node values joined linearly; the profile vanishes beyond `R`.
    #[default]
    Linear,
}

impl std::str::FromStr for RadialModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "const" | "constant" => Ok(Self::Constant),
            "linear" => Ok(Self::Linear),
            other => Err(format!("unknown radial model '{other}' (expected const|linear)")),
        }
    }
}

/// `x^k` for `0 <= x`, with `0^0 = 1`.
#[inline]
pub(crate) fn ratio_pow(x: f64, k: i64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if x == 0.0 {
        return if k > 0 { 0.0 } else { f64::INFINITY };
    }
    if k.abs() <= POWI_LIMIT {
        x.powi(k as i32)
    } else {
        (k as f64 * x.ln()).exp()
    }
}

/// `int_a^b (r/rho)^k rho^m d rho` for `0 <= a < b`.
///
/// Returns `+inf` when the integral diverges at `a = 0`.
pub(crate) fn moment(k: i64, m: i32, r: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b > a);
    if r == 0.0 {
        if k > 0 {
            return 0.0;
        }
        if k < 0 {
            return f64::INFINITY;
        }
    }
    // Exponent of rho after integrating r^k rho^(m-k).
    let e = m as i64 + 1 - k;
    if a == 0.0 {
        if e <= 0 {
            return f64::INFINITY;
        }
        return b.powi(m + 1) * ratio_pow(r / b, k) / e as f64;
    }
    let log_ratio = ((b - a) / a).ln_1p();
    if e == 0 {
        return ratio_pow(r, k) * log_ratio;
    }
    let x = e as f64 * log_ratio;
    if x.abs() < 0.5 {
        // b^e - a^e loses digits for thin cells; expm1 keeps them.
        a.powi(m + 1) * ratio_pow(r / a, k) * x.exp_m1() / e as f64
    } else {
        (b.powi(m + 1) * ratio_pow(r / b, k) - a.powi(m + 1) * ratio_pow(r / a, k)) / e as f64
    }
}

/// Weights `(w0, w1)` on the linear-interpolation basis of `[a, b]`:
/// `int_a^b (r/rho)^k rho^m h(rho) = w0 h(a) + w1 h(b)` for linear `h`.
fn linear_weights(k: i64, m: i32, r: f64, a: f64, b: f64) -> (f64, f64) {
    let width = b - a;
    let j0 = moment(k, m, r, a, b);
    let j1 = moment(k, m + 1, r, a, b);
    if a == 0.0 {
        return ((b * j0 - j1) / width, j1 / width);
    }
    ((b * j0 - j1) / width, (j1 - a * j0) / width)
}

#[inline]
fn accumulate(acc: &mut Complex64, w: f64, h: Complex64) {
    // Zero samples never meet a divergent weight: 0 * inf would poison the sum.
    if h.re != 0.0 || h.im != 0.0 {
        *acc += h * w;
    }
}

/// Cell geometry shared by every harmonic of one transform call.
pub(crate) struct RadialCells<'a> {
    pub radii: &'a [f64],
    midpoints: &'a [f64],
    support: usize,
    model: RadialModel,
    edge: f64,
    /// `ln(r_{c+1} / r_c)` per cell; infinite for the cell at the origin.
    log_ratio: Vec<f64>,
}

/// `(1 - exp(-d L)) / d`, with `t = exp(-d L)` already known; `L` at `d = 0`.
#[inline]
fn phi(d: i64, log_ratio: f64, t: f64) -> f64 {
    if d == 0 {
        return log_ratio;
    }
    let x = d as f64 * log_ratio;
    if x.abs() < 0.5 {
        -(-x).exp_m1() / d as f64
    } else {
        (1.0 - t) / d as f64
    }
}

impl<'a> RadialCells<'a> {
    pub fn new(grid: &'a PolarGrid, model: RadialModel) -> Self {
        let radii = grid.radii();
        let support = grid.support_index();
        let edge = match model {
            RadialModel::Linear => radii[support],
            RadialModel::Constant => {
                if support + 1 < radii.len() {
                    grid.midpoints()[support + 1]
                } else {
                    radii[support]
                }
            }
        };
        let log_ratio = radii
            .windows(2)
            .map(|w| if w[0] == 0.0 { f64::INFINITY } else { ((w[1] - w[0]) / w[0]).ln_1p() })
            .collect();
        Self {
            radii,
            midpoints: grid.midpoints(),
            support,
            model,
            edge,
            log_ratio,
        }
    }

    /// Outer edge of the model's support.
    #[cfg(test)]
    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn n_cells(&self) -> usize {
        self.radii.len() - 1
    }

    /// Model value at node `i`.
    #[inline]
    pub fn node_value(&self, profile: &[Complex64], i: usize) -> Complex64 {
        if i <= self.support {
            profile[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `int over cell c of (r/rho)^k rho^m h(rho) d rho`, where cell `c` spans
    /// `[radii[c], radii[c+1]]` and `h` is the model built from `profile`.
    pub fn cell_integral(&self, profile: &[Complex64], c: usize, k: i64, m: i32, r: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let (x0, x1) = (self.radii[c], self.radii[c + 1]);
        match self.model {
            RadialModel::Linear => {
                if c < self.support {
                    let (w0, w1) = linear_weights(k, m, r, x0, x1);
                    accumulate(&mut acc, w0, profile[c]);
                    accumulate(&mut acc, w1, profile[c + 1]);
                }
            }
            RadialModel::Constant => {
                let mid = self.midpoints[c + 1];
                if c <= self.support {
                    let hi = mid.min(self.edge);
                    if hi > x0 {
                        accumulate(&mut acc, moment(k, m, r, x0, hi), profile[c]);
                    }
                }
                if c < self.support {
                    let hi = x1.min(self.edge);
                    if hi > mid {
                        accumulate(&mut acc, moment(k, m, r, mid, hi), profile[c + 1]);
                    }
                }
            }
        }
        acc
    }

    /// Integral over cell `c` with `r = r_{c+1}` (its outer end), and the
    /// carry factor `(r_c / r_{c+1})^{-k}` for `k < 0`.
    pub fn outward_step(&self, profile: &[Complex64], c: usize, k: i64, m: i32) -> (Complex64, f64) {
        let (a, b) = (self.radii[c], self.radii[c + 1]);
        if self.model != RadialModel::Linear || k >= 0 {
            return (self.cell_integral(profile, c, k, m, b), ratio_pow(a / b, -k));
        }
        let lr = self.log_ratio[c];
        let carry = if a == 0.0 { 0.0 } else { (k as f64 * lr).exp() };
        if c >= self.support {
            return (Complex64::new(0.0, 0.0), carry);
        }
        let q = a / b;
        // exp(-d L) for d = m + 1 - k and m + 2 - k, from the carry factor.
        let (d0, d1) = (m as i64 + 1 - k, m as i64 + 2 - k);
        let (t0, t1) = (carry * q.powi(m + 1), carry * q.powi(m + 2));
        let j0 = b.powi(m + 1) * phi(d0, lr, t0);
        let j1 = b.powi(m + 2) * phi(d1, lr, t1);
        (self.linear_combine(profile, c, a, b, j0, j1), carry)
    }

    /// Integral over cell `c` with `r = r_c > 0` (its inner end), and the
    /// carry factor `(r_c / r_{c+1})^k` for `k >= 0`.
    pub fn inward_step(&self, profile: &[Complex64], c: usize, k: i64, m: i32) -> (Complex64, f64) {
        let (a, b) = (self.radii[c], self.radii[c + 1]);
        if self.model != RadialModel::Linear || k < 0 || a == 0.0 {
            return (self.cell_integral(profile, c, k, m, a), ratio_pow(a / b, k));
        }
        let lr = self.log_ratio[c];
        let carry = (-(k as f64) * lr).exp();
        if c >= self.support {
            return (Complex64::new(0.0, 0.0), carry);
        }
        let inv_q = b / a;
        // exp(-d L) for d = k - m - 1 and k - m - 2.
        let (d0, d1) = (k - m as i64 - 1, k - m as i64 - 2);
        let (t0, t1) = (carry * inv_q.powi(m + 1), carry * inv_q.powi(m + 2));
        let j0 = a.powi(m + 1) * phi(d0, lr, t0);
        let j1 = a.powi(m + 2) * phi(d1, lr, t1);
        (self.linear_combine(profile, c, a, b, j0, j1), carry)
    }

    #[inline]
    fn linear_combine(&self, profile: &[Complex64], c: usize, a: f64, b: f64, j0: f64, j1: f64) -> Complex64 {
        let width = b - a;
        let mut acc = Complex64::new(0.0, 0.0);
        accumulate(&mut acc, (b * j0 - j1) / width, profile[c]);
        accumulate(&mut acc, (j1 - a * j0) / width, profile[c + 1]);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Gauss-Legendre (5 points) reference for the moment integral.
    fn quad(k: i64, m: i32, r: f64, a: f64, b: f64) -> f64 {
        let nodes = [
            (0.0, 128.0 / 225.0),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
            (0.906_179_845_938_664, 0.236_926_885_056_189_08),
        ];
        let panels = 400;
        let h = (b - a) / panels as f64;
        let mut s = 0.0;
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (x, w) in nodes {
                let rho: f64 = c + 0.5 * h * x;
                s += 0.5 * h * w * (r / rho).powi(k as i32) * rho.powi(m);
            }
        }
        s
    }

    #[test]
    fn moment_matches_quadrature() {
        let cases = [
            (0, -1, 0.3, 0.3, 0.35),
            (3, -1, 0.3, 0.3, 0.9),
            (-3, -1, 0.9, 0.3, 0.9),
            (-4, 0, 1.0, 0.0, 0.2),
            (1, 0, 0.5, 0.5, 0.51),
            (2, 1, 0.5, 0.6, 0.7),
            (40, 0, 0.5, 0.5, 0.52),
            (-40, -1, 0.52, 0.5, 0.52),
        ];
        for (k, m, r, a, b) in cases {
            let got = moment(k, m, r, a, b);
            let want = quad(k, m, r, a, b);
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1e-300),
                "k={k} m={m}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn large_powers_stay_finite() {
        let v = moment(1000, -1, 0.5, 0.5, 1.0);
        assert!(v.is_finite() && v > 0.0);
        // (1 - 2^-1000) / 1000
        assert!((v - 1e-3).abs() < 1e-15);
        let w = moment(-1000, 0, 1.0, 0.0, 1.0);
        assert!((w - 1.0 / 1001.0).abs() < 1e-15);
    }

    #[test]
    fn divergent_moment_is_infinite() {
        assert_eq!(moment(0, -1, 1.0, 0.0, 1.0), f64::INFINITY);
        assert_eq!(moment(2, 0, 0.0, 0.0, 1.0), 0.0);
        assert_eq!(moment(0, 0, 0.0, 0.0, 2.0), 2.0);
    }

    #[test]
    fn ratio_pow_branches_agree() {
        for &x in &[0.1f64, 0.5, 0.99] {
            let k = 64;
            let direct = x.powi(k);
            let logged = (k as f64 * f64::ln(x)).exp();
            assert!((direct - logged).abs() <= 1e-13 * direct);
            assert!(ratio_pow(x, 65) > 0.0);
        }
        assert_eq!(ratio_pow(0.0, 0), 1.0);
        assert_eq!(ratio_pow(0.0, 3), 0.0);
    }

    #[test]
    fn linear_cell_reproduces_linear_integrand() {
        let grid = PolarGrid::build(5, 4, 1.0, 1.0).unwrap();
        let cells = RadialCells::new(&grid, RadialModel::Linear);
        // h(rho) = rho on every node
        let profile: Vec<Complex64> = grid.radii().iter().map(|&r| Complex64::new(r, 0.0)).collect();
        // int_{0.25}^{0.5} rho d rho
        let got = cells.cell_integral(&profile, 1, 0, 0, 1.0);
        assert!((got.re - (0.25 - 0.0625) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_steps_match_generic_integral() {
        let grid = PolarGrid::build(40, 8, 1.0, 1.3).unwrap();
        let cells = RadialCells::new(&grid, RadialModel::Linear);
        let profile: Vec<Complex64> = grid
            .radii()
            .iter()
            .enumerate()
            .map(|(i, &r)| if i <= grid.support_index() { Complex64::new(r.cos(), r * r) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let radii = grid.radii();
        for m in [-1, 0] {
            for k in [-300, -65, -7, -1] {
                for c in 0..cells.n_cells() {
                    let (got, carry) = cells.outward_step(&profile, c, k, m);
                    let want = cells.cell_integral(&profile, c, k, m, radii[c + 1]);
                    assert!((got - want).norm() <= 1e-13 * (1.0 + want.norm()), "m={m} k={k} c={c}");
                    assert!((carry - ratio_pow(radii[c] / radii[c + 1], -k)).abs() < 1e-14);
                }
            }
            for k in [0, 1, 2, 3, 64, 300] {
                for c in 1..cells.n_cells() {
                    let (got, carry) = cells.inward_step(&profile, c, k, m);
                    let want = cells.cell_integral(&profile, c, k, m, radii[c]);
                    assert!((got - want).norm() <= 1e-13 * (1.0 + want.norm()), "m={m} k={k} c={c}");
                    assert!((carry - ratio_pow(radii[c] / radii[c + 1], k)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn constant_cell_splits_at_midpoint() {
        let grid = PolarGrid::build(5, 4, 1.0, 2.0).unwrap();
        let cells = RadialCells::new(&grid, RadialModel::Constant);
        let profile = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        // cell [0.5, 1.0]: value 2 on [0.5, 0.75), 3 on [0.75, 1.0)
        let got = cells.cell_integral(&profile, 1, 0, 0, 1.0);
        assert!((got.re - (2.0 * 0.25 + 3.0 * 0.25)).abs() < 1e-15);
        // support cell [1.0, 1.5] keeps only [1.0, 1.25)
        let got = cells.cell_integral(&profile, 2, 0, 0, 1.0);
        assert!((got.re - 3.0 * 0.25).abs() < 1e-15);
        assert_eq!(cells.edge(), 1.25);
    }
}
