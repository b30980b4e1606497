//! Circular polar grids, sampled functions and the FFT bridge between point
//! values and angular Fourier coefficients.
//!
//! Radii are stored zero-based: `radii[0] == 0` and `radii[support_index()]`
//! equals the support radius `R`. Angles are `theta_j = 2*pi*j/M`.
//! Coefficient tables store harmonic `k` in `[-M/2, M/2)` at column
//! `k mod M`, which is the natural FFT output layout.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radii: Vec<f64>,
    midpoints: Vec<f64>,
    support: usize,
    angles: usize,
}

impl PolarGrid {
    /// Builds a uniform grid of `n` radii on `[0, outer_factor * r]` with `m`
    /// equispaced angles.
    ///
    /// The support radius `r` is always a node. When the uniform spacing does
    /// not land on `r`, the nearest node is moved onto it.
    pub fn build(n: usize, m: usize, r: f64, outer_factor: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 radii, got {n}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidGrid(format!("support radius must be positive, got {r}")));
        }
        if !(outer_factor.is_finite() && outer_factor >= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "outer factor must be >= 1, got {outer_factor}"
            )));
        }
        check_angles(m)?;

        let step = outer_factor * r / (n - 1) as f64;
        let t = (n - 1) as f64 / outer_factor;
        let support = (t.round() as usize).clamp(1, n - 1);
        let mut radii: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        // Either removes rounding in `support * step` or moves the nearest
        // node onto R when the uniform spacing misses it.
        radii[support] = r;
        Self::from_radii(radii, support, m)
    }

    /// Builds a grid from explicit radii. `support` is the zero-based index of
    /// the support radius.
    pub fn from_radii(radii: Vec<f64>, support: usize, m: usize) -> Result<Self> {
        check_angles(m)?;
        let n = radii.len();
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 radii, got {n}")));
        }
        if radii[0] != 0.0 {
            return Err(Error::InvalidGrid(format!("first radius must be 0, got {}", radii[0])));
        }
        if let Some(w) = radii.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "radii must be finite and strictly increasing (index {})",
                w + 1
            )));
        }
        if support == 0 || support >= n {
            return Err(Error::InvalidGrid(format!(
                "support index {support} out of range 1..{n}"
            )));
        }
        let mut midpoints = vec![0.0; n];
        for i in 1..n {
            midpoints[i] = 0.5 * (radii[i - 1] + radii[i]);
        }
        Ok(Self {
            radii,
            midpoints,
            support,
            angles: m,
        })
    }

    pub fn n_radii(&self) -> usize {
        self.radii.len()
    }

    pub fn n_angles(&self) -> usize {
        self.angles
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// `midpoints()[0] == 0` and `midpoints()[i]` is the midpoint of
    /// `[radii[i-1], radii[i]]`.
    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    /// Zero-based index of the support radius.
    pub fn support_index(&self) -> usize {
        self.support
    }

    pub fn support_radius(&self) -> f64 {
        self.radii[self.support]
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.angles as f64
    }

    /// Complex coordinate of node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[i], self.angle(j))
    }

    /// True when the radii are `i * R / support` for every `i`, the only
    /// layout the CSV header can describe.
    pub fn is_canonical_uniform(&self) -> bool {
        let step = self.support_radius() / self.support as f64;
        self.radii
            .iter()
            .enumerate()
            .all(|(i, &r)| (r - i as f64 * step).abs() <= 1e-12 * (1.0 + r))
    }

    /// Uniform grid with spacing `R / support` and `n` radii.
    pub fn canonical(n: usize, m: usize, r: f64, support: usize) -> Result<Self> {
        if support == 0 || support >= n {
            return Err(Error::InvalidGrid(format!(
                "support index {support} out of range 1..{n}"
            )));
        }
        let step = r / support as f64;
        let mut radii: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        radii[support] = r;
        Self::from_radii(radii, support, m)
    }
}

fn check_angles(m: usize) -> Result<()> {
    if m < 4 || !m.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "angular count must be a power of two >= 4, got {m}"
        )));
    }
    Ok(())
}

pub(crate) fn same_grid(a: &Arc<PolarGrid>, b: &Arc<PolarGrid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Maps a harmonic index in `[-M/2, M/2)` to its storage column.
#[inline]
pub fn harmonic_column(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// Harmonic index stored at column `c`.
#[inline]
pub fn column_harmonic(c: usize, m: usize) -> i64 {
    if c < m / 2 {
        c as i64
    } else {
        c as i64 - m as i64
    }
}

/// Complex samples `values[i*M + j] = h(r_i e^{i theta_j})`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<PolarGrid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let len = grid.n_radii() * grid.n_angles();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_values(grid: Arc<PolarGrid>, values: Vec<Complex64>) -> Result<Self> {
        let expected = grid.n_radii() * grid.n_angles();
        if values.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Arc<PolarGrid>, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = grid.n_angles();
        let values = (0..grid.n_radii())
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| f(grid.node(i, j)))
            .collect();
        Self { grid, values }
    }

    /// Samples `f` inside the closed support disk and stores zero outside.
    pub fn from_fn_supported(grid: Arc<PolarGrid>, f: impl Fn(Complex64) -> Complex64) -> Self {
        let support = grid.support_index();
        let mut out = Self::from_fn(grid, f);
        let m = out.grid.n_angles();
        for v in &mut out.values[(support + 1) * m..] {
            *v = Complex64::new(0.0, 0.0);
        }
        out
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Swaps in a same-sized sample buffer and returns the old one.
    pub(crate) fn replace_values(&mut self, values: Vec<Complex64>) -> Vec<Complex64> {
        assert_eq!(values.len(), self.values.len());
        std::mem::replace(&mut self.values, values)
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_angles() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let m = self.grid.n_angles();
        self.values[i * m + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let m = self.grid.n_angles();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    /// Fails with the first radius index beyond the support that holds a
    /// nonzero value.
    pub fn check_support(&self) -> Result<()> {
        let m = self.grid.n_angles();
        let support = self.grid.support_index();
        if let Some(pos) = self.values[(support + 1) * m..]
            .iter()
            .position(|v| v.re != 0.0 || v.im != 0.0)
        {
            return Err(Error::SupportViolation {
                index: support + 1 + pos / m,
                support,
            });
        }
        Ok(())
    }

    pub fn is_compactly_supported(&self) -> bool {
        self.check_support().is_ok()
    }

    /// Applies `f` to every value.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entrywise `a * self + b * other`.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }
}

/// Angular Fourier coefficients per radius, `coeffs[i*M + (k mod M)] = h_k(r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    grid: Arc<PolarGrid>,
    coeffs: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let len = grid.n_radii() * grid.n_angles();
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_raw(grid: Arc<PolarGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = grid.n_radii() * grid.n_angles();
        if coeffs.len() != expected {
            return Err(Error::InvalidGrid(format!(
                "expected {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn raw(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Smallest stored harmonic, `-M/2`.
    pub fn k_min(&self) -> i64 {
        -(self.grid.n_angles() as i64 / 2)
    }

    /// One past the largest stored harmonic, `M/2`.
    pub fn k_end(&self) -> i64 {
        self.grid.n_angles() as i64 / 2
    }

    pub fn contains_harmonic(&self, k: i64) -> bool {
        k >= self.k_min() && k < self.k_end()
    }

    /// `h_k(r_i)`; harmonics outside the stored range read as zero.
    pub fn get(&self, i: usize, k: i64) -> Complex64 {
        if !self.contains_harmonic(k) {
            return Complex64::new(0.0, 0.0);
        }
        let m = self.grid.n_angles();
        self.coeffs[i * m + harmonic_column(k, m)]
    }

    pub fn set(&mut self, i: usize, k: i64, v: Complex64) {
        assert!(self.contains_harmonic(k), "harmonic {k} out of stored range");
        let m = self.grid.n_angles();
        self.coeffs[i * m + harmonic_column(k, m)] = v;
    }

    /// Radial profile `h_k(r_0), ..., h_k(r_{N-1})`, zero for harmonics out of range.
    pub fn column(&self, k: i64) -> Vec<Complex64> {
        (0..self.grid.n_radii()).map(|i| self.get(i, k)).collect()
    }

    pub fn set_column(&mut self, k: i64, values: &[Complex64]) {
        assert_eq!(values.len(), self.grid.n_radii());
        let m = self.grid.n_angles();
        let c = harmonic_column(k, m);
        for (i, &v) in values.iter().enumerate() {
            self.coeffs[i * m + c] = v;
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .fold(0.0, f64::max)
            .sqrt())
    }

    /// Fails if any row beyond the support index is nonzero.
    pub fn check_support(&self) -> Result<()> {
        let m = self.grid.n_angles();
        let support = self.grid.support_index();
        if let Some(pos) = self.coeffs[(support + 1) * m..]
            .iter()
            .position(|v| v.re != 0.0 || v.im != 0.0)
        {
            return Err(Error::SupportViolation {
                index: support + 1 + pos / m,
                support,
            });
        }
        Ok(())
    }
}

/// Blocked transpose of a `rows x cols` row-major array into `dst`.
pub(crate) fn transpose_into(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    const BLOCK: usize = 32;
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(dst.len(), rows * cols);
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    transpose_into(src, rows, cols, &mut out);
    out
}

/// Index range of harmonic `k` in a harmonic-major buffer of `n` radii and
/// `m` angles, `None` outside `[-m/2, m/2)`.
pub(crate) fn profile_range(k: i64, n: usize, m: usize) -> Option<std::ops::Range<usize>> {
    let half = (m / 2) as i64;
    (k >= -half && k < half).then(|| {
        let c = harmonic_column(k, m);
        c * n..(c + 1) * n
    })
}

/// Planned row FFTs with their scratch, reused across calls.
pub(crate) struct RowFft {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl RowFft {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            m,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Samples to coefficients, row by row, with the `1/M` factor.
    pub fn forward_rows(&mut self, data: &mut [Complex64]) {
        let scale = 1.0 / self.m as f64;
        for row in data.chunks_exact_mut(self.m) {
            self.forward.process_with_scratch(row, &mut self.scratch);
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
    }

    pub fn inverse_rows(&mut self, data: &mut [Complex64]) {
        for row in data.chunks_exact_mut(self.m) {
            self.inverse.process_with_scratch(row, &mut self.scratch);
        }
    }
}

/// A coefficient table stored one contiguous radial profile per harmonic,
/// the layout the radial sweeps walk.
pub(crate) struct Profiles {
    n: usize,
    m: usize,
    data: Vec<Complex64>,
}

impl Profiles {
    pub fn zeros(grid: &PolarGrid) -> Self {
        let (n, m) = (grid.n_radii(), grid.n_angles());
        Self {
            n,
            m,
            data: vec![Complex64::new(0.0, 0.0); n * m],
        }
    }

    pub fn of(table: &CoefficientTable) -> Self {
        let (n, m) = (table.grid.n_radii(), table.grid.n_angles());
        Self {
            n,
            m,
            data: transpose(&table.coeffs, n, m),
        }
    }

    /// Profile of harmonic `k`, `None` outside the stored range.
    #[cfg(test)]
    pub fn get(&self, k: i64) -> Option<&[Complex64]> {
        profile_range(k, self.n, self.m).map(|r| &self.data[r])
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_table(self, grid: Arc<PolarGrid>) -> CoefficientTable {
        CoefficientTable {
            grid,
            coeffs: transpose(&self.data, self.m, self.n),
        }
    }
}

/// Forward transform of every radius: `h_k(r_i) = (1/M) sum_j h_ij e^{-ik theta_j}`.
pub fn analyze(f: &GridFunction) -> CoefficientTable {
    let mut coeffs = f.values.clone();
    RowFft::new(f.grid.n_angles()).forward_rows(&mut coeffs);
    CoefficientTable {
        grid: f.grid.clone(),
        coeffs,
    }
}

/// Inverse of [`analyze`]: `h(r_i e^{i theta_j}) = sum_k h_k(r_i) e^{ik theta_j}`.
pub fn synthesize(c: &CoefficientTable) -> GridFunction {
    let mut values = c.coeffs.clone();
    RowFft::new(c.grid.n_angles()).inverse_rows(&mut values);
    GridFunction {
        grid: c.grid.clone(),
        values,
    }
}

pub fn pointwise_product(a: &GridFunction, b: &GridFunction) -> Result<GridFunction> {
    if !same_grid(&a.grid, &b.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(GridFunction {
        grid: a.grid.clone(),
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    })
}

pub fn sup_distance(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    if !same_grid(&a.grid, &b.grid) {
        return Err(Error::GridMismatch);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm_sqr())
        .fold(0.0, f64::max)
        .sqrt())
}
