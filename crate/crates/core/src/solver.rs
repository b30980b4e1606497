//! Fixed-point iteration `h -> T[mu (h + 1)]` for the Beltrami equation
//! `f_zbar = mu f_z`, and assembly of `f = P[mu (h + 1)] + z`.

use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cauchy::{cauchy_coefficients, cauchy_sweeps};
use crate::derivative::{dz, dzbar, wirtinger_sweeps, DifferenceStencil};
use crate::error::{Error, Result};
use crate::exact::{sample_split, scheme3_start, scheme3_step, InitialCondition, LaurentTail, PolyDifferential, DEFAULT_TERM_CEILING};
use crate::grid::{analyze, sup_distance, transpose_into, GridFunction, PolarGrid, RowFft};
use crate::hilbert::{check_origin_harmonic, hilbert_sweeps};
use crate::radial::{RadialCells, RadialModel};

/// Consecutive growing deltas that count as divergence.
const DIVERGENCE_RUN: usize = 5;
/// Deltas below this multiple of `eps * |h|_inf` are at the rounding floor.
const STAGNATION_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Hilbert coefficients by the recursive radial formulas.
    #[default]
    #[serde(rename = "scheme1")]
    Scheme1,
    /// `T = d/dz Pt`: Cauchy coefficients, then a finite-difference derivative.
    #[serde(rename = "scheme2")]
    Scheme2,
    /// Exact polynomial iteration, sampled to the grid for reporting.
    #[serde(rename = "scheme3")]
    Scheme3,
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "1" | "scheme1" => Ok(Self::Scheme1),
            "2" | "scheme2" => Ok(Self::Scheme2),
            "3" | "scheme3" => Ok(Self::Scheme3),
            other => Err(format!("unknown scheme '{other}' (expected 1|2|3)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub scheme: Scheme,
    pub model: RadialModel,
    pub max_iterations: usize,
    /// Stop once `|h^n - h^{n-1}|_inf <= tolerance`.
    pub tolerance: f64,
    pub initial_condition: InitialCondition,
    /// Radial derivative used by Scheme 2.
    pub stencil: DifferenceStencil,
    /// Stop when the delta reaches the rounding floor. Off for fixed-length runs.
    pub stop_on_stagnation: bool,
    /// Scheme 3 term bound.
    pub term_ceiling: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Scheme1,
            model: RadialModel::Linear,
            max_iterations: 50,
            tolerance: 1e-12,
            initial_condition: InitialCondition::Mu,
            stencil: DifferenceStencil::RightTwoPoint,
            stop_on_stagnation: true,
            term_ceiling: DEFAULT_TERM_CEILING,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    Stagnation,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub config: SolveConfig,
    /// `deltas[n-1] = |h^n - h^{n-1}|_inf`.
    pub deltas: Vec<f64>,
    pub timings_ms: Vec<f64>,
    pub termination: Termination,
    pub final_n: usize,
}

/// A Beltrami coefficient either sampled on a grid or as an exact polynomial.
#[derive(Debug, Clone)]
pub enum MuInput {
    Grid(GridFunction),
    Poly { poly: PolyDifferential, grid: Arc<PolarGrid> },
}

impl MuInput {
    pub fn grid(&self) -> &Arc<PolarGrid> {
        match self {
            MuInput::Grid(g) => g.grid(),
            MuInput::Poly { grid, .. } => grid,
        }
    }

    pub fn sampled(&self) -> GridFunction {
        match self {
            MuInput::Grid(g) => g.clone(),
            MuInput::Poly { poly, grid } => poly.sample(grid.clone()),
        }
    }
}

/// `mu (h + 1)` by point-wise products.
fn beltrami_source(mu: &GridFunction, h: &GridFunction) -> Result<GridFunction> {
    if !crate::grid::same_grid(mu.grid(), h.grid()) {
        return Err(Error::GridMismatch);
    }
    let values = mu.values().iter().zip(h.values()).map(|(&m, &v)| m * (v + 1.0)).collect();
    GridFunction::from_values(mu.grid().clone(), values)
}

/// Buffers and FFT plans for repeated grid steps on one grid, so that a
/// step allocates nothing.
struct StepWorkspace<'g> {
    grid: &'g PolarGrid,
    cells: RadialCells<'g>,
    fft: RowFft,
    /// Row-major samples or coefficients; holds the result after a step.
    table: Vec<Complex64>,
    profiles: Vec<Complex64>,
    swept: Vec<Complex64>,
}

impl<'g> StepWorkspace<'g> {
    fn new(grid: &'g PolarGrid, model: RadialModel) -> Self {
        let len = grid.n_radii() * grid.n_angles();
        let zero = Complex64::default();
        Self {
            grid,
            cells: RadialCells::new(grid, model),
            fft: RowFft::new(grid.n_angles()),
            table: vec![zero; len],
            profiles: vec![zero; len],
            swept: vec![zero; len],
        }
    }

    /// Writes the samples of `T[mu (h + 1)]` into `self.table`. `mu` must
    /// vanish past the support radius.
    fn step(&mut self, mu: &GridFunction, h: &GridFunction, scheme: Scheme, stencil: &DifferenceStencil) -> Result<()> {
        if !crate::grid::same_grid(mu.grid(), h.grid()) {
            return Err(Error::GridMismatch);
        }
        let (n, m) = (self.grid.n_radii(), self.grid.n_angles());
        for ((t, &a), &v) in self.table.iter_mut().zip(mu.values()).zip(h.values()) {
            *t = a * (v + 1.0);
        }
        self.fft.forward_rows(&mut self.table);
        transpose_into(&self.table, n, m, &mut self.profiles);
        match scheme {
            Scheme::Scheme1 => {
                let table = &self.table;
                let origin = if m / 2 > 2 { table[2] } else { Complex64::default() };
                check_origin_harmonic(origin, || table.iter().fold(0.0, |a, v| a.max(v.norm())))?;
                hilbert_sweeps(&self.cells, &mut self.profiles, &mut self.swept, m);
                transpose_into(&self.swept, m, n, &mut self.table);
            }
            Scheme::Scheme2 => {
                cauchy_sweeps(&self.cells, &self.profiles, &mut self.swept, m);
                wirtinger_sweeps(self.grid.radii(), stencil, 1, &self.swept, &mut self.profiles, m);
                transpose_into(&self.profiles, m, n, &mut self.table);
            }
            Scheme::Scheme3 => return Err(Error::SchemeMismatch("scheme 3 has no grid step".into())),
        }
        self.fft.inverse_rows(&mut self.table);
        Ok(())
    }
}

/// One grid step `T[mu (h + 1)]` with Scheme 1 or 2.
pub fn grid_step(mu: &GridFunction, h: &GridFunction, scheme: Scheme, model: RadialModel, stencil: &DifferenceStencil) -> Result<GridFunction> {
    mu.check_support()?;
    let grid = mu.grid().clone();
    let mut ws = StepWorkspace::new(&grid, model);
    ws.step(mu, h, scheme, stencil)?;
    GridFunction::from_values(grid.clone(), ws.table)
}

/// Runs the iteration and returns the final `h` sampled on the grid.
pub fn iterate(mu: &MuInput, cfg: &SolveConfig) -> Result<(GridFunction, IterationReport)> {
    cfg.validate()?;
    let grid = mu.grid().clone();
    let mu_grid = mu.sampled();
    mu_grid.check_support()?;
    let sup = mu_grid.sup_norm();
    if sup >= 1.0 {
        return Err(Error::NotContracting(sup));
    }
    let poly = match (cfg.scheme, mu) {
        (Scheme::Scheme3, MuInput::Poly { poly, .. }) => Some(poly),
        (Scheme::Scheme3, MuInput::Grid(_)) => {
            return Err(Error::SchemeMismatch("scheme 3 needs a polynomial Beltrami coefficient".into()))
        }
        _ => None,
    };

    let (mut h, mut h_poly) = match poly {
        Some(p) => {
            let (inside, tail) = scheme3_start(p, cfg.initial_condition)?;
            (sample_split(&inside, &tail, grid.clone()), Some(inside))
        }
        None => {
            let h = match cfg.initial_condition {
                InitialCondition::Zero => GridFunction::zeros(grid.clone()),
                InitialCondition::Mu => mu_grid.clone(),
                InitialCondition::TransformedMu => {
                    grid_step(&mu_grid, &GridFunction::zeros(grid.clone()), cfg.scheme, cfg.model, &cfg.stencil)?
                }
            };
            (h, None)
        }
    };

    let mut workspace = (poly.is_none()).then(|| StepWorkspace::new(&grid, cfg.model));
    let mut deltas = Vec::new();
    let mut timings_ms = Vec::new();
    let mut growth = 0;
    let mut termination = Termination::MaxIterations;
    for step in 1..=cfg.max_iterations {
        let start = Instant::now();
        let delta = match (&poly, &mut h_poly, &mut workspace) {
            (Some(mu_poly), Some(current), _) => {
                let (inside, tail): (PolyDifferential, LaurentTail) = scheme3_step(mu_poly, current)?;
                if inside.term_count() > cfg.term_ceiling {
                    return Err(Error::TermCeiling {
                        count: inside.term_count(),
                        ceiling: cfg.term_ceiling,
                    });
                }
                let next = sample_split(&inside, &tail, grid.clone());
                *current = inside;
                timings_ms.push(start.elapsed().as_secs_f64() * 1e3);
                let delta = sup_distance(&next, &h)?;
                h = next;
                delta
            }
            (_, _, Some(ws)) => {
                ws.step(&mu_grid, &h, cfg.scheme, &cfg.stencil)?;
                timings_ms.push(start.elapsed().as_secs_f64() * 1e3);
                let delta = ws.table.iter().zip(h.values()).fold(0.0, |a: f64, (x, y)| a.max((x - y).norm()));
                ws.table = h.replace_values(std::mem::take(&mut ws.table));
                delta
            }
            _ => unreachable!("grid schemes always have a workspace"),
        };
        let floor = STAGNATION_FACTOR * f64::EPSILON * h.sup_norm();
        if let Some(&last) = deltas.last() {
            if delta > last && delta > floor {
                growth += 1;
            } else {
                growth = 0;
            }
        }
        deltas.push(delta);
        if growth >= DIVERGENCE_RUN {
            return Err(Error::Diverged {
                step,
                delta,
                growth_steps: growth,
            });
        }
        if !delta.is_finite() {
            return Err(Error::Diverged {
                step,
                delta,
                growth_steps: growth,
            });
        }
        if delta <= cfg.tolerance {
            termination = Termination::Tolerance;
            break;
        }
        if cfg.stop_on_stagnation && delta < floor {
            termination = Termination::Stagnation;
            break;
        }
    }
    let final_n = deltas.len();
    Ok((
        h,
        IterationReport {
            config: cfg.clone(),
            deltas,
            timings_ms,
            termination,
            final_n,
        },
    ))
}

/// `f = P[mu (h + 1)] + z` with `P` normalized so that `f(0) = 0`.
pub fn assemble_map(mu: &GridFunction, h: &GridFunction, model: RadialModel) -> Result<GridFunction> {
    let g = beltrami_source(mu, h)?;
    let potential = cauchy_coefficients(&analyze(&g), model)?
        .normalize_at_origin()
        .evaluate_potential();
    let grid = potential.grid().clone();
    let mut f = potential;
    for i in 0..grid.n_radii() {
        for j in 0..grid.n_angles() {
            let v = f.get(i, j) + grid.node(i, j);
            f.set(i, j, v);
        }
    }
    Ok(f)
}

/// `sup |f_zbar - mu f_z|` over radii `2 ..= L-2`, where `L` is the index of
/// `R`: the two radii next to the origin and the two next to `R` are skipped.
pub fn residual(f: &GridFunction, mu: &GridFunction, stencil: &DifferenceStencil) -> Result<f64> {
    if !crate::grid::same_grid(f.grid(), mu.grid()) {
        return Err(Error::GridMismatch);
    }
    let fz = dz(f, stencil);
    let fzb = dzbar(f, stencil);
    let grid = f.grid();
    let l = grid.support_index();
    let mut worst = 0.0f64;
    for i in 2..l.saturating_sub(1) {
        for j in 0..grid.n_angles() {
            let r: Complex64 = fzb.get(i, j) - mu.get(i, j) * fz.get(i, j);
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}
