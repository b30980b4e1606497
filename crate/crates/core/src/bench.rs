//! Experiment drivers: convergence histories, timings, accuracy against the
//! exact polynomial scheme, and the monomial oracle comparison.
//!
//! Every report serializes to JSON and renders as CSV.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::derivative::DifferenceStencil;
use crate::error::{Error, Result};
use crate::exact::{default_eps_list, monomial_hilbert, singular_quadrature_oracle, InitialCondition, PolyDifferential};
use crate::grid::{sup_distance, GridFunction, PolarGrid};
use crate::radial::RadialModel;
use crate::solver::{iterate, IterationReport, MuInput, Scheme, SolveConfig};

/// What every solve in an experiment shares.
#[derive(Debug, Clone)]
pub struct BenchSetup {
    pub mu: PolyDifferential,
    pub outer_factor: f64,
    pub model: RadialModel,
    pub stencil: DifferenceStencil,
    pub initial_condition: InitialCondition,
}

impl BenchSetup {
    pub fn new(mu: PolyDifferential) -> Self {
        Self {
            mu,
            outer_factor: 1.0,
            model: RadialModel::Linear,
            stencil: DifferenceStencil::RightTwoPoint,
            initial_condition: InitialCondition::TransformedMu,
        }
    }

    pub fn grid(&self, n: usize, m: usize) -> Result<Arc<PolarGrid>> {
        Ok(Arc::new(PolarGrid::build(n, m, self.mu.support_radius(), self.outer_factor)?))
    }

    fn input(&self, n: usize, m: usize) -> Result<MuInput> {
        Ok(MuInput::Poly {
            poly: self.mu.clone(),
            grid: self.grid(n, m)?,
        })
    }

    /// Exactly `iterations` steps: no tolerance or stagnation stop.
    fn config(&self, scheme: Scheme, iterations: usize) -> SolveConfig {
        SolveConfig {
            scheme,
            model: self.model,
            max_iterations: iterations,
            tolerance: f64::MIN_POSITIVE,
            initial_condition: self.initial_condition,
            stencil: self.stencil.clone(),
            stop_on_stagnation: false,
            ..SolveConfig::default()
        }
    }

    pub fn run(&self, n: usize, m: usize, scheme: Scheme, iterations: usize) -> Result<(GridFunction, IterationReport)> {
        iterate(&self.input(n, m)?, &self.config(scheme, iterations))
    }
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::Scheme1 => "scheme1",
        Scheme::Scheme2 => "scheme2",
        Scheme::Scheme3 => "scheme3",
    }
}

fn csv_float(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeHistory {
    pub scheme: Scheme,
    /// `deltas[n-1] = |h^n - h^{n-1}|_inf`.
    pub deltas: Vec<f64>,
}

impl SchemeHistory {
    pub fn at(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|k| self.deltas.get(k).copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub n_radii: usize,
    pub n_angles: usize,
    pub initial_condition: InitialCondition,
    pub checkpoints: Vec<usize>,
    pub histories: Vec<SchemeHistory>,
}

impl ConvergenceReport {
    /// One row per checkpoint, one column per scheme.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for h in &self.histories {
            write!(out, ",{}", scheme_name(h.scheme)).unwrap();
        }
        out.push('\n');
        for &n in &self.checkpoints {
            write!(out, "{n}").unwrap();
            for h in &self.histories {
                let cell = h.at(n).map(csv_float).unwrap_or_default();
                write!(out, ",{cell}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Runs each scheme to the last checkpoint and keeps the whole delta history.
pub fn convergence(setup: &BenchSetup, n: usize, m: usize, schemes: &[Scheme], checkpoints: &[usize]) -> Result<ConvergenceReport> {
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    let mut histories = Vec::new();
    for &scheme in schemes {
        let (_, report) = setup.run(n, m, scheme, last)?;
        histories.push(SchemeHistory {
            scheme,
            deltas: report.deltas,
        });
    }
    Ok(ConvergenceReport {
        n_radii: n,
        n_angles: m,
        initial_condition: setup.initial_condition,
        checkpoints: checkpoints.to_vec(),
        histories,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n_radii: usize,
    pub n_angles: usize,
    pub scheme: Scheme,
    /// Median over runs of the summed per-step times.
    pub step_ms: f64,
    /// Median over runs of the whole solve, set-up included.
    pub total_ms: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub iterations: usize,
    pub rows: Vec<TimingRow>,
}

impl TimingReport {
    pub fn step_ms(&self, n: usize, m: usize, scheme: Scheme) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n_radii == n && r.n_angles == m && r.scheme == scheme)
            .map(|r| r.step_ms)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,M,scheme,iterations,step_ms,total_ms,runs\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{:.3},{:.3},{}",
                r.n_radii,
                r.n_angles,
                scheme_name(r.scheme),
                self.iterations,
                r.step_ms,
                r.total_ms,
                r.runs
            )
            .unwrap();
        }
        out
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

/// One untimed warm-up, then `runs` timed solves of `iterations` steps per
/// grid and scheme. Each round visits every grid and scheme once, so slow
/// drift in machine load affects all of them alike.
pub fn timing(setup: &BenchSetup, grids: &[(usize, usize)], schemes: &[Scheme], iterations: usize, runs: usize) -> Result<TimingReport> {
    if runs == 0 {
        return Err(Error::Config("need at least one timed run".into()));
    }
    let inputs = grids.iter().map(|&(n, m)| setup.input(n, m)).collect::<Result<Vec<_>>>()?;
    for input in &inputs {
        for &scheme in schemes {
            iterate(input, &setup.config(scheme, iterations))?;
        }
    }
    let cells = grids.len() * schemes.len();
    let mut steps = vec![Vec::new(); cells];
    let mut totals = vec![Vec::new(); cells];
    for _ in 0..runs {
        for (g, input) in inputs.iter().enumerate() {
            for (s, &scheme) in schemes.iter().enumerate() {
                let start = std::time::Instant::now();
                let (_, report) = iterate(input, &setup.config(scheme, iterations))?;
                totals[g * schemes.len() + s].push(start.elapsed().as_secs_f64() * 1e3);
                steps[g * schemes.len() + s].push(report.timings_ms.iter().sum());
            }
        }
    }
    let mut rows = Vec::new();
    for (g, &(n, m)) in grids.iter().enumerate() {
        for (s, &scheme) in schemes.iter().enumerate() {
            rows.push(TimingRow {
                n_radii: n,
                n_angles: m,
                scheme,
                step_ms: median(std::mem::take(&mut steps[g * schemes.len() + s])),
                total_ms: median(std::mem::take(&mut totals[g * schemes.len() + s])),
                runs,
            });
        }
    }
    Ok(TimingReport { iterations, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub n_radii: usize,
    pub n_angles: usize,
    /// `sup |h_1 - h_3|` over the grid.
    pub scheme1_error: f64,
    /// `sup |h_2 - h_3|` over the grid.
    pub scheme2_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub iterations: usize,
    pub initial_condition: InitialCondition,
    pub rows: Vec<AccuracyRow>,
}

impl AccuracyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,M,iterations,scheme1_error,scheme2_error\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.n_radii,
                r.n_angles,
                self.iterations,
                csv_float(r.scheme1_error),
                csv_float(r.scheme2_error)
            )
            .unwrap();
        }
        out
    }
}

/// Grid schemes against the exact scheme after `iterations` steps.
pub fn accuracy(setup: &BenchSetup, grids: &[(usize, usize)], iterations: usize) -> Result<AccuracyReport> {
    let mut rows = Vec::new();
    for &(n, m) in grids {
        let (h3, _) = setup.run(n, m, Scheme::Scheme3, iterations)?;
        let (h1, _) = setup.run(n, m, Scheme::Scheme1, iterations)?;
        let (h2, _) = setup.run(n, m, Scheme::Scheme2, iterations)?;
        rows.push(AccuracyRow {
            n_radii: n,
            n_angles: m,
            scheme1_error: sup_distance(&h1, &h3)?,
            scheme2_error: sup_distance(&h2, &h3)?,
        });
    }
    Ok(AccuracyReport {
        iterations,
        initial_condition: setup.initial_condition,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub p: u32,
    pub q: u32,
    pub z: Complex64,
    pub exact: Complex64,
    pub oracle: Complex64,
    pub discrepancy: f64,
    pub oracle_error: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub radius: f64,
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn all_agree(&self) -> bool {
        self.rows.iter().all(|r| r.agrees)
    }

    pub fn worst_discrepancy(&self) -> f64 {
        self.rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,q,z_re,z_im,exact_re,exact_im,oracle_re,oracle_im,discrepancy,oracle_error,agrees\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{}",
                r.p,
                r.q,
                r.z.re,
                r.z.im,
                r.exact.re,
                r.exact.im,
                r.oracle.re,
                r.oracle.im,
                csv_float(r.discrepancy),
                csv_float(r.oracle_error),
                r.agrees
            )
            .unwrap();
        }
        out
    }
}

/// Closed-form monomial transforms against brute-force quadrature. A row
/// agrees when the discrepancy is within the oracle's own error estimate.
pub fn oracle_check(monomials: &[(u32, u32)], points: &[Complex64], radius: f64) -> Result<OracleReport> {
    let mut rows = Vec::new();
    for &(p, q) in monomials {
        let f = move |z: Complex64| z.powu(p) * z.conj().powu(q);
        for &z in points {
            let exact = monomial_hilbert(p, q, radius, z)?;
            let est = singular_quadrature_oracle(&f, z, radius, &default_eps_list(z, radius))?;
            let discrepancy = (exact - est.value).norm();
            rows.push(OracleRow {
                p,
                q,
                z,
                exact,
                oracle: est.value,
                discrepancy,
                oracle_error: est.error,
                agrees: discrepancy <= est.error,
            });
        }
    }
    Ok(OracleReport { radius, rows })
}

/// `count` interior points on a spiral in `0.1R..0.85R` and `count` exterior
/// points in `1.15R..3R`; none lies on the axes or the circle.
pub fn oracle_points(count: usize, radius: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let spiral = |lo: f64, hi: f64| -> Vec<Complex64> {
        (0..count)
            .map(|k| {
                let t = if count > 1 { k as f64 / (count - 1) as f64 } else { 0.5 };
                let r = radius * (lo + (hi - lo) * t);
                Complex64::from_polar(r, 0.3 + 2.399_963 * k as f64)
            })
            .collect()
    };
    (spiral(0.1, 0.85), spiral(1.15, 3.0))
}

/// `NxM`, e.g. `500x256`.
pub fn parse_grid_dims(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("grid must look like NxM, got '{s}'"));
    let (n, m) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?))
}

/// Comma-separated `NxM` list.
pub fn parse_grid_list(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_grid_dims).collect()
}

/// Where a Beltrami coefficient comes from: `quartic:a,s` or `file:PATH`.
#[derive(Debug, Clone, PartialEq)]
pub enum MuSpec {
    Quartic { a: f64, s: f64 },
    File(std::path::PathBuf),
}

impl std::str::FromStr for MuSpec {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, Self::Err> {
        if let Some(rest) = text.strip_prefix("quartic:") {
            let (a, s) = rest.split_once(',').ok_or("expected quartic:a,s")?;
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number '{v}' in '{text}'"));
            Ok(MuSpec::Quartic { a: num(a)?, s: num(s)? })
        } else if let Some(path) = text.strip_prefix("file:") {
            Ok(MuSpec::File(path.into()))
        } else {
            Err(format!("expected quartic:a,s or file:PATH, got '{text}'"))
        }
    }
}

/// A loaded coefficient: exact polynomial, or samples on a fixed grid.
#[derive(Debug, Clone)]
pub enum LoadedMu {
    Poly(PolyDifferential),
    Grid(GridFunction),
}

impl MuSpec {
    /// JSON files holding a `terms` list are polynomials; anything else is
    /// read as a grid function.
    pub fn load(&self) -> Result<LoadedMu> {
        match self {
            MuSpec::Quartic { a, s } => Ok(LoadedMu::Poly(crate::exact::quartic_mu(*a, *s)?)),
            MuSpec::File(path) => {
                if crate::io::FileFormat::from_path(path) == crate::io::FileFormat::Json {
                    let text = std::fs::read_to_string(path)?;
                    let value: serde_json::Value = serde_json::from_str(&text)?;
                    if value.get("terms").is_some() {
                        return Ok(LoadedMu::Poly(PolyDifferential::from_json(&text)?));
                    }
                    return Ok(LoadedMu::Grid(crate::io::read_json(&text)?));
                }
                Ok(LoadedMu::Grid(crate::io::read_grid_function(path)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::quartic_mu;

    #[test]
    fn zero_mu_gives_zero_rows() {
        let setup = BenchSetup::new(PolyDifferential::zero(1.0).unwrap());
        let report = convergence(&setup, 21, 16, &[Scheme::Scheme1, Scheme::Scheme2, Scheme::Scheme3], &[1, 3]).unwrap();
        for h in &report.histories {
            assert!(h.deltas.iter().all(|&d| d == 0.0));
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("n,scheme1,scheme2,scheme3\n1,0e0,0e0,0e0\n"), "{csv}");
    }

    #[test]
    fn reports_roundtrip_through_json() {
        let setup = BenchSetup::new(quartic_mu(0.5, 1.0).unwrap());
        let acc = accuracy(&setup, &[(41, 16)], 3).unwrap();
        let back: AccuracyReport = serde_json::from_str(&serde_json::to_string(&acc).unwrap()).unwrap();
        assert_eq!(back, acc);
        assert!(acc.rows[0].scheme1_error < acc.rows[0].scheme2_error);

        let t = timing(&setup, &[(21, 16)], &[Scheme::Scheme1, Scheme::Scheme2], 2, 1).unwrap();
        assert_eq!(t.rows.len(), 2);
        let back: TimingReport = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(t.to_csv().lines().count() == 3);
    }

    #[test]
    fn oracle_check_agrees_and_empty_passes() {
        let empty = oracle_check(&[], &[Complex64::new(2.0, 0.0)], 1.0).unwrap();
        assert!(empty.all_agree() && empty.rows.is_empty());
        let report = oracle_check(&[(0, 0), (1, 0)], &[Complex64::new(2.0, 0.0), Complex64::new(0.3, 0.2)], 1.0).unwrap();
        assert!(report.all_agree(), "{report:?}");
        assert!(report.rows[0].discrepancy <= 1e-8);
    }

    #[test]
    fn parses_flags() {
        assert_eq!(parse_grid_dims("500x256").unwrap(), (500, 256));
        assert!(parse_grid_dims("500").is_err());
        assert_eq!(parse_grid_list("500x256,1000x512").unwrap(), vec![(500, 256), (1000, 512)]);
        assert_eq!("quartic:0.5,1".parse::<MuSpec>().unwrap(), MuSpec::Quartic { a: 0.5, s: 1.0 });
        assert!("quartic:0.5".parse::<MuSpec>().is_err());
        assert!("gauss:1".parse::<MuSpec>().is_err());
        assert!(matches!("quartic:1.2,1".parse::<MuSpec>().unwrap().load(), Err(Error::NotContracting(_))));
    }

    #[test]
    fn oracle_points_avoid_circle() {
        let (inside, outside) = oracle_points(20, 1.0);
        assert!(inside.iter().all(|z| z.norm() < 0.86));
        assert!(outside.iter().all(|z| z.norm() > 1.14));
    }
}
