use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use beltrami::bench::{self, BenchSetup, LoadedMu, MuSpec};
use beltrami::io::{self, FileFormat};
use beltrami::{
    analyze, assemble_map, cauchy_coefficients, dz, dzbar, iterate, residual, transform_scheme1, DifferenceStencil, Error,
    GridFunction, InitialCondition, MuInput, PolarGrid, RadialModel, Result, Scheme, SolveConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "beltrami", version, about = "Polar-grid Hilbert/Cauchy transforms and Beltrami solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one transform to a grid-function file.
    Transform(TransformArgs),
    /// Solve f_zbar = mu f_z by fixed-point iteration.
    Solve(SolveArgs),
    /// Delta history at fixed checkpoints for each scheme.
    BenchConvergence(ConvergenceArgs),
    /// Median wall-clock of a fixed number of iterations per grid and scheme.
    BenchTime(TimeArgs),
    /// Grid schemes against the exact polynomial scheme.
    BenchAccuracy(AccuracyArgs),
    /// Closed-form monomial transforms against brute-force quadrature.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Hilbert,
    Cauchy,
    Dz,
    Dzbar,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the output file's extension, else csv.
    #[arg(long)]
    format: Option<FileFormat>,
}

impl Output {
    fn format(&self) -> FileFormat {
        self.format
            .or_else(|| self.out.as_deref().map(FileFormat::from_path))
            .unwrap_or_default()
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct TransformArgs {
    /// Grid-function file (.csv or .json).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    op: Op,
    #[arg(long, default_value = "linear")]
    model: RadialModel,
    #[arg(long, default_value = "right2")]
    stencil: DifferenceStencil,
    /// Cauchy only: subtract the value at the origin.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct MuArgs {
    /// `quartic:a,s` or `file:PATH` (polynomial JSON or grid function).
    #[arg(long, default_value = "quartic:0.5,1")]
    mu: MuSpec,
    /// Support radius of the grid; defaults to the polynomial's.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    outer_factor: f64,
    #[arg(long, default_value = "linear")]
    model: RadialModel,
    #[arg(long, default_value = "right2")]
    stencil: DifferenceStencil,
}

impl MuArgs {
    fn poly(&self) -> Result<beltrami::PolyDifferential> {
        match self.mu.load()? {
            LoadedMu::Poly(p) => {
                if let Some(r) = self.radius {
                    if (r - p.support_radius()).abs() > 1e-12 * r {
                        return Err(Error::Config(format!(
                            "benchmarks use the polynomial's own support radius {}, got --radius {r}",
                            p.support_radius()
                        )));
                    }
                }
                Ok(p)
            }
            LoadedMu::Grid(_) => Err(Error::SchemeMismatch("benchmarks need a polynomial coefficient".into())),
        }
    }

    fn setup(&self, init: InitialCondition) -> Result<BenchSetup> {
        let mut setup = BenchSetup::new(self.poly()?);
        setup.outer_factor = self.outer_factor;
        setup.model = self.model;
        setup.stencil = self.stencil.clone();
        setup.initial_condition = init;
        Ok(setup)
    }

    fn input(&self, dims: Option<&str>) -> Result<MuInput> {
        match self.mu.load()? {
            LoadedMu::Grid(g) => {
                if dims.is_some() || self.radius.is_some() {
                    return Err(Error::Config("a grid-function coefficient fixes its own grid; drop --grid/--radius".into()));
                }
                Ok(MuInput::Grid(g))
            }
            LoadedMu::Poly(poly) => {
                let (n, m) = bench::parse_grid_dims(dims.unwrap_or("500x256"))?;
                let r = self.radius.unwrap_or(poly.support_radius());
                if r < poly.support_radius() * (1.0 - 1e-12) {
                    return Err(Error::Config(format!(
                        "--radius {r} cuts off the coefficient's support radius {}",
                        poly.support_radius()
                    )));
                }
                let grid = Arc::new(PolarGrid::build(n, m, r, self.outer_factor)?);
                Ok(MuInput::Poly { poly, grid })
            }
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    mu: MuArgs,
    /// `NxM` (polynomial coefficients only).
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value = "1")]
    scheme: Scheme,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value = "mu")]
    init: InitialCondition,
    /// Also write the solution h here.
    #[arg(long)]
    field_out: Option<PathBuf>,
    /// Also write the map f = P[mu (h + 1)] + z here and report its residual.
    #[arg(long)]
    map_out: Option<PathBuf>,
    /// Report JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    mu: MuArgs,
    #[arg(long, default_value = "500x512")]
    grid: String,
    /// Comma-separated scheme list.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    schemes: Vec<Scheme>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,50")]
    checkpoints: Vec<usize>,
    #[arg(long, default_value = "tmu")]
    init: InitialCondition,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TimeArgs {
    #[command(flatten)]
    mu: MuArgs,
    #[arg(long, default_value = "500x256,1000x512")]
    grids: String,
    /// Append the 5000x1024 and 7000x2048 grids.
    #[arg(long)]
    full: bool,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    schemes: Vec<Scheme>,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value = "tmu")]
    init: InitialCondition,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AccuracyArgs {
    #[command(flatten)]
    mu: MuArgs,
    #[arg(long, default_value = "500x256,1000x512")]
    grids: String,
    #[arg(long, default_value_t = 10)]
    iters: usize,
    #[arg(long, default_value = "tmu")]
    init: InitialCondition,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct OracleArgs {
    /// Monomials `p,q` separated by `;`, e.g. `0,0;1,2`.
    #[arg(long, default_value = "0,0;1,0;0,1;2,1;1,2;2,2")]
    pq: String,
    /// Points `re,im` separated by `;`. Overrides --count.
    #[arg(long)]
    points: Option<String>,
    /// Interior and exterior points each, when --points is absent.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Draw the points at random instead of on fixed spirals.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

fn pairs<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<(T, T)>> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let bad = || Error::Config(format!("bad {what} '{t}'"));
            let (a, b) = t.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_grid(f: &GridFunction, output: &Output) -> Result<()> {
    let text = match output.format() {
        FileFormat::Csv => io::write_csv(f)?,
        FileFormat::Json => io::write_json(f)?,
    };
    output.emit(&text)
}

fn transform(args: TransformArgs) -> Result<()> {
    let h = io::read_grid_function(&args.input)?;
    let out = match args.op {
        Op::Hilbert => transform_scheme1(&h, args.model)?,
        Op::Cauchy => {
            let p = cauchy_coefficients(&analyze(&h), args.model)?;
            if args.normalize {
                p.normalize_at_origin().evaluate_potential()
            } else {
                p.evaluate_potential()
            }
        }
        Op::Dz => dz(&h, &args.stencil),
        Op::Dzbar => dzbar(&h, &args.stencil),
    };
    emit_grid(&out, &args.output)
}

#[derive(Serialize)]
struct SolveOutput {
    #[serde(flatten)]
    report: beltrami::IterationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

fn solve(args: SolveArgs) -> Result<()> {
    let mu = args.mu.input(args.grid.as_deref())?;
    let cfg = SolveConfig {
        scheme: args.scheme,
        model: args.mu.model,
        max_iterations: args.iters,
        tolerance: args.tol,
        initial_condition: args.init,
        stencil: args.mu.stencil.clone(),
        ..SolveConfig::default()
    };
    let (h, report) = iterate(&mu, &cfg)?;
    if let Some(path) = &args.field_out {
        io::write_grid_function(path, &h, FileFormat::from_path(path))?;
    }
    let mut res = None;
    if let Some(path) = &args.map_out {
        let mu_grid = mu.sampled();
        let f = assemble_map(&mu_grid, &h, args.mu.model)?;
        res = Some(residual(&f, &mu_grid, &args.mu.stencil)?);
        io::write_grid_function(path, &f, FileFormat::from_path(path))?;
    }
    write_json(&SolveOutput { report, residual: res }, args.out.as_deref())
}

fn emit_report<T: Serialize>(value: &T, csv: String, output: &Output) -> Result<()> {
    match output.format() {
        FileFormat::Csv => output.emit(&csv),
        FileFormat::Json => output.emit(&(serde_json::to_string_pretty(value)? + "\n")),
    }
}

fn bench_convergence(args: ConvergenceArgs) -> Result<()> {
    let (n, m) = bench::parse_grid_dims(&args.grid)?;
    let report = bench::convergence(&args.mu.setup(args.init)?, n, m, &args.schemes, &args.checkpoints)?;
    emit_report(&report, report.to_csv(), &args.output)
}

fn bench_time(args: TimeArgs) -> Result<()> {
    let mut grids = bench::parse_grid_list(&args.grids)?;
    if args.full {
        grids.extend([(5000, 1024), (7000, 2048)]);
    }
    let report = bench::timing(&args.mu.setup(args.init)?, &grids, &args.schemes, args.iters, args.runs)?;
    emit_report(&report, report.to_csv(), &args.output)
}

fn bench_accuracy(args: AccuracyArgs) -> Result<()> {
    let grids = bench::parse_grid_list(&args.grids)?;
    let report = bench::accuracy(&args.mu.setup(args.init)?, &grids, args.iters)?;
    emit_report(&report, report.to_csv(), &args.output)
}

/// Returns whether every row agreed.
fn oracle_check(args: OracleArgs) -> Result<bool> {
    let monomials: Vec<(u32, u32)> = pairs(&args.pq, "monomial")?;
    let points: Vec<Complex64> = match (&args.points, args.seed) {
        (Some(list), _) => pairs::<f64>(list, "point")?
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = args.radius;
            let mut draw = |lo: f64, hi: f64| Complex64::from_polar(r * rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU));
            let inside: Vec<_> = (0..args.count).map(|_| draw(0.05, 0.9)).collect();
            let outside: Vec<_> = (0..args.count).map(|_| draw(1.1, 3.0)).collect();
            inside.into_iter().chain(outside).collect()
        }
        (None, None) => {
            let (inside, outside) = bench::oracle_points(args.count, args.radius);
            inside.into_iter().chain(outside).collect()
        }
    };
    let report = bench::oracle_check(&monomials, &points, args.radius)?;
    emit_report(&report, report.to_csv(), &args.output)?;
    if !report.all_agree() {
        eprintln!(
            "{} of {} points disagree beyond the oracle error (worst discrepancy {:e})",
            report.rows.iter().filter(|r| !r.agrees).count(),
            report.rows.len(),
            report.worst_discrepancy()
        );
    }
    Ok(report.all_agree())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Transform(a) => transform(a).map(|_| true),
        Command::Solve(a) => solve(a).map(|_| true),
        Command::BenchConvergence(a) => bench_convergence(a).map(|_| true),
        Command::BenchTime(a) => bench_time(a).map(|_| true),
        Command::BenchAccuracy(a) => bench_accuracy(a).map(|_| true),
        Command::OracleCheck(a) => oracle_check(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
