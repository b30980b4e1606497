//! Solves `f_zbar = mu f_z` for the quartic coefficient and checks the residual.

use std::sync::Arc;

use beltrami::{assemble_map, iterate, quartic_mu, residual, MuInput, PolarGrid, SolveConfig};

fn main() -> beltrami::Result<()> {
    let poly = quartic_mu(0.5, 1.0)?;
    let grid = Arc::new(PolarGrid::build(500, 256, poly.support_radius(), 1.0)?);
    let mu = MuInput::Poly { poly, grid };
    let cfg = SolveConfig {
        max_iterations: 60,
        ..SolveConfig::default()
    };
    let (h, report) = iterate(&mu, &cfg)?;
    println!("{:?} after {} steps, last delta {:.2e}", report.termination, report.final_n, report.deltas.last().unwrap());

    let mu_grid = mu.sampled();
    let f = assemble_map(&mu_grid, &h, cfg.model)?;
    println!("f(0) = {}", f.get(0, 0));
    println!("residual |f_zbar - mu f_z| = {:.2e}", residual(&f, &mu_grid, &cfg.stencil)?);
    Ok(())
}
