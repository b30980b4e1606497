//! Cauchy potential of `chi_D`, normalized to vanish at the origin.

use std::sync::Arc;

use beltrami::{analyze, cauchy_coefficients, GridFunction, PolarGrid, RadialModel};
use num_complex::Complex64;

fn main() -> beltrami::Result<()> {
    let grid = Arc::new(PolarGrid::build(401, 32, 1.0, 2.0)?);
    let h = GridFunction::from_fn_supported(grid.clone(), |_| Complex64::new(1.0, 0.0));
    let raw = cauchy_coefficients(&analyze(&h), RadialModel::Linear)?;
    println!("unnormalized value at the origin: {:.6}", raw.origin_value);

    // P[chi_D] is zbar inside the disk and 1/z outside.
    let p = raw.normalize_at_origin().evaluate_potential();
    let mut worst = 0.0f64;
    for i in 0..grid.n_radii() {
        for j in 0..grid.n_angles() {
            let z = grid.node(i, j);
            let exact = if z.norm() <= 1.0 { z.conj() } else { 1.0 / z };
            worst = worst.max((p.get(i, j) - exact).norm());
        }
    }
    println!("sup error against zbar / 1/z: {worst:.2e}");
    Ok(())
}
