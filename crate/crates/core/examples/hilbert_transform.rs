//! Hilbert transform of `z^p zbar^q` on the unit disk, recursive and direct.

use std::sync::Arc;

use beltrami::{
    analyze, hilbert_coefficients_direct, hilbert_coefficients_recursive, monomial_hilbert, transform_scheme1,
    GridFunction, PolarGrid, RadialModel,
};
use num_complex::Complex64;

fn main() -> beltrami::Result<()> {
    let (p, q) = (2, 1);
    let grid = Arc::new(PolarGrid::build(500, 256, 1.0, 1.0)?);
    let h = GridFunction::from_fn_supported(grid.clone(), |z| z.powu(p) * z.conj().powu(q));

    let t = transform_scheme1(&h, RadialModel::Linear)?;
    let mut worst = 0.0f64;
    for i in 0..grid.support_index() - 1 {
        for j in 0..grid.n_angles() {
            let exact = monomial_hilbert(p, q, 1.0, grid.node(i, j))?;
            worst = worst.max((t.get(i, j) - exact).norm());
        }
    }
    println!("T[z^{p} zbar^{q}]: sup error {worst:.2e} on interior radii");

    let small = Arc::new(PolarGrid::build(81, 32, 1.0, 1.5)?);
    let coeffs = analyze(&GridFunction::from_fn_supported(small, |z| z.powu(p) * z.conj().powu(q)));
    let fast = hilbert_coefficients_recursive(&coeffs, RadialModel::Linear)?;
    let slow = hilbert_coefficients_direct(&coeffs, RadialModel::Linear)?;
    println!("recursive vs direct coefficients: {:.2e}", fast.sup_distance(&slow)?);

    let z = Complex64::new(0.3, 0.4);
    println!("exact T at {z}: {:.6}", monomial_hilbert(p, q, 1.0, z)?);
    Ok(())
}
