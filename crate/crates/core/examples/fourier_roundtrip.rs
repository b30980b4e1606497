//! Angular Fourier analysis and synthesis on a polar grid.

use std::sync::Arc;

use beltrami::{analyze, synthesize, GridFunction, PolarGrid};
use num_complex::Complex64;

fn main() -> beltrami::Result<()> {
    let grid = Arc::new(PolarGrid::build(101, 64, 1.0, 1.0)?);
    let f = GridFunction::from_fn(grid.clone(), |z| z * z * z.conj() + Complex64::new(0.5, 0.0));
    let coeffs = analyze(&f);

    // z^2 zbar = r^3 e^{i theta}: harmonic 1 carries r^3, harmonic 0 the constant.
    let i = 50;
    let r = grid.radii()[i];
    println!("r = {r:.3}: h_1 = {:.6}, r^3 = {:.6}", coeffs.get(i, 1), r.powi(3));
    println!("h_0 = {:.6}", coeffs.get(i, 0));

    let back = synthesize(&coeffs);
    println!("roundtrip error = {:.2e}", back.linear_combination(1.0.into(), &f, (-1.0).into())?.sup_norm());
    Ok(())
}
