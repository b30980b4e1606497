//! Finite-difference Wirtinger derivatives in polar form.

use std::sync::Arc;

use beltrami::{dz, dzbar, DifferenceStencil, GridFunction, PolarGrid};

fn main() -> beltrami::Result<()> {
    let grid = Arc::new(PolarGrid::build(401, 32, 1.0, 1.0)?);
    let f = GridFunction::from_fn(grid.clone(), |z| z * z * z.conj());
    for stencil in [DifferenceStencil::RightTwoPoint, DifferenceStencil::Central] {
        let (a, b) = (dz(&f, &stencil), dzbar(&f, &stencil));
        let mut err = (0.0f64, 0.0f64);
        for i in 0..grid.n_radii() {
            for j in 0..grid.n_angles() {
                let z = grid.node(i, j);
                err.0 = err.0.max((a.get(i, j) - 2.0 * z * z.conj()).norm());
                err.1 = err.1.max((b.get(i, j) - z * z).norm());
            }
        }
        println!("{stencil:?}: d/dz error {:.2e}, d/dzbar error {:.2e}", err.0, err.1);
    }
    Ok(())
}
