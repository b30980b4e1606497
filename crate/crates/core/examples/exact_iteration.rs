//! Exact polynomial iteration, the reference the grid schemes are compared to.

use beltrami::{quartic_mu, scheme3_iterate, InitialCondition};
use num_complex::Complex64;

fn main() -> beltrami::Result<()> {
    let mu = quartic_mu(0.5, 1.0)?;
    for n in [1, 5, 10] {
        let out = scheme3_iterate(&mu, n, InitialCondition::Mu, 5000)?;
        let z = Complex64::new(0.4, 0.2);
        println!("{n:>2} steps: {} terms, h({z}) = {:.10}", out.h.term_count(), out.h.eval(z));
    }
    Ok(())
}
