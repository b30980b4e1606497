//! Convergence, accuracy and timing of the grid schemes on a small grid.

use beltrami::bench::{accuracy, convergence, timing, BenchSetup};
use beltrami::{quartic_mu, Scheme};

fn main() -> beltrami::Result<()> {
    let setup = BenchSetup::new(quartic_mu(0.5, 1.0)?);
    let schemes = [Scheme::Scheme1, Scheme::Scheme2];

    let conv = convergence(&setup, 200, 128, &schemes, &[5, 10, 20])?;
    print!("{}", conv.to_csv());

    let acc = accuracy(&setup, &[(200, 128)], 10)?;
    print!("{}", acc.to_csv());

    let times = timing(&setup, &[(200, 128), (400, 256)], &schemes, 5, 3)?;
    print!("{}", times.to_csv());
    Ok(())
}
