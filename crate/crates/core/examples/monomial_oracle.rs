//! Closed-form transforms of monomials checked against direct quadrature.

use beltrami::bench::{oracle_check, oracle_points};

fn main() -> beltrami::Result<()> {
    let (inside, outside) = oracle_points(4, 1.0);
    let points: Vec<_> = inside.into_iter().chain(outside).collect();
    let report = oracle_check(&[(0, 0), (1, 0), (2, 1), (1, 2)], &points, 1.0)?;
    for row in &report.rows {
        println!(
            "p={} q={} z={:.3}: closed form {:.8}, quadrature {:.8}, gap {:.1e} (oracle error {:.1e})",
            row.p, row.q, row.z, row.exact, row.oracle, row.discrepancy, row.oracle_error
        );
    }
    println!("all agree: {}, worst gap {:.2e}", report.all_agree(), report.worst_discrepancy());
    Ok(())
}
