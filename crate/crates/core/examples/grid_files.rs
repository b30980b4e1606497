//! Writes a grid function as CSV and JSON and reads it back.

use std::sync::Arc;

use beltrami::io::{read_grid_function, write_grid_function, FileFormat};
use beltrami::{GridFunction, PolarGrid};

fn main() -> beltrami::Result<()> {
    let grid = Arc::new(PolarGrid::canonical(21, 8, 1.0, 14)?);
    let f = GridFunction::from_fn(grid, |z| z.exp());
    let dir = std::env::temp_dir();
    for (name, format) in [("grid.csv", FileFormat::Csv), ("grid.json", FileFormat::Json)] {
        let path = dir.join(name);
        write_grid_function(&path, &f, format)?;
        let back = read_grid_function(&path)?;
        println!("{}: {} bytes, exact roundtrip {}", path.display(), std::fs::metadata(&path)?.len(), back.values() == f.values());
    }
    Ok(())
}
