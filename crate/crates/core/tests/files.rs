use std::sync::Arc;

use beltrami::io::{read_grid_function, write_grid_function, FileFormat};
use beltrami::{Error, GridFunction, PolarGrid};
use num_complex::Complex64;

#[test]
fn roundtrip_through_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Arc::new(PolarGrid::canonical(31, 8, 2.0, 20).unwrap());
    let f = GridFunction::from_fn(grid, |z| z.sin() + Complex64::new(0.0, 1.0 / 7.0));
    for (name, format) in [("f.csv", FileFormat::Csv), ("f.json", FileFormat::Json)] {
        let path = dir.path().join(name);
        write_grid_function(&path, &f, format).unwrap();
        let back = read_grid_function(&path).unwrap();
        assert_eq!(back.values(), f.values(), "{name}");
        assert_eq!(**back.grid(), **f.grid(), "{name}");
    }
}

#[test]
fn missing_and_truncated_files_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(read_grid_function(&dir.path().join("absent.csv")).is_err());
    let path = dir.path().join("short.csv");
    std::fs::write(&path, "3,4,1.0,3\n0,0,1,0\n").unwrap();
    match read_grid_function(&path) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}
