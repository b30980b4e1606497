//! Grid-function files.
//!
//! CSV: a header line `N,M,R,L` followed by `N*M` lines `i,j,re,im` in
//! row-major order, with zero-based `i` and `j`. `L` counts the radii in
//! `[0, R]`, so the grid is rebuilt as `N` radii spaced `R/(L-1)`.
//!
//! JSON carries the same fields plus the explicit radii, so it also covers
//! grids whose spacing is not uniform:
//! `{"N":..,"M":..,"R":..,"L":..,"radii":[..],"data":[[i,j,re,im],..]}`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, PolarGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FileFormat {
    #[default]
    Csv,
    Json,
}

impl FileFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => FileFormat::Json,
            _ => FileFormat::Csv,
        }
    }
}

impl FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format '{other}' (expected csv|json)")),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: FromStr>(raw: &str, name: &str, line: usize) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("cannot read {name} from '{}'", raw.trim())))
}

fn finite(v: f64, name: &str, line: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("{name} is not finite")))
    }
}

pub fn write_csv(f: &GridFunction) -> Result<String> {
    let grid = f.grid();
    if !grid.is_canonical_uniform() {
        return Err(Error::InvalidGrid(
            "CSV describes only uniform grids; write JSON for this grid".into(),
        ));
    }
    let (n, m) = (grid.n_radii(), grid.n_angles());
    let mut out = String::with_capacity(n * m * 48);
    writeln!(out, "{},{},{:?},{}", n, m, grid.support_radius(), grid.support_index() + 1).unwrap();
    for i in 0..n {
        for (j, v) in f.row(i).iter().enumerate() {
            writeln!(out, "{i},{j},{:?},{:?}", v.re, v.im).unwrap();
        }
    }
    Ok(out)
}

pub fn read_csv(text: &str) -> Result<GridFunction> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let parts: Vec<&str> = header.split(',').collect();
    if parts.len() != 4 {
        return Err(parse_err(1, format!("header needs 4 fields N,M,R,L, found {}", parts.len())));
    }
    let n: usize = field(parts[0], "N", 1)?;
    let m: usize = field(parts[1], "M", 1)?;
    let r = finite(field(parts[2], "R", 1)?, "R", 1)?;
    let l: usize = field(parts[3], "L", 1)?;
    if l < 2 || l > n {
        return Err(parse_err(1, format!("L = {l} must satisfy 1 < L <= N = {n}")));
    }
    let grid = PolarGrid::canonical(n, m, r, l - 1).map_err(|e| parse_err(1, e.to_string()))?;

    let mut values = Vec::with_capacity(n * m);
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            if values.len() == n * m {
                continue;
            }
            return Err(parse_err(line, "blank line inside data"));
        }
        let expect = values.len();
        if expect == n * m {
            return Err(parse_err(line, format!("more than N*M = {} data lines", n * m)));
        }
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() != 4 {
            return Err(parse_err(line, format!("expected i,j,re,im, found {} fields", parts.len())));
        }
        let i: usize = field(parts[0], "i", line)?;
        let j: usize = field(parts[1], "j", line)?;
        if (i, j) != (expect / m, expect % m) {
            return Err(parse_err(
                line,
                format!("expected node ({}, {}) in row-major order, found ({i}, {j})", expect / m, expect % m),
            ));
        }
        let re = finite(field(parts[2], "re", line)?, "re", line)?;
        let im = finite(field(parts[3], "im", line)?, "im", line)?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != n * m {
        return Err(parse_err(
            text.lines().count() + 1,
            format!("found {} data lines, expected N*M = {}", values.len(), n * m),
        ));
    }
    GridFunction::from_values(Arc::new(grid), values)
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "L")]
    l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radii: Option<Vec<f64>>,
    data: Vec<(usize, usize, f64, f64)>,
}

pub fn write_json(f: &GridFunction) -> Result<String> {
    let grid = f.grid();
    let m = grid.n_angles();
    let file = GridFile {
        n: grid.n_radii(),
        m,
        r: grid.support_radius(),
        l: grid.support_index() + 1,
        radii: Some(grid.radii().to_vec()),
        data: f
            .values()
            .iter()
            .enumerate()
            .map(|(k, v)| (k / m, k % m, v.re, v.im))
            .collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn read_json(text: &str) -> Result<GridFunction> {
    let file: GridFile = serde_json::from_str(text)?;
    let bad = |message: String| Error::InvalidGrid(message);
    if file.l < 2 || file.l > file.n {
        return Err(bad(format!("L = {} must satisfy 1 < L <= N = {}", file.l, file.n)));
    }
    let grid = match file.radii {
        Some(radii) => {
            if radii.len() != file.n {
                return Err(bad(format!("{} radii listed for N = {}", radii.len(), file.n)));
            }
            let at_l = radii[file.l - 1];
            if (at_l - file.r).abs() > 1e-12 * file.r.abs().max(1.0) {
                return Err(bad(format!("radius {at_l} at index L does not equal R = {}", file.r)));
            }
            PolarGrid::from_radii(radii, file.l - 1, file.m)?
        }
        None => PolarGrid::canonical(file.n, file.m, file.r, file.l - 1)?,
    };
    let (n, m) = (file.n, file.m);
    if file.data.len() != n * m {
        return Err(bad(format!("{} data entries, expected N*M = {}", file.data.len(), n * m)));
    }
    let mut values = Vec::with_capacity(n * m);
    for (k, &(i, j, re, im)) in file.data.iter().enumerate() {
        if (i, j) != (k / m, k % m) {
            return Err(bad(format!("data entry {k} is node ({i}, {j}), expected ({}, {})", k / m, k % m)));
        }
        if !(re.is_finite() && im.is_finite()) {
            return Err(bad(format!("data entry {k} is not finite")));
        }
        values.push(Complex64::new(re, im));
    }
    GridFunction::from_values(Arc::new(grid), values)
}

pub fn write_grid_function(path: &Path, f: &GridFunction, format: FileFormat) -> Result<()> {
    let text = match format {
        FileFormat::Csv => write_csv(f)?,
        FileFormat::Json => write_json(f)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads CSV or JSON, chosen by extension.
pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    let text = std::fs::read_to_string(path)?;
    match FileFormat::from_path(path) {
        FileFormat::Csv => read_csv(&text),
        FileFormat::Json => read_json(&text),
    }
}
