use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, PolarGrid};

/// Relative slack when deciding whether a node lies on the closed support disk.
const DISK_SLACK: f64 = 4.0 * f64::EPSILON;

/// `sum a_pq z^p zbar^q` on the closed disk `|z| <= R`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDifferential {
    support_radius: f64,
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl PolyDifferential {
    pub fn zero(support_radius: f64) -> Result<Self> {
        if !(support_radius.is_finite() && support_radius > 0.0) {
            return Err(Error::Domain(format!(
                "support radius must be positive, got {support_radius}"
            )));
        }
        Ok(Self {
            support_radius,
            terms: BTreeMap::new(),
        })
    }

    pub fn from_terms(
        support_radius: f64,
        terms: impl IntoIterator<Item = ((u32, u32), Complex64)>,
    ) -> Result<Self> {
        let mut out = Self::zero(support_radius)?;
        for (pq, a) in terms {
            out.add_term(pq.0, pq.1, a);
        }
        Ok(out)
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(&pq, &a)| (pq, a))
    }

    pub fn coefficient(&self, p: u32, q: u32) -> Complex64 {
        self.terms.get(&(p, q)).copied().unwrap_or_default()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree `max(p + q)`, or 0 for the empty polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(p, q)| p + q).max().unwrap_or(0)
    }

    /// Adds `a z^p zbar^q`, dropping the term if it cancels to exactly zero.
    pub fn add_term(&mut self, p: u32, q: u32, a: Complex64) {
        if a == Complex64::default() {
            return;
        }
        let entry = self.terms.entry((p, q)).or_default();
        *entry += a;
        if *entry == Complex64::default() {
            self.terms.remove(&(p, q));
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self {
            support_radius: self.support_radius,
            terms: BTreeMap::new(),
        };
        for (&(p, q), &a) in &self.terms {
            out.add_term(p, q, a * s);
        }
        out
    }

    /// Sum of two differentials on the same disk.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.support_radius != other.support_radius {
            return Err(Error::Domain(format!(
                "cannot add polynomials supported on radii {} and {}",
                self.support_radius, other.support_radius
            )));
        }
        let mut out = self.clone();
        for (&(p, q), &a) in &other.terms {
            out.add_term(p, q, a);
        }
        Ok(out)
    }

    /// Product; the support is the smaller of the two disks.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self {
            support_radius: self.support_radius.min(other.support_radius),
            terms: BTreeMap::new(),
        };
        for (&(p1, q1), &a) in &self.terms {
            for (&(p2, q2), &b) in &other.terms {
                out.add_term(p1 + p2, q1 + q2, a * b);
            }
        }
        out
    }

    /// The polynomial itself, ignoring the support cutoff.
    pub fn eval_polynomial(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|(&(p, q), &a)| a * z.powu(p) * zb.powu(q))
            .sum()
    }

    /// Value of the differential: the polynomial on the closed disk, 0 outside.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if z.norm() <= self.support_radius * (1.0 + DISK_SLACK) {
            self.eval_polynomial(z)
        } else {
            Complex64::default()
        }
    }

    /// Samples the differential on `grid`; the exterior is zero.
    pub fn sample(&self, grid: Arc<PolarGrid>) -> GridFunction {
        sample_split(self, &LaurentTail::default(), grid)
    }
}

/// Exterior expansion `sum c_n z^{-n}`, `n >= 1`, valid for `|z| > R`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LaurentTail {
    terms: BTreeMap<u32, Complex64>,
}

impl LaurentTail {
    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.terms.iter().map(|(&n, &c)| (n, c))
    }

    pub fn coefficient(&self, n: u32) -> Complex64 {
        self.terms.get(&n).copied().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, n: u32, c: Complex64) {
        assert!(n >= 1, "Laurent tail powers start at z^-1");
        if c == Complex64::default() {
            return;
        }
        let entry = self.terms.entry(n).or_default();
        *entry += c;
        if *entry == Complex64::default() {
            self.terms.remove(&n);
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z.inv();
        self.terms.iter().map(|(&n, &c)| c * w.powu(n)).sum()
    }
}

/// Samples a function given by `inside` on the closed disk and `outside`
/// beyond it.
pub fn sample_split(inside: &PolyDifferential, outside: &LaurentTail, grid: Arc<PolarGrid>) -> GridFunction {
    let m = grid.n_angles();
    let radius = inside.support_radius;
    // Group terms by angular harmonic so each node costs one sum per harmonic.
    let mut by_harmonic: BTreeMap<i64, Vec<(i32, Complex64)>> = BTreeMap::new();
    for (&(p, q), &a) in &inside.terms {
        by_harmonic
            .entry(p as i64 - q as i64)
            .or_default()
            .push(((p + q) as i32, a));
    }
    let mut tail_by_harmonic: Vec<(i64, i32, Complex64)> = Vec::new();
    for (&n, &c) in &outside.terms {
        tail_by_harmonic.push((-(n as i64), -(n as i32), c));
    }

    let mut values = vec![Complex64::default(); grid.n_radii() * m];
    for (i, &r) in grid.radii().iter().enumerate() {
        let row = &mut values[i * m..(i + 1) * m];
        let profiles: Vec<(i64, Complex64)> = if r <= radius * (1.0 + DISK_SLACK) {
            by_harmonic
                .iter()
                .map(|(&d, terms)| (d, terms.iter().map(|&(e, a)| a * r.powi(e)).sum()))
                .collect()
        } else {
            tail_by_harmonic
                .iter()
                .map(|&(d, e, c)| (d, c * r.powi(e)))
                .collect()
        };
        for (j, v) in row.iter_mut().enumerate() {
            let theta = grid.angle(j);
            *v = profiles
                .iter()
                .map(|&(d, g)| g * Complex64::from_polar(1.0, d as f64 * theta))
                .sum();
        }
    }
    GridFunction::from_values(grid, values).expect("sized to grid")
}

#[derive(Serialize, Deserialize)]
struct PolyFile {
    #[serde(rename = "R")]
    r: f64,
    terms: Vec<(u32, u32, f64, f64)>,
}

impl PolyDifferential {
    /// `{"R": .., "terms": [[p, q, re, im], ...]}`
    pub fn to_json(&self) -> Result<String> {
        let file = PolyFile {
            r: self.support_radius,
            terms: self.terms().map(|((p, q), a)| (p, q, a.re, a.im)).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolyFile = serde_json::from_str(text)?;
        Self::from_terms(
            file.r,
            file.terms
                .into_iter()
                .map(|(p, q, re, im)| ((p, q), Complex64::new(re, im))),
        )
    }
}
