//! Exact transforms of polynomial differentials on a disk.
//!
//! For the monomial `z^p zbar^q` restricted to `|z| <= R`:
//!
//! ```text
//! T[z^p zbar^q chi](z) = p/(q+1) eta(R-|z|) z^{p-1} zbar^{q+1}
//!                      + [eta(q+1-p) - eta(R-|z|)] (p-q-1)/(q+1) R^{2(q+1)} z^{p-q-2}
//! ```
//!
//! with the Heaviside step `eta(0) = 1`. Everything here is exact up to
//! rounding, which makes it the reference for the grid schemes.

mod oracle;
mod poly;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use oracle::{singular_quadrature_oracle, default_eps_list, OracleEstimate};
pub use poly::{sample_split, LaurentTail, PolyDifferential};

/// Default bound on the number of terms Scheme 3 may carry.
pub const DEFAULT_TERM_CEILING: usize = 100_000;

/// Starting point `h^0` of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialCondition {
    Zero,
    #[default]
    Mu,
    /// `h^0 = T[mu]`, i.e. one step taken from zero.
    #[serde(rename = "tmu")]
    TransformedMu,
}

impl std::str::FromStr for InitialCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Self::Zero),
            "mu" => Ok(Self::Mu),
            "tmu" => Ok(Self::TransformedMu),
            other => Err(format!("unknown initial condition '{other}' (expected zero|mu|tmu)")),
        }
    }
}

fn on_closed_disk(z: Complex64, radius: f64) -> bool {
    z.norm() <= radius
}

/// `T[z^p zbar^q chi_{B(0,R)}](z)`.
pub fn monomial_hilbert(p: u32, q: u32, radius: f64, z: Complex64) -> Result<Complex64> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Domain(format!("support radius must be positive, got {radius}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite point {z}")));
    }
    let inside = on_closed_disk(z, radius);
    let (pf, qf) = (p as f64, q as f64);
    let mut value = Complex64::default();
    if inside && p > 0 {
        value += pf / (qf + 1.0) * z.powu(p - 1) * z.conj().powu(q + 1);
    }
    let switch = (q + 1 >= p) as i32 - inside as i32;
    if switch != 0 && p != q + 1 {
        let power = p as i64 - q as i64 - 2;
        if power < 0 && z == Complex64::default() {
            return Err(Error::Domain(format!("z^{power} is singular at the origin")));
        }
        let scale = switch as f64 * (pf - qf - 1.0) / (qf + 1.0) * radius.powi(2 * (q as i32 + 1));
        value += scale * z.powi(power as i32);
    }
    Ok(value)
}

/// Termwise transform: the polynomial part valid on the closed disk and the
/// Laurent tail valid outside it.
pub fn poly_hilbert(h: &PolyDifferential) -> (PolyDifferential, LaurentTail) {
    let radius = h.support_radius();
    let mut inside = PolyDifferential::zero(radius).expect("radius validated on construction");
    let mut outside = LaurentTail::default();
    for ((p, q), a) in h.terms() {
        let (pf, qf) = (p as f64, q as f64);
        if p > 0 {
            inside.add_term(p - 1, q + 1, a * (pf / (qf + 1.0)));
        }
        if p == q + 1 {
            continue;
        }
        let scale = (pf - qf - 1.0) / (qf + 1.0) * radius.powi(2 * (q as i32 + 1));
        if p >= q + 2 {
            // eta(q+1-p) = 0, eta(R-|z|) = 1
            inside.add_term(p - q - 2, 0, a * -scale);
        } else {
            // p <= q: eta(q+1-p) = 1, eta(R-|z|) = 0 outside
            outside.add_term(q + 2 - p, a * scale);
        }
    }
    (inside, outside)
}

/// `mu = a - (a/s^2)|z|^2 + (a/(4 s^4))|z|^4` on `|z| <= sqrt(2) s`.
pub fn quartic_mu(a: f64, s: f64) -> Result<PolyDifferential> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("amplitude a must be positive, got {a}")));
    }
    if a >= 1.0 {
        return Err(Error::NotContracting(a));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::Domain(format!("scale s must be positive, got {s}")));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    PolyDifferential::from_terms(
        2f64.sqrt() * s,
        [
            ((0, 0), c(a)),
            ((1, 1), c(-a / (s * s))),
            ((2, 2), c(a / (4.0 * s.powi(4)))),
        ],
    )
}

/// One step `h -> T[mu (h + 1)]`, returning both the interior polynomial and
/// the exterior tail.
pub fn scheme3_step(mu: &PolyDifferential, h: &PolyDifferential) -> Result<(PolyDifferential, LaurentTail)> {
    let g = mu.mul(h).add(mu)?;
    Ok(poly_hilbert(&g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scheme3Output {
    pub h: PolyDifferential,
    /// Exterior part of `h`; empty unless `h` came from a transform.
    pub tail: LaurentTail,
}

/// `h^0` and its exterior tail.
pub(crate) fn scheme3_start(mu: &PolyDifferential, init: InitialCondition) -> Result<(PolyDifferential, LaurentTail)> {
    let zero = PolyDifferential::zero(mu.support_radius())?;
    Ok(match init {
        InitialCondition::Zero => (zero, LaurentTail::default()),
        InitialCondition::Mu => (mu.clone(), LaurentTail::default()),
        InitialCondition::TransformedMu => scheme3_step(mu, &zero)?,
    })
}

/// `n` exact steps from `init`, failing once a step exceeds `term_ceiling` terms.
pub fn scheme3_iterate(
    mu: &PolyDifferential,
    n: usize,
    init: InitialCondition,
    term_ceiling: usize,
) -> Result<Scheme3Output> {
    let (mut h, mut tail) = scheme3_start(mu, init)?;
    for _ in 0..n {
        let (next, next_tail) = scheme3_step(mu, &h)?;
        if next.term_count() > term_ceiling {
            return Err(Error::TermCeiling {
                count: next.term_count(),
                ceiling: term_ceiling,
            });
        }
        h = next;
        tail = next_tail;
    }
    Ok(Scheme3Output { h, tail })
}
