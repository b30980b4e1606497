//! Fast Hilbert (Beurling) and Cauchy transforms on polar grids, and a
//! fixed-point solver for the Beltrami equation `f_zbar = mu f_z` built on them.

pub mod bench;
pub mod cauchy;
pub mod derivative;
pub mod error;
pub mod exact;
pub mod grid;
pub mod hilbert;
pub mod io;
mod radial;
pub mod solver;

pub use cauchy::{cauchy_coefficients, cauchy_coefficients_direct, CauchyCoefficients};
pub use derivative::{dz, dz_coefficients, dzbar, dzbar_coefficients, DifferenceStencil};
pub use error::{Error, Result};
pub use exact::{
    monomial_hilbert, poly_hilbert, quartic_mu, scheme3_iterate, singular_quadrature_oracle, InitialCondition,
    LaurentTail, OracleEstimate, PolyDifferential,
};
pub use grid::{analyze, pointwise_product, sup_distance, synthesize, CoefficientTable, GridFunction, PolarGrid};
pub use hilbert::{hilbert_coefficients_direct, hilbert_coefficients_recursive, transform_scheme1};
pub use radial::RadialModel;
pub use solver::{assemble_map, iterate, residual, IterationReport, MuInput, Scheme, SolveConfig, Termination};
