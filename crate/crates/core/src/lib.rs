//! Exact computations for spectral invariants of symmetric-product Lagrangian
//! links: Novikov-field arithmetic, critical points of disc potentials by adic
//! lifting, Clifford traces, idempotents of `QH(P¹)^{⊗k}` and action spectra.

pub mod cliffordtrace;
pub mod critlift;
pub mod error;
pub mod harness;
pub mod laurent;
pub mod linkfam;
pub mod matrix;
pub mod novikov;
pub mod qpoly;
pub mod spectrum;
pub mod symprodqh;

pub use error::{Error, ErrorKind, Result};
pub use laurent::{LaurentPotential, Monomial, UnitaryPoint};
pub use novikov::{parse_rational, rat, Exponent, NovikovSeries, Precision, Rational, Valuation};
