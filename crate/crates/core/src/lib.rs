//! Numerical laboratory for bifurcation currents of critically marked
//! polynomial families.
//!
//! The crate is organised bottom-up:
//!
//! * [`calculus`] : dense polynomials, simultaneous root finding, seed
//!   sequences, dyadic boxes and seeded random streams.
//! * [`family`] : critically marked families, their iterates and
//!   parameter jets.
//! * [`potential`] : Green functions, activity potentials and discrete
//!   `dd^c` / wedge masses on parameter grids.
//! * [`misiurewicz`] : Newton solving and certification of parameters where
//!   critical points fall onto repelling cycles.
//! * [`hyperset`] : two-branch hyperbolic Cantor sets, their balanced
//!   measures and holomorphic motions.
//! * [`equidist`] : solution clouds of `f^n(c(λ)) = a` and their
//!   discrepancy against the bifurcation measure.
//! * [`io`] : CSV, PGM and JSON Lines writers shared by all of the above.

pub mod calculus;
pub mod equidist;
pub mod error;
pub mod family;
pub mod hyperset;
pub mod io;
pub mod misiurewicz;
pub mod potential;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
