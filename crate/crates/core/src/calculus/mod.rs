//! Shared numeric utilities: dense polynomials, simultaneous root finding,
//! low-discrepancy seeds, dyadic boxes, small complex linear algebra and
//! reproducible random streams.

pub mod boxes;
pub mod linalg;
pub mod poly;
pub mod rng;
pub mod roots;
pub mod seeds;

pub use boxes::{Rect, Region};
pub use poly::DensePolynomial;
pub use roots::{all_roots, NewtonCorrection, NewtonRatio, Root, RootConfig, RootSet};

/// Radius below which two root approximations always count as one point.
///
/// Used for deduplication of Newton solutions and for matching root
/// multisets in tests; multiplicity detection itself uses inclusion disks
/// (see [`roots`]).
pub const CLUSTER_RADIUS: f64 = 1e-7;
