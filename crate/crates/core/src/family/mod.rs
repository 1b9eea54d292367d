//! Critically marked holomorphic families of polynomials.

pub mod jet;
pub mod map;
pub mod orbit;
pub mod param_poly;
pub mod spec;

pub use jet::{Jet, Partials};
pub use map::MapInstance;
pub use orbit::{cycle_multiplier, eval_map, orbit_jet, periodic_points, PeriodicPoint};
pub use param_poly::{ParamPolynomial, Term};
pub use spec::FamilySpec;
