//! Numerical toolkit for mixed p-affine surface areas of convex bodies.
//!
//! The crate evaluates L_p and mixed p-affine surface areas, dual mixed
//! volumes and their i-th mixed variants by quadrature on the sphere,
//! checks the associated Alexandrov-Fenchel, isoperimetric and
//! Blaschke-Santaló type inequalities numerically, and constructs
//! illumination surface bodies together with the volume limit that
//! recovers these functionals.

pub mod bodies;
pub mod error;
pub mod functionals;
pub mod illumination;
pub mod inequality;
pub mod numeric;
pub mod quadrature;

pub use bodies::{BodyModel, BoundaryPoint, Direction};
pub use error::{GeometryError, Result};
pub use functionals::{Exponent, FunctionalValue};
pub use quadrature::QuadratureRule;
