//! Brezzi–Douglas–Marini (BDM) interpolation on anisotropic triangles,
//! tetrahedra and triangular prisms.
//!
//! The crate is organised bottom-up:
//!
//! - [`polyspace`]: multivariate polynomials and the polynomial spaces used by
//!   the element (total degree, tensor degree, prism-graded, Nédélec, BDM).
//! - [`quadrature`]: Gauss-type rules with declared exactness on the interval,
//!   square, triangle, tetrahedron and prism.
//! - [`geometry`]: reference elements, affine maps, anisotropic element
//!   families and the maximum-angle / regular-vertex checks.
//! - [`fields`]: analytic vector fields with exact partial derivatives.
//! - [`interpolation`]: the BDM degrees of freedom, the interpolation operator
//!   and the commuting-diagram diagnostic.
//! - [`analysis`]: L^p norms, anisotropic seminorms, the right-hand sides of the
//!   anisotropic error and stability estimates, and rate fitting.
//! - [`experiment`]: reproducible batch studies that write CSV/JSON output.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod field;
pub mod fields;
pub mod geometry;
pub mod interpolation;
pub mod polyspace;
pub mod quadrature;

pub use error::{Error, Result};
pub use field::VectorField;
