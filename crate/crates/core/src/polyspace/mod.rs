//! Polynomials in monomial coefficients and the spaces built from them.

mod multi_index;
mod polynomial;
mod spaces;

pub use multi_index::MultiIndex;
pub use polynomial::{Polynomial, VectorPolynomial};
pub use spaces::{
    basis, bdm_space_basis, homogeneous_tangential_basis, monomial_basis, nedelec_basis,
    prism_pairs_basis, BasisMembers, BasisSet, SpaceSpec,
};
