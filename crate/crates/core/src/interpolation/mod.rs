//! The BDM interpolation operator.
//!
//! On simplices the DOFs are normal moments against P_k on each facet plus
//! interior moments against the first-kind Nédélec space N_{k−1}. On the prism
//! they are normal moments against P_k on the triangular facets and Q_k on the
//! quadrilateral ones, moments of v_3 against P_{k,k−2} and moments of (v_1, v_2)
//! against the pair space N_{k−1} ⊗ P_k(x_3).

mod dofs;
mod operator;
mod projection;

pub use dofs::{apply_dof, assemble_dof_matrix, bdm_space, dof_set, CompiledDofs, DofFunctional, DofKind, DofSet, DOF_QUADRATURE_EXACTNESS};
pub use operator::{condition_ratio, interpolate, BdmInterpolator, Interpolant, UNISOLVENCE_TOLERANCE};
pub use projection::{
    commuting_defect, commuting_defect_with, divergence_image_basis, divergence_target_basis, l2_project,
    search_counterexample, vector_polynomial_from_records, vector_polynomial_to_records, Counterexample,
    ElementPolynomial, TermRecord, PROJECTION_EXACTNESS, SPAN_TOLERANCE,
};
