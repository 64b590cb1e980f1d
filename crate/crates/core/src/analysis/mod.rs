//! Norms, estimate right-hand sides and rate fitting.

mod estimates;
mod norms;
mod rates;

pub use estimates::{
    aniso_seminorm, estimate_report, h_power, interpolation_error, interpolation_error_with, rhs_theorem1, rhs_theorem2,
    rhs_theorem4, rhs_theorem5, stability_ratio, stability_ratio_with, theorem_rhs, ElementSummary, EstimateReport,
    RhsReport, RhsTerm, Theorem,
};
pub use norms::{lp_norm, lp_norm_with, reference_lattice, NormSpec, PNorm, NORM_EXACTNESS, SUP_LATTICE};
pub use rates::{estimate_rate, spearman, RANK_TIE_TOLERANCE, spread, RateFit, RateRow, RateTable};
