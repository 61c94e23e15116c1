//! Merit functions and diagnostics: the modified dual gap estimated over a
//! cloud of feasible points, the infeasibility surrogate `Σ g⁺`, exact
//! projections for box-and-halfspace test problems, and rate fits.

mod dykstra;
mod fit;
mod gap;

pub use dykstra::{distance_to_feasible, dykstra_projection, Halfspace};
pub use fit::{fit_line, fit_loglog_rate, LinearFit};
pub use gap::{
    dual_gap_signed, estimate_modified_dual_gap, infeasibility_surrogate, infeasibility_term,
    sample_feasible_points, sample_product_feasible_points, FeasiblePointCloud, GapEstimate,
    GapEvaluator, DEFAULT_CLOUD_CANDIDATES,
};
