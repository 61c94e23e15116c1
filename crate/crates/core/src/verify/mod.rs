//! Independent oracles and executable inequality checks for the feasibility
//! machinery and the step-size sequences.

mod checks;
mod oracles;
mod report;
mod suite;
mod witness;

pub use checks::{
    check_feasibility_decay, check_polyak_step, check_sequence_bounds, check_theorem42,
    sequence_bound_margins, theorem42_excess, DecayCheck, SequenceMargins, TheoremCheck,
};
pub use oracles::{brute_force_projection_grid, finite_diff_subgrad_check};
pub use report::{CheckReport, Status};
pub use suite::{
    decay_on_halfspace, evaluation_counts, gap_at_solution, grid_projection_agreement,
    halfspace_problem, oracle_equivalence, polyak_inequality_cases, run_verify_suite,
    sequence_bound_grid, subgradient_differences, theorem42_on_games, SuiteOptions,
};
pub use witness::WitnessedProblem;
