//! Modified stochastic Korpelevich and Popov methods. Each outer iteration
//! takes two projected steps onto the base box and then a randomized
//! feasibility pass on the constraint family.

mod averaging;
mod run;
mod schedule;
mod steps;

pub use averaging::{running_weighted_average, Averages, AveragingMode, RunningAverage};
pub use run::{run_solver, IterRecord, Method, SolverConfig, SolverTrace};
pub use schedule::{step_cap, step_size_at, StepKind, StepSchedule, DEFAULT_W4};
pub use steps::{korpelevich_step, popov_step, ExtragradientStep, PopovStep};
