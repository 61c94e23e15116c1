//! Solvers for monotone stochastic variational inequalities whose feasible
//! set is a box intersected with many convex functional level sets.
//!
//! Projections onto the full constraint set are never computed. Each
//! iteration takes an extragradient (Korpelevich) or Popov step projected onto
//! the box and then runs a short chain of randomized Polyak subgradient steps
//! on sampled constraints.
//!
//! All numeric code is generic over a [`Scalar`] (`f32` or `f64`). The aliases
//! at the bottom of this file fix the scalar to `f64`, which is what the
//! experiment harness uses.

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod feasibility;
pub mod metrics;
pub mod numkit;
pub mod problem;
pub mod scalar;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Vector = numkit::RealVec<f64>;
pub type Vector32 = numkit::RealVec<f32>;
pub type Matrix = numkit::Matrix<f64>;
pub type BoxSet = numkit::BoxSet<f64>;
pub type Problem = problem::ProblemSpec<f64>;
pub type Problem32 = problem::ProblemSpec<f32>;
pub type Constraint = problem::QuadraticConstraint<f64>;
pub type Family = problem::ConstraintFamily<f64>;
pub type Config = solvers::SolverConfig<f64>;
pub type Trace = solvers::SolverTrace<f64>;
pub type Cloud = metrics::FeasiblePointCloud<f64>;
