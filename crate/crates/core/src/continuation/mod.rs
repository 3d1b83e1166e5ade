//! Newton solves, bootstrap and pseudo-arclength continuation in the pot.

mod config;
mod newton;
mod predictor;
mod trace;

pub use config::ContinuationConfig;
pub use newton::{newton_solve, NewtonFailure, NewtonMode, NewtonSettings, NewtonSolution};
pub use predictor::predictor;
pub use trace::{
    bootstrap_initial, continuation_step, solve_at_pot, trace_branch, Branch, BranchPoint,
    Termination,
};
