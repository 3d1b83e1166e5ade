//! Regularized equilibrium conditions and their verification.

mod oracle;
mod regularize;
mod system;
mod verify;

pub use oracle::{deal_value, exploitability, tree_expectations};
pub use regularize::{g_eval, g_inverse, g_prime, Regularization, K_MINUS, K_PLUS};
pub use system::{EquilibriumSystem, SystemOptions};
pub use verify::{
    asymptotic_boundary_check, classify, verify_equilibrium, BoundaryDeviation, BoundaryReport,
    Classification, ConditionCheck, EquilibriumReport, VerifyTolerances,
};
