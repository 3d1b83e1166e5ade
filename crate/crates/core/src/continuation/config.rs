use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs for bootstrap, Newton and step control. All fields have defaults,
/// so a JSON file may set any subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationConfig {
    pub epsilon_target: f64,
    pub epsilon_start: f64,
    /// Geometric reduction of epsilon per bootstrap stage.
    pub epsilon_factor: f64,
    pub delta_init: f64,
    pub delta_max: f64,
    /// Steps below this are treated as a stuck branch.
    pub delta_min: f64,
    pub shrink_factor: f64,
    pub growth_factor: f64,
    /// Accept a step only if `|X_new - X_old| <= max(accept_ratio * delta,
    /// accept_floor * epsilon)`.
    pub accept_ratio: f64,
    pub accept_floor: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// A Newton update smaller than this (sup-norm) counts as convergence
    /// when the residual is already below `newton_stall_tol`. Near `eps =
    /// 1e-6` the residual of interior rows bottoms out at rounding level,
    /// which can exceed `newton_tol` at large pots.
    pub newton_step_tol: f64,
    pub newton_stall_tol: f64,
    /// Iteration budget of the damped solves used during bootstrap.
    pub bootstrap_max_iters: usize,
    pub p_stop: f64,
    pub step_budget: usize,
    pub rng_seed: u64,
    /// Pot of the second bootstrap solution.
    pub bootstrap_pot: f64,
    pub max_restarts: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            epsilon_target: 1e-6,
            epsilon_start: 0.1,
            epsilon_factor: 0.5,
            delta_init: 1e-3,
            delta_max: 0.1,
            delta_min: 1e-14,
            shrink_factor: 0.5,
            growth_factor: 1.1,
            accept_ratio: 1.05,
            accept_floor: 1e-3,
            newton_tol: 1e-11,
            newton_max_iters: 25,
            newton_step_tol: 1e-13,
            newton_stall_tol: 1e-9,
            bootstrap_max_iters: 200,
            p_stop: 10.0,
            step_budget: 1_000_000,
            rng_seed: 1,
            bootstrap_pot: 0.01,
            max_restarts: 20,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon_target", self.epsilon_target),
            ("epsilon_start", self.epsilon_start),
            ("delta_init", self.delta_init),
            ("delta_max", self.delta_max),
            ("delta_min", self.delta_min),
            ("newton_tol", self.newton_tol),
            ("p_stop", self.p_stop),
            ("bootstrap_pot", self.bootstrap_pot),
            ("accept_ratio", self.accept_ratio),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(Error::InvalidSpec("shrink_factor must lie in (0, 1)".into()));
        }
        if !(self.epsilon_factor > 0.0 && self.epsilon_factor < 1.0) {
            return Err(Error::InvalidSpec("epsilon_factor must lie in (0, 1)".into()));
        }
        if self.growth_factor <= 1.0 {
            return Err(Error::InvalidSpec("growth_factor must exceed 1".into()));
        }
        if self.epsilon_target > self.epsilon_start {
            return Err(Error::InvalidSpec("epsilon_target exceeds epsilon_start".into()));
        }
        if self.delta_init > self.delta_max {
            return Err(Error::InvalidSpec("delta_init exceeds delta_max".into()));
        }
        if self.newton_max_iters == 0 || self.bootstrap_max_iters == 0 || self.step_budget == 0 {
            return Err(Error::InvalidSpec("iteration budgets must be positive".into()));
        }
        Ok(())
    }
}
