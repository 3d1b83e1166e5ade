use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ContinuationConfig;
use super::newton::{newton_solve, NewtonMode, NewtonSettings};
use super::predictor::predictor;
use crate::equilibrium::{EquilibriumSystem, Regularization, SystemOptions};
use crate::error::{Error, Result};
use crate::game::{evaluate_expectations, GameSpec, Slot};

/// One accepted solution `X = (x_free, P)` on the branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub x_free: Vec<f64>,
    pub pot: f64,
    pub expectations: [f64; 3],
    pub delta_used: f64,
    pub newton_iters: usize,
    pub residual_norm: f64,
}

impl BranchPoint {
    fn from_state(
        system: &EquilibriumSystem,
        state: Vec<f64>,
        delta_used: f64,
        newton_iters: usize,
        residual_norm: f64,
    ) -> Self {
        let mut x_free = state;
        let pot = x_free.pop().expect("state carries the pot");
        let expectations = evaluate_expectations(system.terms(), &system.embed(&x_free), pot);
        BranchPoint {
            x_free,
            pot,
            expectations,
            delta_used,
            newton_iters,
            residual_norm,
        }
    }

    /// The augmented vector `(x_free, P)`.
    pub fn state(&self) -> Vec<f64> {
        let mut s = self.x_free.clone();
        s.push(self.pot);
        s
    }

    pub fn distance(&self, other: &BranchPoint) -> f64 {
        let dx: f64 = self
            .x_free
            .iter()
            .zip(&other.x_free)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (dx + (self.pot - other.pot).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    PotReached,
    StepBudget,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub spec: GameSpec,
    pub options: SystemOptions,
    pub epsilon: f64,
    pub config: ContinuationConfig,
    pub slots: Vec<Slot>,
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
}

impl Branch {
    /// Cumulative Euclidean arc length in `X` at each point.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut s = 0.0;
        let mut out = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                s += p.distance(&self.points[i - 1]);
            }
            out.push(s);
        }
        out
    }

    pub fn system(&self) -> Result<EquilibriumSystem> {
        EquilibriumSystem::with_options(&self.spec, self.options)
    }
}

fn settings(config: &ContinuationConfig, damped: bool) -> NewtonSettings {
    NewtonSettings {
        tol: config.newton_tol,
        max_iters: if damped {
            config.bootstrap_max_iters
        } else {
            config.newton_max_iters
        },
        step_tol: config.newton_step_tol,
        stall_tol: config.newton_stall_tol,
        damped,
    }
}

fn fixed_pot_solve(
    system: &EquilibriumSystem,
    reg: &Regularization,
    x: &[f64],
    pot: f64,
    config: &ContinuationConfig,
) -> Option<(Vec<f64>, usize, f64)> {
    let mut guess: Vec<f64> = x.iter().map(|v| v.clamp(1e-12, 1.0 - 1e-12)).collect();
    guess.push(pot);
    newton_solve(system, reg, &guess, NewtonMode::FixedPot, &settings(config, true))
        .ok()
        .map(|s| (s.state, s.iterations, s.residual_norm))
}

/// Lowers epsilon geometrically from the start value to the target at a
/// fixed pot, re-solving at every stage.
fn lower_epsilon(
    system: &EquilibriumSystem,
    mut x: Vec<f64>,
    pot: f64,
    config: &ContinuationConfig,
) -> Result<(Vec<f64>, usize, f64)> {
    let mut eps = config.epsilon_start;
    let mut factor = config.epsilon_factor;
    let mut last = (0, 0.0);
    while eps > config.epsilon_target {
        let next = (eps * factor).max(config.epsilon_target);
        let reg = Regularization::new(next)?;
        match fixed_pot_solve(system, &reg, &x, pot, config) {
            Some((state, iters, res)) => {
                x = state[..system.dim()].to_vec();
                eps = next;
                last = (iters, res);
                log::debug!("epsilon stage {eps:e} solved in {iters} iterations");
            }
            None => {
                factor = factor.sqrt();
                log::debug!("epsilon stage {next:e} failed, factor now {factor}");
                if factor > 1.0 - 1e-9 {
                    return Err(Error::Bootstrap(format!(
                        "epsilon continuation stalled at {eps:e}"
                    )));
                }
            }
        }
    }
    Ok((x, last.0, last.1))
}

/// Solves at `P = 0` from a seeded random guess, lowers epsilon to the
/// target, then solves again at the bootstrap pot. Returns the two points
/// that seed the continuation.
pub fn bootstrap_initial(
    spec: &GameSpec,
    options: SystemOptions,
    config: &ContinuationConfig,
) -> Result<(BranchPoint, BranchPoint)> {
    config.validate()?;
    let system = EquilibriumSystem::with_options(spec, options)?;
    let m = system.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let start_reg = Regularization::new(config.epsilon_start)?;

    let mut x0 = None;
    for attempt in 0..=config.max_restarts {
        let guess: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        if let Some((state, iters, _)) = fixed_pot_solve(&system, &start_reg, &guess, 0.0, config)
        {
            log::info!("bootstrap solve at P = 0 converged (attempt {attempt}, {iters} iterations)");
            x0 = Some(state[..m].to_vec());
            break;
        }
        log::warn!("bootstrap attempt {attempt} failed, restarting");
    }
    let x0 = x0.ok_or_else(|| {
        Error::Bootstrap(format!(
            "no solution at P = 0 after {} random starts",
            config.max_restarts + 1
        ))
    })?;

    let (x0, iters, res) = lower_epsilon(&system, x0, 0.0, config)?;
    let mut s0 = x0.clone();
    s0.push(0.0);
    let p0 = BranchPoint::from_state(&system, s0, 0.0, iters, res);

    let reg = Regularization::new(config.epsilon_target)?;
    let mut pot = config.bootstrap_pot;
    let p1 = loop {
        if let Some((state, iters, res)) = fixed_pot_solve(&system, &reg, &x0, pot, config) {
            break BranchPoint::from_state(&system, state, pot, iters, res);
        }
        pot *= 0.5;
        if pot < config.delta_min {
            return Err(Error::Bootstrap("no solution near P = 0 for the second point".into()));
        }
        log::warn!("second bootstrap solve failed, retrying at P = {pot:e}");
    };
    Ok((p0, p1))
}

/// One corrected pseudo-arclength step of nominal length `delta` from the
/// last point of `history`. Returns the new point and the next step length.
pub fn continuation_step(
    system: &EquilibriumSystem,
    reg: &Regularization,
    history: &[BranchPoint],
    delta: f64,
    config: &ContinuationConfig,
) -> Result<(BranchPoint, f64)> {
    let n = history.len();
    if n < 2 {
        return Err(Error::Contract("continuation needs two previous points".into()));
    }
    let last = history[n - 1].state();
    let prev = history[n - 2].state();
    let secant: Vec<f64> = last.iter().zip(&prev).map(|(a, b)| a - b).collect();
    let len = secant.iter().map(|v| v * v).sum::<f64>().sqrt();
    if len == 0.0 {
        return Err(Error::Numerical("repeated branch point".into()));
    }
    let tangent: Vec<f64> = secant.iter().map(|v| v / len).collect();
    let states: Vec<Vec<f64>> = history[n.saturating_sub(3)..].iter().map(BranchPoint::state).collect();
    let refs: Vec<&[f64]> = states.iter().map(Vec::as_slice).collect();

    let mut delta = delta;
    let mut reason = String::new();
    while delta >= config.delta_min {
        let guess = predictor(&refs, delta)?;
        let mode = NewtonMode::Augmented {
            anchor: &last,
            tangent: &tangent,
            delta,
        };
        match newton_solve(system, reg, &guess, mode, &settings(config, false)) {
            Ok(sol) => {
                let point = BranchPoint::from_state(
                    system,
                    sol.state,
                    delta,
                    sol.iterations,
                    sol.residual_norm,
                );
                let step = point.distance(&history[n - 1]);
                let bound = (config.accept_ratio * delta).max(config.accept_floor * reg.epsilon());
                if step <= bound {
                    let next = (config.growth_factor * delta).min(config.delta_max);
                    return Ok((point, next));
                }
                reason = format!("step length {step:e} exceeds {bound:e}");
            }
            Err(failure) => reason = failure.to_string(),
        }
        log::debug!("rejected step at delta {delta:e}: {reason}");
        delta *= config.shrink_factor;
    }
    Err(Error::Stuck {
        step: n - 1,
        pot: history[n - 1].pot,
        delta,
        reason,
    })
}

/// Bootstraps and follows the equilibrium branch until the pot exceeds
/// `p_stop` while moving outward, or the step budget runs out.
pub fn trace_branch(
    spec: &GameSpec,
    options: SystemOptions,
    config: &ContinuationConfig,
) -> Result<Branch> {
    let (p0, p1) = bootstrap_initial(spec, options, config)?;
    let system = EquilibriumSystem::with_options(spec, options)?;
    let reg = Regularization::new(config.epsilon_target)?;
    let mut points = vec![p0, p1];
    let mut delta = config.delta_init;
    let termination = loop {
        let n = points.len();
        if points[n - 1].pot > config.p_stop && points[n - 1].pot > points[n - 2].pot {
            break Termination::PotReached;
        }
        if n - 2 >= config.step_budget {
            break Termination::StepBudget;
        }
        let (point, next) = continuation_step(&system, &reg, &points, delta, config)?;
        log::info!(
            "step {} P = {:.6} delta = {:.3e} iters = {} residual = {:.2e}",
            n,
            point.pot,
            point.delta_used,
            point.newton_iters,
            point.residual_norm
        );
        points.push(point);
        delta = next;
    };
    Ok(Branch {
        spec: *spec,
        options,
        epsilon: config.epsilon_target,
        config: config.clone(),
        slots: system.free_slots(),
        points,
        termination,
    })
}

/// Solves at a fixed pot starting from the branch, interpolating between the
/// first pair of consecutive points that bracket `pot`.
pub fn solve_at_pot(branch: &Branch, pot: f64) -> Result<BranchPoint> {
    let system = branch.system()?;
    let reg = Regularization::new(branch.epsilon)?;
    let pair = branch
        .points
        .windows(2)
        .find(|w| (w[0].pot - pot) * (w[1].pot - pot) <= 0.0 && w[0].pot != w[1].pot)
        .ok_or_else(|| Error::Domain(format!("branch does not reach P = {pot}")))?;
    let t = (pot - pair[0].pot) / (pair[1].pot - pair[0].pot);
    let x: Vec<f64> = pair[0]
        .x_free
        .iter()
        .zip(&pair[1].x_free)
        .map(|(a, b)| a + t * (b - a))
        .collect();
    let (state, iters, res) = fixed_pot_solve(&system, &reg, &x, pot, &branch.config)
        .ok_or_else(|| Error::Numerical(format!("no convergence at P = {pot}")))?;
    Ok(BranchPoint::from_state(&system, state, 0.0, iters, res))
}
