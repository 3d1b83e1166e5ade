//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::sync::OnceLock;

use kuhn3::continuation::{newton_solve, trace_branch, Branch, ContinuationConfig, NewtonMode, NewtonSettings};
use kuhn3::equilibrium::{Regularization, SystemOptions};
use kuhn3::game::{evaluate_expectations, GameSpec};

pub const EPS: f64 = 1e-6;

pub fn config(epsilon: f64, p_stop: f64) -> ContinuationConfig {
    ContinuationConfig {
        epsilon_target: epsilon,
        p_stop,
        ..ContinuationConfig::default()
    }
}

pub fn trace(spec: GameSpec, epsilon: f64, p_stop: f64) -> Branch {
    trace_branch(&spec, SystemOptions::default(), &config(epsilon, p_stop)).expect("branch traces")
}

pub fn full(n: usize) -> GameSpec {
    GameSpec::new(n).unwrap()
}

/// N=4 to P=10 at the default epsilon, traced once per test binary.
pub fn four_card_branch() -> &'static Branch {
    static B: OnceLock<Branch> = OnceLock::new();
    B.get_or_init(|| trace(full(4), EPS, 10.0))
}

pub fn five_card_branch() -> &'static Branch {
    static B: OnceLock<Branch> = OnceLock::new();
    B.get_or_init(|| trace(full(5), EPS, 10.0))
}

/// Simplified game to P=4.
pub fn skp_branch() -> &'static Branch {
    static B: OnceLock<Branch> = OnceLock::new();
    B.get_or_init(|| trace(GameSpec::simplified(), EPS, 4.0))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

pub fn corrector_settings(config: &ContinuationConfig) -> NewtonSettings {
    NewtonSettings {
        tol: config.newton_tol,
        max_iters: config.newton_max_iters,
        step_tol: config.newton_step_tol,
        stall_tol: config.newton_stall_tol,
        damped: false,
    }
}

/// Distinct solutions at `pot`: every branch segment crossing it gives a
/// candidate, polished by Newton at fixed pot. Candidates whose expectation
/// vectors lie within `separation` of an earlier one count once.
pub fn coexisting_solutions(branch: &Branch, pot: f64, separation: f64) -> Vec<[f64; 3]> {
    let system = branch.system().unwrap();
    let reg = Regularization::new(branch.epsilon).unwrap();
    let settings = corrector_settings(&branch.config);
    let mut found: Vec<[f64; 3]> = Vec::new();
    for w in branch.points.windows(2) {
        if (w[0].pot - pot) * (w[1].pot - pot) > 0.0 || w[0].pot == w[1].pot {
            continue;
        }
        let t = (pot - w[0].pot) / (w[1].pot - w[0].pot);
        let mut guess: Vec<f64> = w[0].x_free.iter().zip(&w[1].x_free).map(|(a, b)| a + t * (b - a)).collect();
        guess.push(pot);
        let Ok(sol) = newton_solve(&system, &reg, &guess, NewtonMode::FixedPot, &settings) else {
            continue;
        };
        let e = evaluate_expectations(system.terms(), &system.embed(&sol.state[..system.dim()]), pot);
        if found.iter().all(|f| dist(f, &e) > separation) {
            found.push(e);
        }
    }
    found
}

/// Centres of the `width`-wide pot bins crossed by at least `min` branch
/// segments, with their crossing counts.
pub fn multiply_crossed_bins(branch: &Branch, width: f64, min: usize) -> Vec<(f64, usize)> {
    let mut crossings = std::collections::BTreeMap::new();
    for w in branch.points.windows(2) {
        let (a, b) = (w[0].pot.min(w[1].pot), w[0].pot.max(w[1].pot));
        let first = (a / width - 0.5).ceil().max(0.0) as i64;
        let last = (b / width - 0.5).floor() as i64;
        for bin in first..=last {
            *crossings.entry(bin).or_insert(0usize) += 1;
        }
    }
    crossings
        .into_iter()
        .filter(|&(_, c)| c >= min)
        .map(|(bin, c)| ((bin as f64 + 0.5) * width, c))
        .collect()
}
