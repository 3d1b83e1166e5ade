//! Newton's method on the regularized system, at fixed pot or with the
//! arc-length row appended.

use nalgebra::{DMatrix, DVector};

use crate::equilibrium::{EquilibriumSystem, Regularization};

#[derive(Debug, Clone, Copy)]
pub enum NewtonMode<'a> {
    /// Solve for the free frequencies with the pot held at the guess value.
    FixedPot,
    /// Solve for `X = (x, P)` with `(X - anchor) . tangent = delta`.
    Augmented {
        anchor: &'a [f64],
        tangent: &'a [f64],
        delta: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iters: usize,
    /// Accept once the update is below `step_tol` and the residual below
    /// `stall_tol`, even if `tol` is not reached.
    pub step_tol: f64,
    pub stall_tol: f64,
    /// Backtracking line search on the residual 2-norm.
    pub damped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    /// Augmented vector `(x_free, P)`.
    pub state: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NewtonFailure {
    NotConverged { residual_norm: f64 },
    Singular,
    NonFinite,
    LineSearch { residual_norm: f64 },
}

impl std::fmt::Display for NewtonFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NewtonFailure::NotConverged { residual_norm } => {
                write!(f, "no convergence (residual {residual_norm:e})")
            }
            NewtonFailure::Singular => write!(f, "singular Jacobian"),
            NewtonFailure::NonFinite => write!(f, "non-finite iterate"),
            NewtonFailure::LineSearch { residual_norm } => {
                write!(f, "line search stalled (residual {residual_norm:e})")
            }
        }
    }
}

struct Evaluation {
    residual: Vec<f64>,
    jacobian: DMatrix<f64>,
}

fn evaluate(
    system: &EquilibriumSystem,
    reg: &Regularization,
    state: &[f64],
    mode: NewtonMode<'_>,
) -> Evaluation {
    let m = system.dim();
    let (x, pot) = state.split_at(m);
    let (mut residual, jac) = system.residual_and_jacobian(x, pot[0], reg);
    let jacobian = match mode {
        NewtonMode::FixedPot => jac.columns(0, m).into_owned(),
        NewtonMode::Augmented {
            anchor,
            tangent,
            delta,
        } => {
            let arc: f64 = state
                .iter()
                .zip(anchor)
                .zip(tangent)
                .map(|((s, a), t)| (s - a) * t)
                .sum();
            residual.push(arc - delta);
            let mut full = jac.insert_row(m, 0.0);
            for (j, t) in tangent.iter().enumerate() {
                full[(m, j)] = *t;
            }
            full
        }
    };
    Evaluation { residual, jacobian }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs Newton from `guess` (augmented `(x_free, P)`) until the residual
/// sup-norm drops below `settings.tol`.
pub fn newton_solve(
    system: &EquilibriumSystem,
    reg: &Regularization,
    guess: &[f64],
    mode: NewtonMode<'_>,
    settings: &NewtonSettings,
) -> Result<NewtonSolution, NewtonFailure> {
    let m = system.dim();
    assert_eq!(guess.len(), m + 1, "guess must be (x_free, P)");
    let unknowns = match mode {
        NewtonMode::FixedPot => m,
        NewtonMode::Augmented { .. } => m + 1,
    };
    let mut state = guess.to_vec();
    let mut eval = evaluate(system, reg, &state, mode);
    for iter in 0..=settings.max_iters {
        let norm = sup_norm(&eval.residual);
        if norm.is_nan() {
            return Err(NewtonFailure::NonFinite);
        }
        if norm < settings.tol {
            return Ok(NewtonSolution {
                state,
                iterations: iter,
                residual_norm: norm,
            });
        }
        if iter == settings.max_iters {
            return Err(NewtonFailure::NotConverged { residual_norm: norm });
        }
        let rhs = DVector::from_iterator(eval.residual.len(), eval.residual.iter().map(|r| -r));
        let step = std::mem::replace(&mut eval.jacobian, DMatrix::zeros(0, 0))
            .lu()
            .solve(&rhs)
            .ok_or(NewtonFailure::Singular)?;
        if step.iter().any(|s| !s.is_finite()) {
            return Err(NewtonFailure::Singular);
        }
        if norm < settings.stall_tol && sup_norm(step.as_slice()) < settings.step_tol {
            return Ok(NewtonSolution {
                state,
                iterations: iter,
                residual_norm: norm,
            });
        }

        if !settings.damped {
            for (s, d) in state.iter_mut().zip(step.iter()).take(unknowns) {
                *s += d;
            }
            eval = evaluate(system, reg, &state, mode);
            continue;
        }

        let merit = two_norm(&eval.residual);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = state
                .iter()
                .enumerate()
                .map(|(i, s)| if i < unknowns { s + alpha * step[i] } else { *s })
                .collect();
            let trial_eval = evaluate(system, reg, &trial, mode);
            let trial_merit = two_norm(&trial_eval.residual);
            if trial_merit.is_finite() && trial_merit <= (1.0 - 1e-4 * alpha) * merit {
                state = trial;
                eval = trial_eval;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-10 {
                return Err(NewtonFailure::LineSearch { residual_norm: norm });
            }
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameSpec;

    #[test]
    fn exact_root_takes_zero_iterations() {
        let sys = EquilibriumSystem::new(&GameSpec::new(4).unwrap()).unwrap();
        let reg = Regularization::new(0.1).unwrap();
        let settings = NewtonSettings {
            tol: 1e-12,
            max_iters: 50,
            step_tol: 0.0,
            stall_tol: 0.0,
            damped: true,
        };
        let mut guess = vec![0.5; sys.dim()];
        guess.push(0.0);
        let sol = newton_solve(&sys, &reg, &guess, NewtonMode::FixedPot, &settings).unwrap();
        let again = newton_solve(&sys, &reg, &sol.state, NewtonMode::FixedPot, &settings).unwrap();
        assert_eq!(again.iterations, 0);
        assert_eq!(again.state, sol.state);
    }

    #[test]
    fn augmented_row_is_satisfied() {
        let sys = EquilibriumSystem::new(&GameSpec::new(4).unwrap()).unwrap();
        let reg = Regularization::new(0.1).unwrap();
        let settings = NewtonSettings {
            tol: 1e-12,
            max_iters: 50,
            step_tol: 0.0,
            stall_tol: 0.0,
            damped: true,
        };
        let mut guess = vec![0.5; sys.dim()];
        guess.push(1.0);
        let base = newton_solve(&sys, &reg, &guess, NewtonMode::FixedPot, &settings).unwrap();
        let mut tangent = vec![0.0; sys.dim() + 1];
        tangent[sys.dim()] = 1.0;
        let mode = NewtonMode::Augmented {
            anchor: &base.state,
            tangent: &tangent,
            delta: 0.05,
        };
        let sol = newton_solve(&sys, &reg, &base.state, mode, &settings).unwrap();
        assert!((sol.state[sys.dim()] - 1.05).abs() < 1e-12);
    }
}
