//! Checks of candidate equilibria against the complementarity conditions.

use std::f64::consts::PI;

use serde::Serialize;

use super::oracle::exploitability;
use super::regularize::{K_MINUS, K_PLUS};
use super::system::EquilibriumSystem;
use crate::game::Slot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    AtZero,
    AtOne,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyTolerances {
    /// Distance from 0 or 1 below which a frequency counts as on the bound.
    pub tol_zero: f64,
    /// Absolute gradient tolerance.
    pub tol_grad: f64,
    /// Gradient tolerance relative to the largest `|f|`.
    pub tol_grad_rel: f64,
    pub max_exploitability: f64,
}

impl VerifyTolerances {
    /// For exact (unregularized) candidate solutions.
    pub fn exact() -> Self {
        VerifyTolerances {
            tol_zero: 1e-3,
            tol_grad: 1e-12,
            tol_grad_rel: 1e-6,
            max_exploitability: 1e-3,
        }
    }

    /// For solutions of the system regularized at `epsilon`.
    ///
    /// An interior component of a regularized solution sits at
    /// `f = eps * tan(pi (x - 1/2))`, which reaches `eps * cot(pi tol_zero)`
    /// at the edge of the interior band.
    pub fn for_epsilon(epsilon: f64) -> Self {
        let tol_zero = 1e-3;
        VerifyTolerances {
            tol_zero,
            tol_grad: 1.05 * epsilon / (PI * tol_zero).tan(),
            tol_grad_rel: 1e-6,
            max_exploitability: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionCheck {
    pub slot: Slot,
    pub value: f64,
    pub f: f64,
    pub class: Classification,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub checks: Vec<ConditionCheck>,
    pub tol_grad: f64,
    pub exploitability: [f64; 3],
    pub pass: bool,
}

impl EquilibriumReport {
    pub fn violations(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn max_exploitability(&self) -> f64 {
        self.exploitability.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn classify(x: f64, tol_zero: f64) -> Classification {
    if x < tol_zero {
        Classification::AtZero
    } else if x > 1.0 - tol_zero {
        Classification::AtOne
    } else {
        Classification::Interior
    }
}

/// Checks every free frequency of the full profile `x` against the
/// equilibrium conditions and runs the best-response oracle.
pub fn verify_equilibrium(
    system: &EquilibriumSystem,
    x: &[f64],
    pot: f64,
    tol: &VerifyTolerances,
) -> EquilibriumReport {
    let f = system.assemble_f(x, pot);
    let f_max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol_grad = tol.tol_grad.max(tol.tol_grad_rel * f_max);
    let layout = system.terms().layout();
    let checks: Vec<ConditionCheck> = system
        .free_indices()
        .iter()
        .zip(&f)
        .map(|(&i, &fk)| {
            let class = classify(x[i], tol.tol_zero);
            let ok = match class {
                Classification::AtZero => fk < tol_grad,
                Classification::AtOne => fk > -tol_grad,
                Classification::Interior => fk.abs() < tol_grad,
            };
            ConditionCheck {
                slot: layout.slot(i),
                value: x[i],
                f: fk,
                class,
                ok,
            }
        })
        .collect();
    let exploitability = exploitability(system.spec(), x, pot);
    let pass = checks.iter().all(|c| c.ok)
        && exploitability.iter().all(|&e| e <= tol.max_exploitability);
    EquilibriumReport {
        checks,
        tol_grad,
        exploitability,
        pass,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryDeviation {
    pub index: usize,
    pub class: Classification,
    /// Predicted distance to the bound, `eps k / |f|`.
    pub predicted: f64,
    pub actual: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub deviations: Vec<BoundaryDeviation>,
}

impl BoundaryReport {
    /// Fraction of boundary components within `rel_tol` of the prediction.
    pub fn fraction_within(&self, rel_tol: f64) -> f64 {
        if self.deviations.is_empty() {
            return 1.0;
        }
        let ok = self.deviations.iter().filter(|d| d.relative <= rel_tol).count();
        ok as f64 / self.deviations.len() as f64
    }
}

/// Compares the distance of each boundary component to its bound with the
/// leading-order law `x = -eps k_- / f` (near 0) or `1 - x = eps k_+ / f`
/// (near 1).
pub fn asymptotic_boundary_check(
    x_free: &[f64],
    f: &[f64],
    epsilon: f64,
    tol_zero: f64,
) -> BoundaryReport {
    let deviations = x_free
        .iter()
        .zip(f)
        .enumerate()
        .filter_map(|(index, (&xk, &fk))| {
            let class = classify(xk, tol_zero);
            let (predicted, actual) = match class {
                Classification::AtZero => (-epsilon * K_MINUS / fk, xk),
                Classification::AtOne => (epsilon * K_PLUS / fk, 1.0 - xk),
                Classification::Interior => return None,
            };
            let relative = if predicted > 0.0 {
                (actual - predicted).abs() / predicted
            } else {
                f64::INFINITY
            };
            Some(BoundaryDeviation {
                index,
                class,
                predicted,
                actual,
                relative,
            })
        })
        .collect();
    BoundaryReport { deviations }
}
