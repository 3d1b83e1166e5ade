//! Residual and Jacobian of the regularized equilibrium conditions.
//!
//! For a free frequency `x_b` of player `i` the condition function is
//! `f_b = dE_i/dx_b`, unless the same player acted earlier on the path with
//! the same card at node `a` (always through the passive branch). Then
//! `f_b = -d2E_i/(dx_a dx_b)`, which strips the reach factor `1 - x_a` and
//! keeps the condition meaningful when node `a` always bets.
//!
//! The regularized system is `g(f_b / eps) - x_b = 0` with the pot `P` as one
//! more unknown, so the Jacobian has one more column than rows.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::regularize::Regularization;
use crate::error::Result;
use crate::game::{build_terms, GameSpec, GameTerms, PinSet, Slot, MAX_PATH};

/// Switches for the two mechanisms that rule out non-credible threats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemOptions {
    pub dominance_pins: bool,
    pub ancestor_rule: bool,
}

impl Default for SystemOptions {
    fn default() -> Self {
        SystemOptions {
            dominance_pins: true,
            ancestor_rule: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumSystem {
    spec: GameSpec,
    options: SystemOptions,
    terms: GameTerms,
    pins: PinSet,
    free: Vec<usize>,
    /// Row of each flat index, if free.
    row_of: Vec<Option<usize>>,
    /// Same-player passive ancestor (flat index) of each row.
    ancestor: Vec<Option<usize>>,
    /// 0-based owner of each flat index.
    owner: Vec<usize>,
}

impl EquilibriumSystem {
    pub fn new(spec: &GameSpec) -> Result<Self> {
        Self::with_options(spec, SystemOptions::default())
    }

    pub fn with_options(spec: &GameSpec, options: SystemOptions) -> Result<Self> {
        let terms = build_terms(spec)?;
        let pins = PinSet::build(spec.n_cards, spec.variant, options.dominance_pins)?;
        let layout = terms.layout();
        let free = pins.free_indices();
        let mut row_of = vec![None; layout.len()];
        for (r, &i) in free.iter().enumerate() {
            row_of[i] = Some(r);
        }
        let ancestor = free
            .iter()
            .map(|&i| {
                if !options.ancestor_rule {
                    return None;
                }
                let Slot { player, node, card } = layout.slot(i);
                terms
                    .topology()
                    .same_player_passive_ancestor(node)
                    .map(|a| layout.index_unchecked(player, a, card))
            })
            .collect();
        let owner = (0..layout.len()).map(|i| layout.slot(i).player - 1).collect();
        Ok(EquilibriumSystem {
            spec: *spec,
            options,
            terms,
            pins,
            free,
            row_of,
            ancestor,
            owner,
        })
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn options(&self) -> SystemOptions {
        self.options
    }

    pub fn terms(&self) -> &GameTerms {
        &self.terms
    }

    pub fn pins(&self) -> &PinSet {
        &self.pins
    }

    /// Free flat indices in row order.
    pub fn free_indices(&self) -> &[usize] {
        &self.free
    }

    pub fn free_slots(&self) -> Vec<Slot> {
        let layout = self.terms.layout();
        self.free.iter().map(|&i| layout.slot(i)).collect()
    }

    /// Ancestor flat index for the row of free index `index`.
    pub fn ancestor_of(&self, index: usize) -> Option<usize> {
        self.row_of[index].and_then(|r| self.ancestor[r])
    }

    /// Number of free frequencies, `M`.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn embed(&self, x_free: &[f64]) -> Vec<f64> {
        self.pins.embed(x_free)
    }

    /// Condition functions `f` at a full profile.
    pub fn assemble_f(&self, x: &[f64], pot: f64) -> Vec<f64> {
        self.assemble(x, pot, false).0
    }

    /// Condition functions and their derivatives with respect to the free
    /// frequencies and the pot (`M x (M+1)`, pot last).
    pub fn f_and_derivatives(&self, x: &[f64], pot: f64) -> (Vec<f64>, DMatrix<f64>) {
        let (f, d) = self.assemble(x, pot, true);
        (f, d.expect("requested"))
    }

    fn assemble(&self, x: &[f64], pot: f64, with_jac: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
        assert_eq!(x.len(), self.terms.layout().len());
        let m = self.dim();
        let cols = m + 1;
        let mut f = vec![0.0; m];
        let mut jac = if with_jac { vec![0.0; m * cols] } else { Vec::new() };

        let mut vals = [0.0; MAX_PATH];
        let mut signs = [0.0; MAX_PATH];
        let mut index = [0usize; MAX_PATH];
        for term in self.terms.terms() {
            let len = term.factors.len();
            for (q, fac) in term.factors.iter().enumerate() {
                vals[q] = fac.value(x);
                signs[q] = fac.sign();
                index[q] = fac.index as usize;
            }
            for j in 0..len {
                let Some(row) = self.row_of[index[j]] else {
                    continue;
                };
                let (skip, sign) = match self.ancestor[row] {
                    None => (usize::MAX, signs[j]),
                    Some(a) => match index[..len].iter().position(|&i| i == a) {
                        Some(qa) => (qa, -signs[j] * signs[qa]),
                        None => continue,
                    },
                };
                let payoff = term.payoff[self.owner[index[j]]];
                let pay = payoff.eval(pot);
                let kept = |q: usize| q != j && q != skip;
                let rest: f64 = (0..len).filter(|&q| kept(q)).map(|q| vals[q]).product();
                f[row] += sign * pay * rest;
                if !with_jac {
                    continue;
                }
                let base = row * cols;
                jac[base + m] += sign * payoff.slope() * rest;
                for q in (0..len).filter(|&q| kept(q)) {
                    let Some(col) = self.row_of[index[q]] else {
                        continue;
                    };
                    let others: f64 = (0..len)
                        .filter(|&p| kept(p) && p != q)
                        .map(|p| vals[p])
                        .product();
                    jac[base + col] += sign * signs[q] * pay * others;
                }
            }
        }
        let scale = self.terms.scale();
        f.iter_mut().for_each(|v| *v *= scale);
        let jac = with_jac.then(|| {
            jac.iter_mut().for_each(|v| *v *= scale);
            DMatrix::from_row_slice(m, cols, &jac)
        });
        (f, jac)
    }

    /// `r_k = g(f_k / eps) - x_k`.
    pub fn residual(&self, x_free: &[f64], pot: f64, reg: &Regularization) -> Vec<f64> {
        let x = self.embed(x_free);
        let f = self.assemble_f(&x, pot);
        f.iter()
            .zip(x_free)
            .map(|(fk, xk)| reg.apply(*fk) - xk)
            .collect()
    }

    /// Residual and its `M x (M+1)` Jacobian (pot column last).
    pub fn residual_and_jacobian(
        &self,
        x_free: &[f64],
        pot: f64,
        reg: &Regularization,
    ) -> (Vec<f64>, DMatrix<f64>) {
        let x = self.embed(x_free);
        let (f, mut jac) = self.f_and_derivatives(&x, pot);
        let mut r = Vec::with_capacity(f.len());
        for (k, (fk, xk)) in f.iter().zip(x_free).enumerate() {
            r.push(reg.apply(*fk) - xk);
            let w = reg.derivative(*fk);
            let mut row = jac.row_mut(k);
            row.iter_mut().for_each(|v| *v *= w);
            row[k] -= 1.0;
        }
        (r, jac)
    }

    pub fn jacobian(&self, x_free: &[f64], pot: f64, reg: &Regularization) -> DMatrix<f64> {
        self.residual_and_jacobian(x_free, pot, reg).1
    }
}
