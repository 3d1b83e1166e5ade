//! Sparse multilinear form of the three expectations.
//!
//! Each (deal, terminal) pair contributes one monomial: the product of the
//! action probabilities along the path, times the terminal payoff. Because
//! every frequency appears at most once per monomial, each expectation is
//! linear in every frequency and all mixed partials follow exactly by
//! dropping factors.

use arrayvec::ArrayVec;

use super::deal::{deal_count, enumerate_deals, Deal};
use super::layout::Layout;
use super::tree::{build_topology, payoff_coefficients, Action, AffinePayoff, TreeTopology};
use super::GameSpec;
use crate::error::{Error, Result};

pub const MAX_PATH: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub index: u32,
    /// `1 - x` instead of `x`.
    pub complement: bool,
}

impl Factor {
    #[inline]
    pub fn value(self, x: &[f64]) -> f64 {
        let v = x[self.index as usize];
        if self.complement {
            1.0 - v
        } else {
            v
        }
    }

    #[inline]
    pub fn sign(self) -> f64 {
        if self.complement {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub deal: u32,
    pub terminal: u8,
    pub factors: ArrayVec<Factor, MAX_PATH>,
    pub payoff: [AffinePayoff; 3],
}

#[derive(Debug, Clone)]
pub struct GameTerms {
    layout: Layout,
    deals: Vec<Deal>,
    topology: TreeTopology,
    terms: Vec<Term>,
    scale: f64,
}

pub fn build_terms(spec: &GameSpec) -> Result<GameTerms> {
    let layout = Layout::new(spec.n_cards)?;
    let deals = enumerate_deals(spec.n_cards)?;
    let topology = build_topology();
    let mut terms = Vec::with_capacity(deals.len() * topology.terminals().len());
    for (d, deal) in deals.iter().enumerate() {
        for terminal in topology.terminals() {
            let factors = terminal
                .path
                .iter()
                .map(|&(node, action)| {
                    let player = topology.node(node).player;
                    Factor {
                        index: layout.index_unchecked(player, node, deal.card(player)) as u32,
                        complement: action == Action::Passive,
                    }
                })
                .collect();
            terms.push(Term {
                deal: d as u32,
                terminal: terminal.id as u8,
                factors,
                payoff: payoff_coefficients(terminal, deal),
            });
        }
    }
    Ok(GameTerms {
        layout,
        scale: 1.0 / deal_count(spec.n_cards) as f64,
        deals,
        topology,
        terms,
    })
}

impl GameTerms {
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn n_cards(&self) -> usize {
        self.layout.n_cards()
    }

    pub fn deals(&self) -> &[Deal] {
        &self.deals
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Weight of one deal, `1 / (N(N-1)(N-2))`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn check_profile(&self, x: &[f64]) {
        assert_eq!(x.len(), self.layout.len(), "profile must hold 12N frequencies");
    }
}

/// Expected payoff of each player under `x` at pot `pot`.
pub fn evaluate_expectations(terms: &GameTerms, x: &[f64], pot: f64) -> [f64; 3] {
    terms.check_profile(x);
    let mut acc = [0.0; 3];
    for term in &terms.terms {
        let w: f64 = term.factors.iter().map(|f| f.value(x)).product();
        for (a, c) in acc.iter_mut().zip(term.payoff) {
            *a += c.eval(pot) * w;
        }
    }
    acc.map(|a| a * terms.scale)
}

fn check_index_set(terms: &GameTerms, set: &[usize], allow_empty: bool) -> Result<()> {
    if set.len() > 3 || (!allow_empty && set.is_empty()) {
        return Err(Error::Contract(format!(
            "derivative order must be in {}..=3, got {}",
            if allow_empty { 0 } else { 1 },
            set.len()
        )));
    }
    for (i, a) in set.iter().enumerate() {
        if *a >= terms.layout.len() {
            return Err(Error::Contract(format!("index {a} out of range")));
        }
        if set[..i].contains(a) {
            return Err(Error::Contract(format!("index {a} repeated")));
        }
    }
    Ok(())
}

fn partial_with<F>(terms: &GameTerms, x: &[f64], set: &[usize], coeff: F) -> [f64; 3]
where
    F: Fn(AffinePayoff) -> f64,
{
    let mut acc = [0.0; 3];
    for term in &terms.terms {
        let mut hits = 0;
        let mut w = 1.0;
        for f in &term.factors {
            if set.contains(&(f.index as usize)) {
                hits += 1;
                w *= f.sign();
            } else {
                w *= f.value(x);
            }
        }
        if hits != set.len() {
            continue;
        }
        for (a, c) in acc.iter_mut().zip(term.payoff) {
            *a += coeff(c) * w;
        }
    }
    acc.map(|a| a * terms.scale)
}

/// Exact mixed partial of every expectation with respect to the 1 to 3
/// distinct frequencies in `set`.
pub fn mixed_partial(terms: &GameTerms, x: &[f64], pot: f64, set: &[usize]) -> Result<[f64; 3]> {
    terms.check_profile(x);
    check_index_set(terms, set, false)?;
    Ok(partial_with(terms, x, set, |c| c.eval(pot)))
}

/// Derivative in the pot of the mixed partial over `set` (which may be
/// empty). Payoffs are affine in the pot, so this does not depend on it.
pub fn partial_wrt_pot(terms: &GameTerms, x: &[f64], set: &[usize]) -> Result<[f64; 3]> {
    terms.check_profile(x);
    check_index_set(terms, set, true)?;
    Ok(partial_with(terms, x, set, AffinePayoff::slope))
}
