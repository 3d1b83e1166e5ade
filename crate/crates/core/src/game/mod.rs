//! Game model: tree, deals, frequency layout and expectation terms.

mod deal;
mod layout;
mod reach;
mod terms;
mod tree;

use serde::{Deserialize, Serialize};

pub use deal::{deal_count, enumerate_deals, Deal, MIN_CARDS};
pub use layout::{fixed_mask, freq_index, Layout, PinSet, Slot, StrategyProfile, Variant};
pub use reach::{node_reach, reach_fraction};
pub use terms::{
    build_terms, evaluate_expectations, mixed_partial, partial_wrt_pot, Factor, GameTerms, Term,
    MAX_PATH,
};
pub use tree::{
    build_topology, node_player, node_slot, payoff_coefficients, terminal_payoff, Action,
    AffinePayoff, Child, DecisionNode, TerminalNode, TreeTopology, NUM_NODES, NUM_PLAYERS,
    NUM_TERMINALS, PLAYER_NODES,
};

use crate::error::Result;

/// Deck size and rule variant. The pot is the continuation parameter and is
/// passed separately wherever it is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub n_cards: usize,
    #[serde(default)]
    pub variant: Variant,
}

impl GameSpec {
    pub fn new(n_cards: usize) -> Result<Self> {
        Self::with_variant(n_cards, Variant::Full)
    }

    /// Simplified Kuhn poker embedded in the four-card game.
    pub fn simplified() -> Self {
        GameSpec {
            n_cards: 4,
            variant: Variant::Simplified,
        }
    }

    pub fn with_variant(n_cards: usize, variant: Variant) -> Result<Self> {
        deal::check_card_count(n_cards)?;
        if variant == Variant::Simplified && n_cards != 4 {
            return Err(crate::Error::InvalidSpec(
                "simplified Kuhn poker is played with 4 cards".into(),
            ));
        }
        Ok(GameSpec { n_cards, variant })
    }

    /// Smallest pot at which any player profits at equilibrium, `2/(N-3)`.
    pub fn min_profitable_pot(&self) -> f64 {
        2.0 / (self.n_cards as f64 - 3.0)
    }
}
