//! Flat indexing of betting frequencies and the dominance pins.
//!
//! Frequencies are laid out player-major, then node slot, then card:
//! `l = 4N(i-1) + slot*N + card` in 1-based terms. Internally every index is
//! 0-based, so the 0-based position is `l - 1`.

use serde::{Deserialize, Serialize};

use super::deal::check_card_count;
use super::tree::{node_player, node_slot, PLAYER_NODES};
use crate::error::{Error, Result};

/// Rule set for the pinned frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// The full game.
    #[default]
    Full,
    /// Simplified Kuhn poker: N = 4 with every card-1 frequency forced to 0.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub player: usize,
    pub node: usize,
    pub card: usize,
}

impl Slot {
    /// Column label used in branch files, e.g. `p1_n4_c3`.
    pub fn label(&self) -> String {
        format!("p{}_n{}_c{}", self.player, self.node, self.card)
    }

    pub fn parse_label(label: &str) -> Option<Slot> {
        let mut parts = label.split('_');
        let player = parts.next()?.strip_prefix('p')?.parse().ok()?;
        let node = parts.next()?.strip_prefix('n')?.parse().ok()?;
        let card = parts.next()?.strip_prefix('c')?.parse().ok()?;
        if parts.next().is_some() {
            return None;
        }
        Some(Slot { player, node, card })
    }
}

impl Serialize for Slot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    n_cards: usize,
}

impl Layout {
    pub fn new(n_cards: usize) -> Result<Self> {
        check_card_count(n_cards)?;
        Ok(Layout { n_cards })
    }

    pub fn n_cards(&self) -> usize {
        self.n_cards
    }

    pub fn len(&self) -> usize {
        12 * self.n_cards
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, slot: Slot) -> Result<usize> {
        let owner = node_player(slot.node)
            .ok_or_else(|| Error::Contract(format!("node {} does not exist", slot.node)))?;
        if owner != slot.player {
            return Err(Error::Contract(format!(
                "node {} belongs to player {owner}, not player {}",
                slot.node, slot.player
            )));
        }
        if slot.card == 0 || slot.card > self.n_cards {
            return Err(Error::Contract(format!(
                "card {} outside 1..={}",
                slot.card, self.n_cards
            )));
        }
        let node_slot = node_slot(slot.node).expect("owned node has a slot");
        Ok(4 * self.n_cards * (slot.player - 1) + node_slot * self.n_cards + slot.card - 1)
    }

    /// Index for a slot known to be valid.
    pub(crate) fn index_unchecked(&self, player: usize, node: usize, card: usize) -> usize {
        let node_slot = node_slot(node).expect("valid node");
        4 * self.n_cards * (player - 1) + node_slot * self.n_cards + card - 1
    }

    pub fn slot(&self, index: usize) -> Slot {
        assert!(index < self.len(), "index {index} out of range");
        let player = index / (4 * self.n_cards);
        let rest = index % (4 * self.n_cards);
        Slot {
            player: player + 1,
            node: PLAYER_NODES[player][rest / self.n_cards],
            card: rest % self.n_cards + 1,
        }
    }
}

/// 0-based flat index of the frequency for `player` at `node` holding `card`.
pub fn freq_index(player: usize, node: usize, card: usize, n_cards: usize) -> Result<usize> {
    Layout::new(n_cards)?.index(Slot { player, node, card })
}

/// Which frequencies are pinned, and to what value.
#[derive(Debug, Clone, PartialEq)]
pub struct PinSet {
    layout: Layout,
    pins: Vec<Option<f64>>,
}

impl PinSet {
    /// Pins from strategic dominance: the best card always bets or calls at
    /// nodes 3 to 12, the worst card always folds at nodes 4 to 12 and the
    /// second worst always folds at nodes 6, 9 and 12.
    pub fn dominance(n_cards: usize) -> Result<Self> {
        Self::build(n_cards, Variant::Full, true)
    }

    pub fn build(n_cards: usize, variant: Variant, dominance: bool) -> Result<Self> {
        let layout = Layout::new(n_cards)?;
        if variant == Variant::Simplified && n_cards != 4 {
            return Err(Error::InvalidSpec(format!(
                "simplified Kuhn poker is played with 4 cards, got {n_cards}"
            )));
        }
        let mut pins = vec![None; layout.len()];
        let n = n_cards;
        for (idx, pin) in pins.iter_mut().enumerate() {
            let Slot { node, card, .. } = layout.slot(idx);
            if dominance {
                if card == n && node >= 3 {
                    *pin = Some(1.0);
                } else if card == 1 && node >= 4 {
                    *pin = Some(0.0);
                } else if card == 2 && matches!(node, 6 | 9 | 12) {
                    *pin = Some(0.0);
                }
            }
            if variant == Variant::Simplified && card == 1 {
                *pin = Some(0.0);
            }
        }
        Ok(PinSet { layout, pins })
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn is_fixed(&self, index: usize) -> bool {
        self.pins[index].is_some()
    }

    pub fn value(&self, index: usize) -> Option<f64> {
        self.pins[index]
    }

    pub fn fixed_count(&self) -> usize {
        self.pins.iter().filter(|p| p.is_some()).count()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.pins.len()).filter(|&i| self.pins[i].is_none()).collect()
    }

    /// Full profile from free values in ascending index order.
    pub fn embed(&self, free: &[f64]) -> Vec<f64> {
        let mut it = free.iter();
        let full: Vec<f64> = self
            .pins
            .iter()
            .map(|pin| match pin {
                Some(v) => *v,
                None => *it.next().expect("free vector too short"),
            })
            .collect();
        assert!(it.next().is_none(), "free vector too long");
        full
    }

    pub fn extract_free(&self, full: &[f64]) -> Vec<f64> {
        full.iter()
            .zip(&self.pins)
            .filter(|(_, pin)| pin.is_none())
            .map(|(x, _)| *x)
            .collect()
    }
}

/// Dominance mask and pinned values for the full game.
pub fn fixed_mask(n_cards: usize) -> Result<(Vec<bool>, Vec<f64>)> {
    let pins = PinSet::dominance(n_cards)?;
    let mask = pins.pins.iter().map(Option::is_some).collect();
    let values = pins.pins.iter().map(|p| p.unwrap_or(0.0)).collect();
    Ok((mask, values))
}

/// A complete vector of 12N aggressive-action frequencies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    frequencies: Vec<f64>,
}

impl StrategyProfile {
    pub fn new(pins: &PinSet, free: &[f64]) -> Result<Self> {
        if free.len() != pins.free_indices().len() {
            return Err(Error::Contract(format!(
                "expected {} free frequencies, got {}",
                pins.free_indices().len(),
                free.len()
            )));
        }
        if let Some(bad) = free.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("frequency {bad} outside [0, 1]")));
        }
        Ok(StrategyProfile {
            frequencies: pins.embed(free),
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.frequencies
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        assert_eq!(freq_index(1, 1, 1, 4).unwrap() + 1, 1);
        assert_eq!(freq_index(2, 2, 1, 4).unwrap() + 1, 17);
        assert_eq!(freq_index(3, 12, 4, 4).unwrap() + 1, 48);
    }

    #[test]
    fn index_rejects_foreign_node() {
        assert!(matches!(freq_index(1, 2, 1, 4), Err(Error::Contract(_))));
        assert!(matches!(freq_index(3, 13, 1, 4), Err(Error::Contract(_))));
        assert!(matches!(freq_index(3, 3, 5, 4), Err(Error::Contract(_))));
    }

    #[test]
    fn index_is_a_bijection() {
        for n in 4..9 {
            let layout = Layout::new(n).unwrap();
            let mut seen = vec![false; layout.len()];
            for (p, nodes) in PLAYER_NODES.iter().enumerate() {
                for &node in nodes {
                    for card in 1..=n {
                        let slot = Slot { player: p + 1, node, card };
                        let i = layout.index(slot).unwrap();
                        assert!(!seen[i]);
                        seen[i] = true;
                        assert_eq!(layout.slot(i), slot);
                    }
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn dominance_counts() {
        let (mask, values) = fixed_mask(4).unwrap();
        assert_eq!(mask.iter().filter(|&&m| m).count(), 22);
        assert_eq!(mask.len() - 22, 26);
        let (mask5, _) = fixed_mask(5).unwrap();
        assert_eq!(mask5.iter().filter(|&&m| !m).count(), 38);
        let top = freq_index(3, 3, 4, 4).unwrap();
        assert!(mask[top]);
        assert_eq!(values[top], 1.0);
        // The best card may still sandbag at nodes 1 and 2.
        assert!(!mask[freq_index(1, 1, 4, 4).unwrap()]);
        assert!(!mask[freq_index(2, 2, 4, 4).unwrap()]);
    }

    #[test]
    fn simplified_adds_three_pins() {
        let pins = PinSet::build(4, Variant::Simplified, true).unwrap();
        assert_eq!(pins.fixed_count(), 25);
        assert!(PinSet::build(5, Variant::Simplified, true).is_err());
        assert_eq!(PinSet::build(6, Variant::Full, false).unwrap().fixed_count(), 0);
    }

    #[test]
    fn embed_extract_round_trip() {
        let pins = PinSet::dominance(5).unwrap();
        let free: Vec<f64> = (0..38).map(|i| i as f64 / 38.0).collect();
        let full = pins.embed(&free);
        assert_eq!(full.len(), 60);
        assert_eq!(pins.extract_free(&full), free);
    }

    #[test]
    fn labels() {
        let s = Slot { player: 2, node: 10, card: 7 };
        assert_eq!(s.label(), "p2_n10_c7");
        assert_eq!(Slot::parse_label("p2_n10_c7"), Some(s));
        assert_eq!(Slot::parse_label("p2_n10"), None);
    }
}
