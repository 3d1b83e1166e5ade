use crate::error::{Error, Result};

pub const MIN_CARDS: usize = 4;

/// Cards held by players 1, 2 and 3, each in `1..=N` and pairwise distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Deal([usize; 3]);

impl Deal {
    pub fn new(cards: [usize; 3]) -> Self {
        debug_assert!(cards[0] != cards[1] && cards[0] != cards[2] && cards[1] != cards[2]);
        Deal(cards)
    }

    /// Card of 1-based `player`.
    pub fn card(&self, player: usize) -> usize {
        self.0[player - 1]
    }

    pub fn cards(&self) -> [usize; 3] {
        self.0
    }
}

pub fn check_card_count(n_cards: usize) -> Result<()> {
    if n_cards < MIN_CARDS {
        return Err(Error::InvalidSpec(format!(
            "the deck needs more than three cards, got N = {n_cards}"
        )));
    }
    Ok(())
}

/// All ordered deals of three distinct cards, lexicographic.
pub fn enumerate_deals(n_cards: usize) -> Result<Vec<Deal>> {
    check_card_count(n_cards)?;
    let mut deals = Vec::with_capacity(n_cards * (n_cards - 1) * (n_cards - 2));
    for c1 in 1..=n_cards {
        for c2 in (1..=n_cards).filter(|&c| c != c1) {
            for c3 in (1..=n_cards).filter(|&c| c != c1 && c != c2) {
                deals.push(Deal([c1, c2, c3]));
            }
        }
    }
    Ok(deals)
}

pub fn deal_count(n_cards: usize) -> usize {
    n_cards * (n_cards - 1) * (n_cards - 2)
}
