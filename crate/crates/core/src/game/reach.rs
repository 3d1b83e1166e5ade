//! Probabilities of reaching decision nodes under a profile.

use super::deal::{enumerate_deals, Deal};
use super::layout::Layout;
use super::tree::{Action, TreeTopology};
use crate::error::Result;

fn deal_reach(topology: &TreeTopology, layout: &Layout, x: &[f64], deal: &Deal, node: usize) -> f64 {
    topology
        .node(node)
        .path
        .iter()
        .map(|&(at, action)| {
            let owner = topology.node(at).player;
            let p = x[layout.index_unchecked(owner, at, deal.card(owner))];
            match action {
                Action::Aggressive => p,
                Action::Passive => 1.0 - p,
            }
        })
        .product()
}

/// Probability that `node` is reached, averaged over all deals.
pub fn node_reach(topology: &TreeTopology, n_cards: usize, x: &[f64], node: usize) -> Result<f64> {
    let layout = Layout::new(n_cards)?;
    let deals = enumerate_deals(n_cards)?;
    let total: f64 = deals.iter().map(|d| deal_reach(topology, &layout, x, d, node)).sum();
    Ok(total / deals.len() as f64)
}

/// Probability that the owner of `node` reaches it while holding `card`,
/// conditioned on holding that card: the owner's own earlier actions are
/// taken with `card`, the opponents' are averaged over their possible cards.
pub fn reach_fraction(
    topology: &TreeTopology,
    n_cards: usize,
    x: &[f64],
    node: usize,
    card: usize,
) -> Result<f64> {
    let layout = Layout::new(n_cards)?;
    let owner = topology.node(node).player;
    let deals: Vec<Deal> = enumerate_deals(n_cards)?
        .into_iter()
        .filter(|d| d.card(owner) == card)
        .collect();
    let total: f64 = deals.iter().map(|d| deal_reach(topology, &layout, x, d, node)).sum();
    Ok(total / deals.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::build_topology;

    #[test]
    fn root_is_always_reached() {
        let topo = build_topology();
        let x = vec![0.3; 48];
        for card in 1..=4 {
            assert_eq!(reach_fraction(&topo, 4, &x, 1, card).unwrap(), 1.0);
        }
        assert_eq!(node_reach(&topo, 4, &x, 1).unwrap(), 1.0);
    }

    #[test]
    fn constant_profile() {
        let topo = build_topology();
        let x = vec![0.25; 60];
        // Node 4 follows check, check, bet.
        let want = 0.75 * 0.75 * 0.25;
        assert!((node_reach(&topo, 5, &x, 4).unwrap() - want).abs() < 1e-15);
        assert!((reach_fraction(&topo, 5, &x, 4, 2).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn always_betting_card_never_reaches_the_later_node() {
        let topo = build_topology();
        let layout = Layout::new(4).unwrap();
        let mut x = vec![0.5; 48];
        x[layout.index_unchecked(2, 2, 3)] = 1.0;
        assert_eq!(reach_fraction(&topo, 4, &x, 5, 3).unwrap(), 0.0);
        assert!(reach_fraction(&topo, 4, &x, 5, 2).unwrap() > 0.0);
    }
}
