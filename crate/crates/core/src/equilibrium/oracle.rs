//! Best-response oracle that walks the tree directly.
//!
//! Nothing here goes through the term list, so it checks the solver rather
//! than repeating it.

use crate::game::{
    enumerate_deals, terminal_payoff, Child, Deal, GameSpec, Layout, TreeTopology, Variant,
    build_topology, PLAYER_NODES,
};

/// Expected payoffs for one deal with action probabilities from `strategy`
/// (`player`, `node`, `card`) -> probability of the aggressive action.
pub fn deal_value<S>(topology: &TreeTopology, deal: &Deal, pot: f64, strategy: &S) -> [f64; 3]
where
    S: Fn(usize, usize, usize) -> f64,
{
    let mut acc = [0.0; 3];
    visit(topology, Child::Node(1), 1.0, deal, pot, strategy, &mut acc);
    acc
}

fn visit<S>(
    topology: &TreeTopology,
    at: Child,
    reach: f64,
    deal: &Deal,
    pot: f64,
    strategy: &S,
    acc: &mut [f64; 3],
) where
    S: Fn(usize, usize, usize) -> f64,
{
    match at {
        Child::Terminal(t) => {
            let v = terminal_payoff(topology.terminal(t), deal, pot);
            for k in 0..3 {
                acc[k] += reach * v[k];
            }
        }
        Child::Node(n) => {
            let node = topology.node(n);
            let p = strategy(node.player, n, deal.card(node.player));
            if p != 0.0 {
                visit(topology, node.aggressive, reach * p, deal, pot, strategy, acc);
            }
            if p != 1.0 {
                visit(topology, node.passive, reach * (1.0 - p), deal, pot, strategy, acc);
            }
        }
    }
}

/// Expectations by exhaustive tree walk over every deal.
pub fn tree_expectations(n_cards: usize, x: &[f64], pot: f64) -> [f64; 3] {
    let layout = Layout::new(n_cards).expect("valid deck");
    let topology = build_topology();
    let deals = enumerate_deals(n_cards).expect("valid deck");
    let strategy = |p: usize, n: usize, c: usize| x[layout.index_unchecked(p, n, c)];
    let mut acc = [0.0; 3];
    for deal in &deals {
        let v = deal_value(&topology, deal, pot, &strategy);
        for k in 0..3 {
            acc[k] += v[k];
        }
    }
    acc.map(|a| a / deals.len() as f64)
}

/// Best-response value minus current value for each player.
///
/// For every card a player may hold, all sixteen pure plans over the
/// player's four nodes are tried and the best kept. In simplified Kuhn poker
/// the card-1 restriction is a rule of the game, so those plans stay passive.
pub fn exploitability(spec: &GameSpec, x: &[f64], pot: f64) -> [f64; 3] {
    let n = spec.n_cards;
    let layout = Layout::new(n).expect("valid deck");
    assert_eq!(x.len(), layout.len());
    let topology = build_topology();
    let deals = enumerate_deals(n).expect("valid deck");
    let profile = |p: usize, node: usize, c: usize| x[layout.index_unchecked(p, node, c)];

    let mut result = [0.0; 3];
    for player in 1..=3 {
        let mut best_total = 0.0;
        let mut current_total = 0.0;
        for card in 1..=n {
            let hands: Vec<&Deal> = deals.iter().filter(|d| d.card(player) == card).collect();
            let value_of = |s: &dyn Fn(usize, usize, usize) -> f64| -> f64 {
                hands
                    .iter()
                    .map(|d| deal_value(&topology, d, pot, &s)[player - 1])
                    .sum()
            };
            current_total += value_of(&profile);
            let frozen = spec.variant == Variant::Simplified && card == 1;
            let plans: Vec<u8> = if frozen { vec![0] } else { (0..16).collect() };
            let best = plans
                .into_iter()
                .map(|plan| {
                    let s = |p: usize, node: usize, c: usize| {
                        if p == player {
                            let slot = PLAYER_NODES[p - 1].iter().position(|&m| m == node).unwrap();
                            f64::from((plan >> slot) & 1)
                        } else {
                            profile(p, node, c)
                        }
                    };
                    value_of(&s)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            best_total += best;
        }
        result[player - 1] = (best_total - current_total) / deals.len() as f64;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_terms, evaluate_expectations, PinSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tree_walk_agrees_with_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4, 5, 6] {
            let spec = GameSpec::new(n).unwrap();
            let terms = build_terms(&spec).unwrap();
            let x: Vec<f64> = (0..12 * n).map(|_| rng.gen()).collect();
            let pot = rng.gen_range(0.0..10.0);
            let a = tree_expectations(n, &x, pot);
            let b = evaluate_expectations(&terms, &x, pot);
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn never_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = GameSpec::new(5).unwrap();
        for _ in 0..5 {
            let x: Vec<f64> = (0..60).map(|_| rng.gen()).collect();
            let e = exploitability(&spec, &x, rng.gen_range(0.0..8.0));
            assert!(e.iter().all(|&v| v >= -1e-12), "{e:?}");
        }
    }

    #[test]
    fn bluffing_pays_above_min_pot() {
        let spec = GameSpec::new(4).unwrap();
        let x = PinSet::dominance(4).unwrap().embed(&vec![0.0; 26]);
        let e3 = exploitability(&spec, &x, 3.0)[2];
        assert!(e3 > 0.0);
        let at_one = exploitability(&spec, &x, 1.0);
        assert!(at_one.iter().all(|v| v.abs() < 1e-14), "{at_one:?}");
    }
}
