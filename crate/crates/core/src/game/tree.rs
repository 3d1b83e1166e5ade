//! The fixed twelve-node betting tree.
//!
//! Player 1 acts first and may bet one unit or check. Each later player may
//! bet or check when nobody has bet yet, and call or fold once a bet is
//! facing them. The hand ends after three checks or once every player has
//! bet, called or folded.

use super::deal::Deal;

pub const NUM_NODES: usize = 12;
pub const NUM_TERMINALS: usize = 13;
pub const NUM_PLAYERS: usize = 3;

/// Decision nodes owned by each player, ascending. The position of a node in
/// its player's row is the node slot used by the frequency layout.
pub const PLAYER_NODES: [[usize; 4]; NUM_PLAYERS] = [[1, 4, 8, 9], [2, 5, 6, 10], [3, 7, 11, 12]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Bet or call.
    Aggressive,
    /// Check or fold.
    Passive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Child {
    Node(usize),
    Terminal(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionNode {
    pub id: usize,
    /// 1-based player number.
    pub player: usize,
    pub aggressive: Child,
    pub passive: Child,
    /// Actions leading from the root to this node.
    pub path: Vec<(usize, Action)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalNode {
    pub id: usize,
    pub folded: [bool; NUM_PLAYERS],
    /// Bets and calls of each player, in betting units.
    pub wagers: [u32; NUM_PLAYERS],
    pub path: Vec<(usize, Action)>,
}

impl TerminalNode {
    /// 0-based index of the winning player for `deal`.
    pub fn winner(&self, deal: &Deal) -> usize {
        (0..NUM_PLAYERS)
            .filter(|&p| !self.folded[p])
            .max_by_key(|&p| deal.card(p + 1))
            .expect("at least one player stays in")
    }

    pub fn pot_contributions(&self) -> u32 {
        self.wagers.iter().sum()
    }
}

#[derive(Debug, Clone, Copy)]
enum Next {
    Node(usize),
    End,
}

// (node, player, aggressive successor, passive successor)
const NODE_TABLE: [(usize, usize, Next, Next); NUM_NODES] = [
    (1, 1, Next::Node(10), Next::Node(2)),
    (2, 2, Next::Node(7), Next::Node(3)),
    (3, 3, Next::Node(4), Next::End),
    (4, 1, Next::Node(6), Next::Node(5)),
    (5, 2, Next::End, Next::End),
    (6, 2, Next::End, Next::End),
    (7, 3, Next::Node(9), Next::Node(8)),
    (8, 1, Next::End, Next::End),
    (9, 1, Next::End, Next::End),
    (10, 2, Next::Node(12), Next::Node(11)),
    (11, 3, Next::End, Next::End),
    (12, 3, Next::End, Next::End),
];

/// Owner (1-based) of decision node `node`.
pub fn node_player(node: usize) -> Option<usize> {
    NODE_TABLE
        .iter()
        .find(|row| row.0 == node)
        .map(|row| row.1)
}

/// Slot of `node` among its owner's four nodes.
pub fn node_slot(node: usize) -> Option<usize> {
    let player = node_player(node)?;
    PLAYER_NODES[player - 1].iter().position(|&n| n == node)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeTopology {
    nodes: Vec<DecisionNode>,
    terminals: Vec<TerminalNode>,
}

struct Walk {
    wagers: [u32; NUM_PLAYERS],
    folded: [bool; NUM_PLAYERS],
    path: Vec<(usize, Action)>,
}

pub fn build_topology() -> TreeTopology {
    let mut nodes: Vec<Option<DecisionNode>> = vec![None; NUM_NODES];
    let mut terminals = Vec::with_capacity(NUM_TERMINALS);
    let start = Walk {
        wagers: [0; NUM_PLAYERS],
        folded: [false; NUM_PLAYERS],
        path: Vec::new(),
    };
    expand(1, start, &mut nodes, &mut terminals);
    TreeTopology {
        nodes: nodes.into_iter().map(|n| n.expect("every node reached")).collect(),
        terminals,
    }
}

fn expand(
    node: usize,
    walk: Walk,
    nodes: &mut [Option<DecisionNode>],
    terminals: &mut Vec<TerminalNode>,
) -> Child {
    let (_, player, on_aggressive, on_passive) = NODE_TABLE[node - 1];
    let facing_bet = walk.wagers.iter().any(|&w| w > 0);
    let mut children = [Child::Terminal(0); 2];
    for (slot, (action, next)) in [(Action::Aggressive, on_aggressive), (Action::Passive, on_passive)]
        .into_iter()
        .enumerate()
    {
        let mut wagers = walk.wagers;
        let mut folded = walk.folded;
        match action {
            Action::Aggressive => wagers[player - 1] += 1,
            Action::Passive if facing_bet => folded[player - 1] = true,
            Action::Passive => {}
        }
        let mut path = walk.path.clone();
        path.push((node, action));
        children[slot] = match next {
            Next::Node(child) => expand(child, Walk { wagers, folded, path }, nodes, terminals),
            Next::End => {
                let id = terminals.len() + 1;
                terminals.push(TerminalNode {
                    id,
                    folded,
                    wagers,
                    path,
                });
                Child::Terminal(id)
            }
        };
    }
    nodes[node - 1] = Some(DecisionNode {
        id: node,
        player,
        aggressive: children[0],
        passive: children[1],
        path: walk.path,
    });
    Child::Node(node)
}

impl TreeTopology {
    pub fn nodes(&self) -> &[DecisionNode] {
        &self.nodes
    }

    pub fn terminals(&self) -> &[TerminalNode] {
        &self.terminals
    }

    pub fn node(&self, id: usize) -> &DecisionNode {
        &self.nodes[id - 1]
    }

    pub fn terminal(&self, id: usize) -> &TerminalNode {
        &self.terminals[id - 1]
    }

    /// The terminal reached by following `actions` from the root.
    pub fn terminal_after(&self, actions: &[Action]) -> Option<&TerminalNode> {
        self.terminals
            .iter()
            .find(|t| t.path.len() == actions.len() && t.path.iter().map(|s| s.1).eq(actions.iter().copied()))
    }

    /// The unique earlier node on the way to `node` controlled by the same
    /// player, if any. In this tree it is always left through its passive
    /// branch.
    pub fn same_player_passive_ancestor(&self, node: usize) -> Option<usize> {
        let target = self.node(node);
        target
            .path
            .iter()
            .find(|(n, _)| self.node(*n).player == target.player)
            .map(|(n, action)| {
                debug_assert_eq!(*action, Action::Passive);
                *n
            })
    }
}

/// Net result of `terminal` for each player when the pot holds `pot` units.
///
/// Every player has put `pot / 3` into the pot plus their own wager; the
/// winner collects the pot and all wagers.
pub fn terminal_payoff(terminal: &TerminalNode, deal: &Deal, pot: f64) -> [f64; NUM_PLAYERS] {
    let coeffs = payoff_coefficients(terminal, deal);
    coeffs.map(|c| c.eval(pot))
}

/// Payoff as an affine function of the pot, stored in thirds so the ante
/// `P/3` stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AffinePayoff {
    pub constant_thirds: i32,
    pub slope_thirds: i32,
}

impl AffinePayoff {
    pub fn eval(self, pot: f64) -> f64 {
        (self.constant_thirds as f64 + self.slope_thirds as f64 * pot) / 3.0
    }

    pub fn slope(self) -> f64 {
        self.slope_thirds as f64 / 3.0
    }
}

pub fn payoff_coefficients(terminal: &TerminalNode, deal: &Deal) -> [AffinePayoff; NUM_PLAYERS] {
    let winner = terminal.winner(deal);
    let total = terminal.pot_contributions() as i32;
    std::array::from_fn(|p| {
        let own = terminal.wagers[p] as i32;
        if p == winner {
            AffinePayoff {
                constant_thirds: 3 * (total - own),
                slope_thirds: 2,
            }
        } else {
            AffinePayoff {
                constant_thirds: -3 * own,
                slope_thirds: -1,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Action::{Aggressive as A, Passive as Pa};

    #[test]
    fn figure_counts() {
        let t = build_topology();
        assert_eq!(t.nodes().len(), 12);
        assert_eq!(t.terminals().len(), 13);
        assert_eq!(t.node(7).player, 3);
        for (p, row) in PLAYER_NODES.iter().enumerate() {
            for &n in row {
                assert_eq!(t.node(n).player, p + 1);
            }
        }
    }

    #[test]
    fn edges_match_figure() {
        let t = build_topology();
        let edge = |n: usize| (t.node(n).aggressive, t.node(n).passive);
        assert_eq!(edge(1), (Child::Node(10), Child::Node(2)));
        assert_eq!(edge(10), (Child::Node(12), Child::Node(11)));
        assert_eq!(edge(2), (Child::Node(7), Child::Node(3)));
        assert_eq!(edge(7), (Child::Node(9), Child::Node(8)));
        assert_eq!(edge(4), (Child::Node(6), Child::Node(5)));
        assert!(matches!(t.node(3).aggressive, Child::Node(4)));
        assert!(matches!(t.node(3).passive, Child::Terminal(_)));
        for n in [5, 6, 8, 9, 11, 12] {
            assert!(matches!(edge(n), (Child::Terminal(_), Child::Terminal(_))));
        }
    }

    #[test]
    fn every_node_but_root_has_one_parent() {
        let t = build_topology();
        let mut parents = [0usize; NUM_NODES + 1];
        for node in t.nodes() {
            for child in [node.aggressive, node.passive] {
                if let Child::Node(c) = child {
                    parents[c] += 1;
                }
            }
        }
        assert_eq!(parents[1], 0);
        assert!(parents[2..].iter().all(|&c| c == 1));
        let mut term_parents = [0usize; NUM_TERMINALS + 1];
        for node in t.nodes() {
            for child in [node.aggressive, node.passive] {
                if let Child::Terminal(c) = child {
                    term_parents[c] += 1;
                }
            }
        }
        assert!(term_parents[1..].iter().all(|&c| c == 1));
    }

    #[test]
    fn wagers_are_unit_and_folders_never_bet() {
        let t = build_topology();
        for term in t.terminals() {
            for p in 0..3 {
                assert!(term.wagers[p] <= 1);
                if term.folded[p] {
                    assert_eq!(term.wagers[p], 0);
                }
            }
            assert!(term.folded.iter().filter(|&&f| !f).count() >= 1);
        }
    }

    #[test]
    fn payoff_examples() {
        let t = build_topology();
        let all_check = t.terminal_after(&[Pa, Pa, Pa]).unwrap();
        assert_eq!(terminal_payoff(all_check, &Deal::new([2, 3, 4]), 3.0), [-1.0, -1.0, 2.0]);

        // P1 bets, P2 folds, P3 folds at node 11.
        let node11_fold = t.terminal_after(&[A, Pa, Pa]).unwrap();
        assert_eq!(terminal_payoff(node11_fold, &Deal::new([1, 2, 3]), 3.0), [2.0, -1.0, -1.0]);

        // P1 bets, P2 calls, P3 calls at node 12.
        let node12_call = t.terminal_after(&[A, A, A]).unwrap();
        assert_eq!(node12_call.wagers, [1, 1, 1]);
        assert_eq!(terminal_payoff(node12_call, &Deal::new([4, 2, 3]), 3.0), [4.0, -2.0, -2.0]);
    }

    #[test]
    fn payoffs_are_zero_sum_in_thirds() {
        let t = build_topology();
        let deal = Deal::new([3, 1, 2]);
        for term in t.terminals() {
            let c = payoff_coefficients(term, &deal);
            assert_eq!(c.iter().map(|a| a.constant_thirds).sum::<i32>(), 0);
            assert_eq!(c.iter().map(|a| a.slope_thirds).sum::<i32>(), 0);
        }
    }

    #[test]
    fn passive_ancestors() {
        let t = build_topology();
        assert_eq!(t.same_player_passive_ancestor(4), Some(1));
        assert_eq!(t.same_player_passive_ancestor(8), Some(1));
        assert_eq!(t.same_player_passive_ancestor(9), Some(1));
        assert_eq!(t.same_player_passive_ancestor(5), Some(2));
        assert_eq!(t.same_player_passive_ancestor(6), Some(2));
        for n in [1, 2, 3, 7, 10, 11, 12] {
            assert_eq!(t.same_player_passive_ancestor(n), None, "node {n}");
        }
    }

    #[test]
    fn longest_path_has_five_actions() {
        let t = build_topology();
        assert_eq!(t.terminals().iter().map(|x| x.path.len()).max(), Some(5));
        assert_eq!(t.terminal_after(&[Pa, Pa, A, A, A]).unwrap().path.len(), 5);
    }
}
