//! Closed-form oracle for simplified Kuhn poker (SKP).
//!
//! SKP is the four-card game with every card-1 frequency forced to zero.
//! Eleven frequencies remain strategically relevant, named after the cards
//! A (4), K (3) and Q (2):
//!
//! - `a_i`: player `i` bets an A at its first node,
//! - `b_i`: player `i` bets a Q at its first node,
//! - `c_i`: player `i` calls with a K as the first to face a bet,
//! - `d_i`: player `i` calls with a K after the other opponent folded.
//!
//! The condition functions here are written per deal-count rather than per
//! deal. With the frequencies outside SKP at zero, the tree-derived ones in
//! [`crate::equilibrium`] equal them divided by [`DEAL_SCALE`], except the
//! rows for `a1` and `a2`, which are divided by half of it (see
//! [`TREE_ROW_SCALE`]). Signs and zero sets agree row by row.

use serde::Serialize;

use crate::equilibrium::{g_eval, g_inverse, EquilibriumSystem};
use crate::error::{Error, Result};
use crate::game::{GameSpec, Layout, Slot, Variant};
use crate::io::BranchTable;

/// Number of deals in the four-card game.
pub const DEAL_SCALE: f64 = 24.0;

/// Ratio of each SKP condition function to the tree-derived one, in state
/// order, when all frequencies outside SKP are zero.
pub const TREE_ROW_SCALE: [f64; 11] = [24.0, 24.0, 24.0, 12.0, 24.0, 24.0, 24.0, 12.0, 24.0, 24.0, 24.0];

/// Names of the SKP unknowns in state order.
pub const SKP_NAMES: [&str; 11] = ["c2", "d3", "b1", "a1", "c3", "d1", "b2", "a2", "c1", "d2", "b3"];

const C2: usize = 0;
const D3: usize = 1;
const B1: usize = 2;
const A1: usize = 3;
const C3: usize = 4;
const D1: usize = 5;
const B2: usize = 6;
const A2: usize = 7;
const C1: usize = 8;
const D2: usize = 9;
const B3: usize = 10;

/// Tree slot of each SKP unknown, in state order.
pub const SKP_SLOTS: [Slot; 11] = [
    Slot { player: 2, node: 10, card: 3 },
    Slot { player: 3, node: 11, card: 3 },
    Slot { player: 1, node: 1, card: 2 },
    Slot { player: 1, node: 1, card: 4 },
    Slot { player: 3, node: 7, card: 3 },
    Slot { player: 1, node: 8, card: 3 },
    Slot { player: 2, node: 2, card: 2 },
    Slot { player: 2, node: 2, card: 4 },
    Slot { player: 1, node: 4, card: 3 },
    Slot { player: 2, node: 5, card: 3 },
    Slot { player: 3, node: 3, card: 2 },
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkpState {
    /// `(c2, d3, b1, a1, c3, d1, b2, a2, c1, d2, b3)`.
    pub x: [f64; 11],
    pub pot: f64,
}

impl SkpState {
    pub fn new(x: [f64; 11], pot: f64) -> Result<Self> {
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("SKP frequency {v} outside [0, 1]")));
        }
        if !(pot >= 0.0) {
            return Err(Error::Domain(format!("pot {pot} is negative")));
        }
        Ok(SkpState { x, pot })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        SKP_NAMES.iter().position(|n| *n == name).map(|i| self.x[i])
    }

    /// Reads the eleven SKP frequencies out of a full four-card profile.
    pub fn from_profile(x_full: &[f64], pot: f64) -> Result<Self> {
        let layout = Layout::new(4)?;
        if x_full.len() != layout.len() {
            return Err(Error::Contract(format!(
                "expected {} frequencies, got {}",
                layout.len(),
                x_full.len()
            )));
        }
        let mut x = [0.0; 11];
        for (v, slot) in x.iter_mut().zip(SKP_SLOTS) {
            *v = x_full[layout.index(slot)?];
        }
        Ok(SkpState { x, pot })
    }

    /// Full four-card profile with the SKP frequencies in place and every
    /// other frequency at `rest`, apart from pinned entries.
    pub fn to_profile(&self, system: &EquilibriumSystem, rest: f64) -> Vec<f64> {
        let layout = system.terms().layout();
        let pins = system.pins();
        let mut full: Vec<f64> = (0..layout.len()).map(|i| pins.value(i).unwrap_or(rest)).collect();
        for (v, slot) in self.x.iter().zip(SKP_SLOTS) {
            full[layout.index(slot).expect("SKP slot")] = *v;
        }
        full
    }
}

/// The eleven SKP condition functions, summed over deals.
pub fn skp_f(s: &SkpState) -> [f64; 11] {
    let p = s.pot;
    let x = &s.x;
    let (c2, d3, b1, a1) = (x[C2], x[D3], x[B1], x[A1]);
    let (c3, d1, b2, a2) = (x[C3], x[D1], x[B2], x[A2]);
    let (c1, d2, b3) = (x[C1], x[D2], x[B3]);
    [
        p * b1 - 2.0 * a1,
        (p + 1.0) * b1 - 2.0 * a1,
        2.0 * p - 4.0 - (p + 1.0) * (c2 + d3),
        c2 + d3 - b3 - (1.0 + 0.5 * c3) * b2,
        (p + a1) * b2 + (b1 - 2.0) * a2,
        (p + 1.0) * b2 - 2.0 * a2,
        2.0 * p - 4.0 + 2.0 * a1 - (p + 1.0) * (c3 + d1),
        c3 + d1 - 0.5 * c3 * b1 - (1.0 + 0.5 * c1) * b3,
        (p + a2) * b3 + b2 - 2.0,
        (p + 1.0) * b3 + b1 - 2.0,
        2.0 * p - 4.0 + 2.0 * a1 + 2.0 * a2 - (p + 1.0) * (c1 + d2),
    ]
}

/// Bounds `[(2P-4)/(P+1), 2/(P+1)]` on the interior sums `c2+d3` and
/// `c3+d1` of Solution 1.
pub fn interior_bounds(pot: f64) -> (f64, f64) {
    ((2.0 * pot - 4.0) / (pot + 1.0), 2.0 / (pot + 1.0))
}

fn check_solution1_pot(pot: f64) -> Result<()> {
    if !(2.0..=3.0).contains(&pot) {
        return Err(Error::Domain(format!("Solution 1 needs 2 <= P <= 3, got {pot}")));
    }
    Ok(())
}

/// Solution 1 at pot `P`. The interior sums `(c2+d3, c3+d1)` default to the
/// midpoint of their bounds and are split evenly between the two terms.
pub fn skp_solution1(pot: f64, sums: Option<(f64, f64)>) -> Result<SkpState> {
    check_solution1_pot(pot)?;
    let (lo, hi) = interior_bounds(pot);
    let (s1, s2) = sums.unwrap_or((0.5 * (lo + hi), 0.5 * (lo + hi)));
    for s in [s1, s2] {
        if s < lo - 1e-15 || s > hi + 1e-15 {
            return Err(Error::Domain(format!("interior sum {s} outside [{lo}, {hi}]")));
        }
    }
    let mut x = [0.0; 11];
    x[C2] = 0.5 * s1;
    x[D3] = 0.5 * s1;
    x[C3] = 0.5 * s2;
    x[D1] = 0.5 * s2;
    x[B3] = hi;
    x[D2] = lo;
    SkpState::new(x, pot)
}

/// Right-hand side `F(X)` of the fixed-point equation for the interior sum
/// selected by the regularization.
pub fn limit_map(pot: f64, x: f64, k_minus: f64) -> f64 {
    let (lo, hi) = interior_bounds(pot);
    let frac = pot / (pot + 1.0);
    let tail = 2.0 * k_minus / (hi - x);
    g_eval(k_minus * frac / (x - lo) - tail) + g_eval(k_minus / (x - lo) - tail)
}

const BRACKET_MARGIN: f64 = 1e-9;

/// Root of `X = F(X)` strictly between the Solution 1 bounds, by bisection.
pub fn skp_limit_x(pot: f64, k_minus: f64) -> Result<f64> {
    if !(pot > 2.0 && pot < 3.0) {
        return Err(Error::Domain(format!("the limit equation needs 2 < P < 3, got {pot}")));
    }
    if !(k_minus > 0.0) {
        return Err(Error::Domain("k_minus must be positive".into()));
    }
    let (lo, hi) = interior_bounds(pot);
    let h = |x: f64| x - limit_map(pot, x, k_minus);
    let (mut a, mut b) = (lo + BRACKET_MARGIN, hi - BRACKET_MARGIN);
    let (ha, hb) = (h(a), h(b));
    if !(ha < 0.0 && hb > 0.0) {
        return Err(Error::Numerical(format!(
            "no sign change of X - F(X) on [{a}, {b}]: {ha}, {hb}"
        )));
    }
    while b - a > 4.0 * f64::EPSILON * b.abs() {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if h(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// O(eps) corrections `x = x_hat + eps * x_bar` about Solution 1 for the
/// components that Solution 1 determines uniquely, in SKP units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkpCorrection {
    pub b1: f64,
    pub a1: f64,
    pub b2: f64,
    pub a2: f64,
    pub c1: f64,
    pub b3: f64,
    pub d2: f64,
}

impl SkpCorrection {
    /// Correction for each SKP unknown in state order; `None` for the four
    /// interior frequencies whose corrections are not determined here.
    pub fn by_index(&self) -> [Option<f64>; 11] {
        let mut out = [None; 11];
        out[B1] = Some(self.b1);
        out[A1] = Some(self.a1);
        out[B2] = Some(self.b2);
        out[A2] = Some(self.a2);
        out[C1] = Some(self.c1);
        out[B3] = Some(self.b3);
        out[D2] = Some(self.d2);
        out
    }
}

pub fn skp_correction(hat: &SkpState, k_minus: f64) -> Result<SkpCorrection> {
    let p = hat.pot;
    if !(p > 2.0 && p < 3.0) {
        return Err(Error::Domain(format!("corrections need 2 < P < 3, got {p}")));
    }
    let (lo, hi) = interior_bounds(p);
    let pair = |sum: f64| -> Result<(f64, f64)> {
        if sum <= lo || sum >= hi {
            return Err(Error::Domain(format!(
                "interior sum {sum} on or outside the bounds [{lo}, {hi}]"
            )));
        }
        Ok((k_minus / ((p + 1.0) * (sum - lo)), k_minus / (hi - sum)))
    };
    let (b1, a1) = pair(hat.x[C2] + hat.x[D3])?;
    let (b2, a2) = pair(hat.x[C3] + hat.x[D1])?;
    let c1 = 0.5 * k_minus * (p + 1.0);
    let b3 = (g_inverse(lo)? - b1) / (p + 1.0);
    // The b3 condition, expanded to first order, gives
    // 2 a1 + 2 a2 - (P+1)(c1 + d2) = g^-1(b3_hat) with b3_hat = 2/(P+1).
    let d2 = (2.0 * a1 + 2.0 * a2 - (p + 1.0) * c1 - g_inverse(hi)?) / (p + 1.0);
    Ok(SkpCorrection { b1, a1, b2, a2, c1, b3, d2 })
}

/// Solution 1 with the interior sums at the root of `X = F(X)` and each sum
/// split as the leading-order conditions for `c2, d3` (and `c3, d1`) require.
pub fn selected_solution(pot: f64, k_minus: f64) -> Result<SkpState> {
    let x_star = skp_limit_x(pot, k_minus)?;
    let mut hat = skp_solution1(pot, Some((x_star, x_star)))?;
    let corr = skp_correction(&hat, k_minus)?;
    hat.x[C2] = g_eval(pot * corr.b1 - 2.0 * corr.a1);
    hat.x[D3] = g_eval((pot + 1.0) * corr.b1 - 2.0 * corr.a1);
    hat.x[C3] = g_eval(pot * corr.b2 - 2.0 * corr.a2);
    hat.x[D1] = g_eval((pot + 1.0) * corr.b2 - 2.0 * corr.a2);
    Ok(hat)
}

/// Starting guess for the four-card solver in the SKP variant: the selected
/// Solution 1 plus its first-order corrections (treating the tree system at
/// `eps` as the SKP one at `DEAL_SCALE * eps`), with every other free
/// frequency set from its condition function.
pub fn oracle_guess(system: &EquilibriumSystem, pot: f64, epsilon: f64, k_minus: f64) -> Result<Vec<f64>> {
    if system.spec().variant != Variant::Simplified {
        return Err(Error::Contract("oracle guess needs the simplified variant".into()));
    }
    let hat = selected_solution(pot, k_minus)?;
    let corr = skp_correction(&hat, k_minus)?;
    let scaled = DEAL_SCALE * epsilon;
    let mut state = hat;
    for (v, bar) in state.x.iter_mut().zip(corr.by_index()) {
        if let Some(bar) = bar {
            *v = (*v + scaled * bar).clamp(0.0, 1.0);
        }
    }
    // Frequencies outside SKP sit at nodes reached with probability O(eps),
    // so their condition functions are O(eps) too and must be evaluated at
    // the corrected state rather than at Solution 1 itself.
    let mut full = state.to_profile(system, 0.0);
    let f = system.assemble_f(&full, pot);
    let layout = system.terms().layout();
    let skp_indices: Vec<usize> = SKP_SLOTS.iter().map(|s| layout.index(*s).unwrap()).collect();
    for (&i, fk) in system.free_indices().iter().zip(&f) {
        if !skp_indices.contains(&i) {
            full[i] = g_eval(fk / epsilon);
        }
    }
    Ok(system.pins().extract_free(&full))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingPoint {
    pub pot: f64,
    pub b3_error: f64,
    pub d2_error: f64,
    pub sums: (f64, f64),
    pub bounds: (f64, f64),
    /// Root of `X = F(X)`, if `2 < P < 3`.
    pub limit: Option<f64>,
    pub limit_error: f64,
    /// Largest of the Solution 1 zero components.
    pub max_zero: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub tolerance: f64,
    pub points: Vec<EmbeddingPoint>,
    pub max_b3_error: f64,
    pub max_d2_error: f64,
    pub max_limit_error: f64,
    pub max_zero: f64,
    pub pass: bool,
}

/// Compares one point of an SKP-variant solution with Solution 1.
pub fn compare_point(state: &SkpState, tolerance: f64, k_minus: f64) -> Result<EmbeddingPoint> {
    let p = state.pot;
    check_solution1_pot(p)?;
    let (lo, hi) = interior_bounds(p);
    let x = &state.x;
    let sums = (x[C2] + x[D3], x[C3] + x[D1]);
    let limit = if p > 2.0 && p < 3.0 {
        Some(skp_limit_x(p, k_minus)?)
    } else {
        None
    };
    let limit_error = limit.map_or(0.0, |l| (sums.0 - l).abs().max((sums.1 - l).abs()));
    let max_zero = [B1, A1, B2, A2, C1].iter().map(|&i| x[i]).fold(0.0, f64::max);
    let b3_error = (x[B3] - hi).abs();
    let d2_error = (x[D2] - lo).abs();
    let in_bounds = |s: f64| s >= lo - tolerance && s <= hi + tolerance;
    let pass = b3_error < tolerance
        && d2_error < tolerance
        && in_bounds(sums.0)
        && in_bounds(sums.1)
        && limit_error < tolerance
        && max_zero <= tolerance;
    Ok(EmbeddingPoint {
        pot: p,
        b3_error,
        d2_error,
        sums,
        bounds: (lo, hi),
        limit,
        limit_error,
        max_zero,
        pass,
    })
}

/// Checks every point of an SKP-variant branch with `2 <= P <= 3` against
/// Solution 1 and the regularization-selected interior sums.
pub fn compare_embedding(table: &BranchTable, tolerance: f64, k_minus: f64) -> Result<EmbeddingReport> {
    if table.spec != GameSpec::simplified() {
        return Err(Error::Contract("branch was not traced in the simplified variant".into()));
    }
    let system = table.system()?;
    let mut points = Vec::new();
    for row in table.rows.iter().filter(|r| (2.0..=3.0).contains(&r.pot)) {
        let state = SkpState::from_profile(&system.embed(&row.x_free), row.pot)?;
        points.push(compare_point(&state, tolerance, k_minus)?);
    }
    let max = |f: fn(&EmbeddingPoint) -> f64| points.iter().map(f).fold(0.0, f64::max);
    Ok(EmbeddingReport {
        tolerance,
        max_b3_error: max(|p| p.b3_error),
        max_d2_error: max(|p| p.d2_error),
        max_limit_error: max(|p| p.limit_error),
        max_zero: max(|p| p.max_zero),
        pass: !points.is_empty() && points.iter().all(|p| p.pass),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::K_MINUS;

    fn zero_state(pot: f64) -> SkpState {
        SkpState::new([0.0; 11], pot).unwrap()
    }

    #[test]
    fn f_at_zero_state() {
        let f = skp_f(&zero_state(2.0));
        assert_eq!(f[2], 0.0);
        for p in [0.0, 1.5, 7.0] {
            let f = skp_f(&zero_state(p));
            assert_eq!(f[8], -2.0);
            assert_eq!(f[0], 0.0);
        }
    }

    #[test]
    fn solution1_examples() {
        let s = skp_solution1(2.0, None).unwrap();
        assert!((s.get("b3").unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.get("d2").unwrap(), 0.0);
        assert_eq!(interior_bounds(2.0), (0.0, 2.0 / 3.0));

        let s = skp_solution1(3.0, None).unwrap();
        assert_eq!(s.get("b3").unwrap(), 0.5);
        assert_eq!(s.get("d2").unwrap(), 0.5);
        assert_eq!(interior_bounds(3.0), (0.5, 0.5));

        let s = skp_solution1(2.5, None).unwrap();
        assert!((s.get("b3").unwrap() - 4.0 / 7.0).abs() < 1e-15);
        assert!((s.get("d2").unwrap() - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn solution1_domain() {
        assert!(matches!(skp_solution1(1.9, None), Err(Error::Domain(_))));
        assert!(matches!(skp_solution1(3.1, None), Err(Error::Domain(_))));
        assert!(matches!(skp_solution1(2.5, Some((0.9, 0.4))), Err(Error::Domain(_))));
        assert!(skp_solution1(2.5, Some((2.0 / 7.0, 4.0 / 7.0))).is_ok());
    }

    #[test]
    fn solution1_satisfies_conditions() {
        for i in 1..20 {
            let p = 2.0 + i as f64 / 20.0;
            let (lo, hi) = interior_bounds(p);
            let s = skp_solution1(p, Some((lo + 0.3 * (hi - lo), lo + 0.6 * (hi - lo)))).unwrap();
            let f = skp_f(&s);
            for k in [C2, D3, C3, D1, D2, B3] {
                assert!(f[k].abs() < 1e-14, "P={p} row {k}: {}", f[k]);
            }
            for k in [B1, A1, B2, A2, C1] {
                assert!(f[k] < 0.0, "P={p} row {k}: {}", f[k]);
            }
        }
    }

    #[test]
    fn limit_root() {
        let p = 2.5;
        let x = skp_limit_x(p, K_MINUS).unwrap();
        assert!(x > 2.0 / 7.0 && x < 4.0 / 7.0);
        assert!((x - limit_map(p, x, K_MINUS)).abs() < 1e-12);
        assert!(matches!(skp_limit_x(3.0, K_MINUS), Err(Error::Domain(_))));
    }

    #[test]
    fn corrections() {
        let hat = selected_solution(2.5, K_MINUS).unwrap();
        let c = skp_correction(&hat, K_MINUS).unwrap();
        assert!((c.c1 - 1.75 / std::f64::consts::PI).abs() < 1e-15);
        assert!(c.a1.is_finite() && c.a1 > 0.0);
        let x = hat.x[C2] + hat.x[D3];
        assert!((c.a1 - K_MINUS / (4.0 / 7.0 - x)).abs() < 1e-14);
        let edge = skp_solution1(2.5, Some((4.0 / 7.0, 0.4))).unwrap();
        assert!(matches!(skp_correction(&edge, K_MINUS), Err(Error::Domain(_))));
    }

    #[test]
    fn selected_split_matches_sum() {
        for p in [2.1, 2.5, 2.9] {
            let s = selected_solution(p, K_MINUS).unwrap();
            let x = skp_limit_x(p, K_MINUS).unwrap();
            assert!((s.x[C2] + s.x[D3] - x).abs() < 1e-12);
            assert!((s.x[C3] + s.x[D1] - x).abs() < 1e-12);
        }
    }
}
