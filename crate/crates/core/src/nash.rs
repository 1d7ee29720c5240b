//! Equilibria and dominance in a fixed bimatrix game.
//!
//! Equilibria are found by enumerating vertices of the two best-response
//! polytopes and matching complementary label sets. For nondegenerate games
//! this is equivalent to support enumeration; for degenerate games (as happen
//! at nodes) it returns the extreme points of every equilibrium component.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{BimatrixGame, MixedStrategy, PROB_TOL};
use crate::lp::{self, combinations, solve_linear, Constraint, LpOutcome, Relation};

/// Largest number of strategies per player accepted by [`solve_cross_section`].
pub const MAX_ENUM_SIZE: usize = 12;

/// Gap above which a strategy counts as strictly worse.
pub const DOMINANCE_TOL: f64 = 1e-9;

const BR_TOL: f64 = 1e-9;
const MERGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceMode {
    Weak,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceStatus {
    Undominated,
    WeaklyDominated,
    StrictlyDominated,
}

impl DominanceStatus {
    pub fn is_dominated(self) -> bool {
        self != DominanceStatus::Undominated
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub player: Player,
    pub strategy: usize,
    pub status: DominanceStatus,
    /// Dominating mixture as a full-length strategy (zero on `strategy`); `None` if undominated.
    pub witness: Option<MixedStrategy>,
    /// Smallest payoff gap of the best mixture; negative when undominated.
    pub margin: f64,
}

/// Payoff gaps of every other strategy over `j`, one row per other strategy.
fn gap_matrix(game: &BimatrixGame, player: Player, j: usize) -> (Vec<usize>, Vec<Vec<f64>>) {
    let (own, opp) = match player {
        Player::A => (game.rows(), game.cols()),
        Player::B => (game.cols(), game.rows()),
    };
    let pay = |s: usize, o: usize| match player {
        Player::A => game.a(s, o),
        Player::B => game.b(o, s),
    };
    let others: Vec<usize> = (0..own).filter(|&k| k != j).collect();
    let gaps = others
        .iter()
        .map(|&k| (0..opp).map(|o| pay(k, o) - pay(j, o)).collect())
        .collect();
    (others, gaps)
}

/// Largest guaranteed payoff advantage any mixture of the other strategies has over `j`.
///
/// Positive exactly when `j` is strictly dominated; `-inf` when there are no other strategies.
pub fn dominance_margin(game: &BimatrixGame, player: Player, j: usize) -> f64 {
    let (others, gaps) = gap_matrix(game, player, j);
    if others.is_empty() {
        return f64::NEG_INFINITY;
    }
    lp::maximin(&gaps).value
}

fn check_index(game: &BimatrixGame, player: Player, j: usize) -> Result<()> {
    let n = match player {
        Player::A => game.rows(),
        Player::B => game.cols(),
    };
    if j >= n {
        return Err(Error::DimensionMismatch { expected: n, got: j });
    }
    Ok(())
}

pub fn dominance_status(game: &BimatrixGame, player: Player, j: usize, mode: DominanceMode) -> Result<DominanceReport> {
    check_index(game, player, j)?;
    let (others, gaps) = gap_matrix(game, player, j);
    let n = others.len() + 1;
    let undominated = |margin| DominanceReport {
        player,
        strategy: j,
        status: DominanceStatus::Undominated,
        witness: None,
        margin,
    };
    if others.is_empty() {
        return Ok(undominated(f64::NEG_INFINITY));
    }
    let embed = |w: &[f64]| {
        let mut full = vec![0.0; n];
        for (&k, &p) in others.iter().zip(w) {
            full[k] = p;
        }
        MixedStrategy::from_weights(&full)
    };
    let best = lp::maximin(&gaps);
    if best.value > DOMINANCE_TOL {
        return Ok(DominanceReport {
            player,
            strategy: j,
            status: DominanceStatus::StrictlyDominated,
            witness: Some(embed(&best.weights)?),
            margin: best.value,
        });
    }
    if mode == DominanceMode::Strict || best.value < -DOMINANCE_TOL {
        return Ok(undominated(best.value));
    }
    // among mixtures with every gap >= -tol, push the total gap as high as possible
    let opp = gaps[0].len();
    let mut cons: Vec<Constraint> = (0..opp)
        .map(|o| {
            let coeffs = gaps.iter().map(|row| row[o]).collect();
            Constraint::new(coeffs, Relation::Ge, -DOMINANCE_TOL)
        })
        .collect();
    cons.push(Constraint::new(vec![1.0; others.len()], Relation::Eq, 1.0));
    let total: Vec<f64> = gaps.iter().map(|row| row.iter().sum()).collect();
    let LpOutcome::Optimal { x: w, .. } = lp::maximize(&total, &cons) else {
        return Ok(undominated(best.value));
    };
    let achieved: Vec<f64> = (0..opp)
        .map(|o| gaps.iter().zip(&w).map(|(row, p)| p * row[o]).sum())
        .collect();
    let max_gap = achieved.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_gap > DOMINANCE_TOL {
        let min_gap = achieved.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(DominanceReport {
            player,
            strategy: j,
            status: DominanceStatus::WeaklyDominated,
            witness: Some(embed(&w)?),
            margin: min_gap.max(0.0),
        })
    } else {
        Ok(undominated(best.value))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub s_a: MixedStrategy,
    pub s_b: MixedStrategy,
}

impl EquilibriumProfile {
    fn distance(&self, other: &EquilibriumProfile) -> f64 {
        self.s_a.max_abs_diff(&other.s_a).max(self.s_b.max_abs_diff(&other.s_b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub profiles: Vec<EquilibriumProfile>,
    pub unique: bool,
}

/// Largest gain either player gets from a pure deviation.
pub fn best_response_gap(game: &BimatrixGame, s_a: &MixedStrategy, s_b: &MixedStrategy) -> f64 {
    let rows = game.row_values_a(s_b);
    let cols = game.col_values_b(s_a);
    let e_a: f64 = rows.iter().zip(s_a.probs()).map(|(v, p)| v * p).sum();
    let e_b: f64 = cols.iter().zip(s_b.probs()).map(|(v, p)| v * p).sum();
    let best_a = rows.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let best_b = cols.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (best_a - e_a).max(best_b - e_b)
}

struct Vertex {
    point: Vec<f64>,
    /// bit `i` set when label `i` is tight
    labels: u32,
}

/// Vertices of `{z ≥ 0, W z ≤ 1}` other than the origin; `W` is `rows × dim` and positive.
///
/// Labels `0..dim` mark `z_k = 0`, labels `dim..dim+rows` mark tight inequalities.
fn polytope_vertices(w: &[Vec<f64>], dim: usize) -> Vec<Vertex> {
    let rows = w.len();
    let mut out: Vec<Vertex> = Vec::new();
    for tight in combinations(dim + rows, dim) {
        let mut a = Vec::with_capacity(dim);
        let mut b = Vec::with_capacity(dim);
        for &l in &tight {
            if l < dim {
                let mut row = vec![0.0; dim];
                row[l] = 1.0;
                a.push(row);
                b.push(0.0);
            } else {
                a.push(w[l - dim].clone());
                b.push(1.0);
            }
        }
        let Some(z) = solve_linear(a, b) else { continue };
        if z.iter().any(|&v| v < -PROB_TOL) || z.iter().all(|&v| v.abs() <= PROB_TOL) {
            continue;
        }
        let mut labels = 0u32;
        for (k, &v) in z.iter().enumerate() {
            if v.abs() <= PROB_TOL {
                labels |= 1 << k;
            }
        }
        let mut feasible = true;
        for (r, row) in w.iter().enumerate() {
            let s: f64 = row.iter().zip(&z).map(|(a, b)| a * b).sum();
            if s > 1.0 + PROB_TOL {
                feasible = false;
                break;
            }
            if s >= 1.0 - PROB_TOL {
                labels |= 1 << (dim + r);
            }
        }
        if !feasible {
            continue;
        }
        let dup = out
            .iter()
            .any(|v| v.point.iter().zip(&z).all(|(p, q)| (p - q).abs() <= PROB_TOL));
        if !dup {
            out.push(Vertex { point: z, labels });
        }
    }
    out
}

fn normalized(z: &[f64]) -> Result<MixedStrategy> {
    MixedStrategy::from_weights(&z.iter().map(|v| v.max(0.0)).collect::<Vec<_>>())
}

/// All extreme Nash equilibria of `game`.
pub fn solve_cross_section(game: &BimatrixGame) -> Result<EquilibriumSet> {
    let (m, n) = game.shape();
    if m > MAX_ENUM_SIZE || n > MAX_ENUM_SIZE {
        return Err(Error::TooLarge {
            rows: m,
            cols: n,
            limit: MAX_ENUM_SIZE,
        });
    }
    let min_a = game.cells().iter().map(|c| c.a).fold(f64::INFINITY, f64::min);
    let min_b = game.cells().iter().map(|c| c.b).fold(f64::INFINITY, f64::min);
    let spread = game.a_payoff_range().max(1.0);
    // strictly positive copies; equilibria are invariant under the shift
    let pa: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..n).map(|j| (game.a(i, j) - min_a + spread) / spread).collect())
        .collect();
    let pb_t: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| (game.b(i, j) - min_b + spread) / spread).collect())
        .collect();

    // x-polytope: x ≥ 0 (labels 0..m), B^T x ≤ 1 (labels m..m+n)
    let xs = polytope_vertices(&pb_t, m);
    // y-polytope: y ≥ 0 (labels m..m+n after remapping), A y ≤ 1 (labels 0..m)
    let ys: Vec<Vertex> = polytope_vertices(&pa, n)
        .into_iter()
        .map(|v| {
            let zero = v.labels & ((1 << n) - 1);
            let tight = v.labels >> n;
            Vertex {
                point: v.point,
                labels: tight | (zero << m),
            }
        })
        .collect();

    let all = (1u32 << (m + n)) - 1;
    let mut profiles: Vec<EquilibriumProfile> = Vec::new();
    for x in &xs {
        for y in &ys {
            if x.labels | y.labels != all {
                continue;
            }
            let p = EquilibriumProfile {
                s_a: normalized(&x.point)?,
                s_b: normalized(&y.point)?,
            };
            if !profiles.iter().any(|q| q.distance(&p) <= MERGE_TOL) {
                profiles.push(p);
            }
        }
    }
    if profiles.is_empty() {
        return Err(Error::NoEquilibriumFound);
    }
    let scale = spread.max(game.cells().iter().map(|c| c.b.abs()).fold(1.0, f64::max));
    for p in &profiles {
        let gap = best_response_gap(game, &p.s_a, &p.s_b);
        if gap > BR_TOL * scale {
            return Err(Error::Internal(format!(
                "enumerated profile fails best-response check by {gap:e}"
            )));
        }
    }
    let unique = profiles.len() == 1;
    Ok(EquilibriumSet { profiles, unique })
}

/// Cells that are simultaneously a column-best reply for A and a row-best reply for B.
pub fn pure_equilibria(game: &BimatrixGame) -> Vec<(usize, usize)> {
    let (m, n) = game.shape();
    let tol = 1e-12;
    let mut out = Vec::new();
    for i in 0..m {
        let row_best = (0..n).map(|j| game.b(i, j)).fold(f64::NEG_INFINITY, f64::max);
        for j in 0..n {
            let col_best = (0..m).map(|k| game.a(k, j)).fold(f64::NEG_INFINITY, f64::max);
            if game.a(i, j) >= col_best - tol && game.b(i, j) >= row_best - tol {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{cross_section, maximal_matrix};
    use approx::assert_abs_diff_eq;

    fn section(g: &BimatrixGame, i: f64) -> BimatrixGame {
        cross_section(g, &maximal_matrix(g).unwrap(), i).unwrap()
    }

    #[test]
    fn example1_equilibria() {
        let g = fixtures::example1();
        let eq = solve_cross_section(&g).unwrap();
        assert!(eq.unique);
        let p = &eq.profiles[0];
        assert_abs_diff_eq!(p.s_a[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.s_b[0], 2.0 / 3.0, epsilon = 1e-12);

        let eq = solve_cross_section(&section(&g, 1.0 / 3.0)).unwrap();
        assert!(eq.unique);
        let p = &eq.profiles[0];
        assert_abs_diff_eq!(p.s_a[0], 5.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.s_b[0], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn dominant_strategy_game() {
        let g = BimatrixGame::from_rows(&[vec![(3.0, 3.0), (2.0, 1.0)], vec![(1.0, 2.0), (0.0, 0.0)]]).unwrap();
        let eq = solve_cross_section(&g).unwrap();
        assert!(eq.unique);
        assert_eq!(eq.profiles[0].s_a, MixedStrategy::pure(2, 0));
        assert_eq!(eq.profiles[0].s_b, MixedStrategy::pure(2, 0));
        assert_eq!(pure_equilibria(&g), vec![(0, 0)]);
    }

    #[test]
    fn pure_equilibria_of_fixtures() {
        assert!(pure_equilibria(&fixtures::example1()).is_empty());
        assert!(pure_equilibria(&fixtures::two_blocks()).is_empty());
    }

    #[test]
    fn two_blocks_has_three_equilibria() {
        let eq = solve_cross_section(&fixtures::two_blocks()).unwrap();
        assert_eq!(eq.profiles.len(), 3);
        assert!(eq.profiles.iter().any(|p| p.s_a.support().len() == 4));
        let block = eq.profiles.iter().find(|p| p.s_a.support() == vec![2, 3]).unwrap();
        assert_abs_diff_eq!(block.s_a[2], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(block.s_b[2], 0.6, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_section_returns_extreme_points() {
        // The scaled matching-pennies game exactly at its node: B's mixture ranges over a segment
        let eq = solve_cross_section(&section(&fixtures::example1(), 0.5)).unwrap();
        assert_eq!(eq.profiles.len(), 2);
        let mut q: Vec<f64> = eq.profiles.iter().map(|p| p.s_b[0]).collect();
        q.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(q[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q[1], 1.0, epsilon = 1e-12);
        for p in &eq.profiles {
            assert_eq!(p.s_a, MixedStrategy::pure(2, 0));
        }
    }

    #[test]
    fn dominance_examples() {
        let g = fixtures::example1();
        for j in 0..2 {
            let r = dominance_status(&g, Player::B, j, DominanceMode::Weak).unwrap();
            assert_eq!(r.status, DominanceStatus::Undominated);
        }
        let r = dominance_status(&section(&g, 0.6), Player::B, 1, DominanceMode::Strict).unwrap();
        assert_eq!(r.status, DominanceStatus::StrictlyDominated);
        assert_eq!(r.witness.unwrap(), MixedStrategy::pure(2, 0));
        assert_abs_diff_eq!(r.margin, 0.2, epsilon = 1e-12);

        let g2 = fixtures::example2();
        let r = dominance_status(&section(&g2, 0.25), Player::B, 2, DominanceMode::Weak).unwrap();
        assert!(r.status.is_dominated());
        let w = r.witness.unwrap();
        assert_eq!(w[2], 0.0);
        assert!(w[0] > 0.0 && w[1] > 0.0);
        // exactly at the node the dominance is only weak
        let r = dominance_status(&section(&g2, 0.2), Player::B, 2, DominanceMode::Weak).unwrap();
        assert_eq!(r.status, DominanceStatus::WeaklyDominated);
        let r = dominance_status(&section(&g2, 0.2), Player::B, 2, DominanceMode::Strict).unwrap();
        assert_eq!(r.status, DominanceStatus::Undominated);
    }

    #[test]
    fn harmful_margins() {
        let g = fixtures::harmful();
        for (i, expected) in [(0.0, 0.5), (0.2, 0.2), (0.5, -0.25)] {
            assert_abs_diff_eq!(
                dominance_margin(&section(&g, i), Player::B, 2),
                expected,
                epsilon = 1e-12
            );
        }
        assert!(dominance_margin(&section(&g, 0.8), Player::B, 0) > 0.0);
        assert!(dominance_margin(&section(&g, 0.5), Player::B, 0) < 0.0);
    }

    #[test]
    fn too_large() {
        let g = BimatrixGame::zero_sum(&vec![vec![0.0; 13]; 2]).unwrap();
        assert!(matches!(solve_cross_section(&g), Err(Error::TooLarge { .. })));
    }
}
