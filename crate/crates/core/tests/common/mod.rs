//! Helpers shared by the integration tests: seeded random games and a
//! brute-force equal-size support enumeration used as an independent reference.

#![allow(dead_code)]

use oracle_games::game::BimatrixGame;
use oracle_games::lp::{combinations, solve_linear};
use oracle_games::MixedStrategy;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape drawn uniformly from 2x2 through 4x4.
pub fn random_shape(rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.gen_range(2..=4), rng.gen_range(2..=4))
}

/// Payoffs uniform on [-5, 5]; continuous draws keep the game nondegenerate almost surely.
pub fn random_game(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BimatrixGame {
    let cells = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
                .collect()
        })
        .collect::<Vec<Vec<(f64, f64)>>>();
    BimatrixGame::from_rows(&cells).expect("finite payoffs")
}

pub fn random_zero_sum(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BimatrixGame {
    let a = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-5.0..5.0)).collect())
        .collect::<Vec<Vec<f64>>>();
    BimatrixGame::zero_sum(&a).expect("finite payoffs")
}

/// Mixture over `support` making the opponent indifferent across `other`, with `payoff(i, j)`
/// the opponent's payoff when this player plays `i` and the opponent `j`.
fn indifference(
    support: &[usize],
    other: &[usize],
    n: usize,
    payoff: impl Fn(usize, usize) -> f64,
) -> Option<(MixedStrategy, f64)> {
    let k = support.len();
    // unknowns: k probabilities and the common value
    let mut rows = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for &j in other {
        let mut r: Vec<f64> = support.iter().map(|&i| payoff(i, j)).collect();
        r.push(-1.0);
        rows.push(r);
        rhs.push(0.0);
    }
    let mut sum = vec![1.0; k];
    sum.push(0.0);
    rows.push(sum);
    rhs.push(1.0);
    let sol = solve_linear(rows, rhs)?;
    if sol[..k].iter().any(|&p| p < -1e-9) {
        return None;
    }
    let mut probs = vec![0.0; n];
    for (&i, &p) in support.iter().zip(&sol) {
        probs[i] = p.max(0.0);
    }
    Some((MixedStrategy::from_weights(&probs).ok()?, sol[k]))
}

/// All equilibria with equal-size supports; complete for nondegenerate games.
pub fn support_enumeration(game: &BimatrixGame) -> Vec<(MixedStrategy, MixedStrategy)> {
    let (m, n) = game.shape();
    let mut out = Vec::new();
    for k in 1..=m.min(n) {
        for rs in combinations(m, k) {
            for cs in combinations(n, k) {
                let Some((s_a, _)) = indifference(&rs, &cs, m, |i, j| game.b(i, j)) else {
                    continue;
                };
                let Some((s_b, _)) = indifference(&cs, &rs, n, |j, i| game.a(i, j)) else {
                    continue;
                };
                let rows = game.row_values_a(&s_b);
                let cols = game.col_values_b(&s_a);
                let best_a = rows.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let best_b = cols.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let ok_a = rs.iter().all(|&i| rows[i] >= best_a - 1e-9);
                let ok_b = cs.iter().all(|&j| cols[j] >= best_b - 1e-9);
                if ok_a && ok_b {
                    out.push((s_a, s_b));
                }
            }
        }
    }
    out
}
