//! Independent checks of solved equilibria.
//!
//! [`deviation_check`] measures the best unilateral gain of each player in
//! closed form. [`simulate`] plays the five-stage game (B moves, the oracle
//! answers or not, A moves) with a seeded generator.
//!
//! The generator is ChaCha8 (`rand_chacha`). Trials are split into shards of
//! [`SHARD_SIZE`]; shard `s` uses stream `s` of the generator seeded with the
//! user seed, so results do not depend on the number of worker threads.

use rand::distributions::{Bernoulli, Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{best_response_indices, BimatrixGame, MixedStrategy};
use crate::oracle::OracleFunction;
use crate::solver::OracleEquilibrium;

/// Default number of payment grid points.
pub const DEFAULT_X_GRID: usize = 10_000;
pub const SHARD_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationCertificate {
    pub max_gain_a_strategy: f64,
    pub max_gain_a_payment: f64,
    pub max_gain_b: f64,
    pub epsilon: f64,
    pub passed: bool,
    pub worst_deviation: String,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, x)| if x > best.1 { (i, x) } else { best },
    )
}

/// Best unilateral gains at the profile `eq` in the game with maximal matrix `r`.
pub fn deviation_check(
    m: &BimatrixGame,
    r: &BimatrixGame,
    f: &OracleFunction,
    eq: &OracleEquilibrium,
    epsilon: f64,
    x_grid: usize,
) -> DeviationCertificate {
    let i = f.eval_clamped(eq.x);
    let rows = m.row_values_a(&eq.s_b);
    let e_n = dot(&rows, eq.s_a.probs());
    let (best_row, best_val) = argmax(&rows);
    let e_r: f64 = (0..r.cols()).map(|j| eq.s_b[j] * r.a(0, j)).sum();
    let current = (1.0 - i) * e_n + i * e_r - eq.x;

    let gain_strategy = (1.0 - i) * (best_val - e_n);

    // with s_b fixed, A's best payoff at payment y is (1 - I(y)) max_row + I(y) E_r - y
    let value_at = |y: f64| {
        let iy = f.eval_clamped(y);
        (1.0 - iy) * best_val.max(e_n) + iy * e_r - y
    };
    let cap = f.x_cap();
    let mut payments: Vec<f64> = (0..x_grid.max(2))
        .map(|k| cap * k as f64 / (x_grid.max(2) - 1) as f64)
        .collect();
    payments.extend(f.breakpoints().iter().map(|p| p.0));
    payments.extend(eq.node_payments.iter().copied());
    payments.push(f.payment_end());
    let v = e_r - best_val;
    if v > 0.0 {
        match f.slope_x(1.0 / v) {
            Ok(span) => payments.extend([span.lo, span.hi]),
            Err(Error::SlopeOutOfRange { fallback, .. }) => payments.push(fallback),
            Err(_) => {}
        }
    }
    let (best_x, best_pay) = payments
        .into_iter()
        .filter(|y| (0.0..=cap).contains(y))
        .map(|y| (y, value_at(y)))
        .fold((eq.x, current), |b, c| if c.1 > b.1 { c } else { b });
    let gain_payment = best_pay - current;

    let cols = m.col_values_b(&eq.s_a);
    let b_values: Vec<f64> = (0..m.cols()).map(|j| (1.0 - i) * cols[j] + i * r.b(0, j)).collect();
    let e_b = dot(&b_values, eq.s_b.probs());
    let (best_col, best_b) = argmax(&b_values);
    let gain_b = best_b - e_b;

    let a_fails = gain_strategy.max(gain_payment) > epsilon;
    let worst_deviation = if a_fails {
        if gain_payment > gain_strategy + 1e-15 && (best_x - eq.x).abs() > 0.0 {
            let dir = if best_x < eq.x { "reduce" } else { "increase" };
            format!("{dir} payment to {best_x:.6} (A gains {gain_payment:.3e})")
        } else {
            format!(
                "A switches tentative strategy to {} (gain {gain_strategy:.3e})",
                m.row_label(best_row)
            )
        }
    } else if gain_b > epsilon {
        format!("B switches to {} (gain {gain_b:.3e})", m.col_label(best_col))
    } else {
        "none".to_string()
    };
    DeviationCertificate {
        max_gain_a_strategy: gain_strategy,
        max_gain_a_payment: gain_payment,
        max_gain_b: gain_b,
        epsilon,
        passed: !a_fails && gain_b <= epsilon,
        worst_deviation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub trials: u64,
    pub mean_e_a: f64,
    pub mean_e_b: f64,
    pub std_err_a: f64,
    pub std_err_b: f64,
    pub response_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum_a: f64,
    sq_a: f64,
    sum_b: f64,
    sq_b: f64,
    responses: u64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Plays `trials` rounds of the oracle game at the profile `(s_a, s_b, x)`.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    m: &BimatrixGame,
    f: &OracleFunction,
    s_a: &MixedStrategy,
    s_b: &MixedStrategy,
    x: f64,
    trials: u64,
    seed: u64,
) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(Error::EmptyInput);
    }
    if s_a.len() != m.rows() || s_b.len() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: s_a.len(),
        });
    }
    let alpha = best_response_indices(m)?.alpha;
    let i = f.eval(x)?;
    let a_dist = WeightedIndex::new(s_a.probs()).map_err(|e| Error::InvalidStrategy(e.to_string()))?;
    let b_dist = WeightedIndex::new(s_b.probs()).map_err(|e| Error::InvalidStrategy(e.to_string()))?;
    let respond = Bernoulli::new(i).map_err(|_| Error::InvalidProbability(i))?;

    let shards = trials.div_ceil(SHARD_SIZE);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let n = SHARD_SIZE.min(trials - s * SHARD_SIZE);
            let mut mo = Moments::default();
            for _ in 0..n {
                let j = b_dist.sample(&mut rng);
                let row = if respond.sample(&mut rng) {
                    mo.responses += 1;
                    alpha[j]
                } else {
                    a_dist.sample(&mut rng)
                };
                let c = m.cell(row, j);
                let pa = c.a - x;
                mo.sum_a += pa;
                mo.sq_a += pa * pa;
                mo.sum_b += c.b;
                mo.sq_b += c.b * c.b;
            }
            mo
        })
        .collect();

    let (mut sa, mut qa, mut sb, mut qb) = Default::default();
    let mut responses = 0;
    for p in &parts {
        Compensated::add(&mut sa, p.sum_a);
        Compensated::add(&mut qa, p.sq_a);
        Compensated::add(&mut sb, p.sum_b);
        Compensated::add(&mut qb, p.sq_b);
        responses += p.responses;
    }
    let n = trials as f64;
    let stats = |s: &Compensated, q: &Compensated| {
        let mean = s.value() / n;
        let var = if trials > 1 {
            ((q.value() - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        (mean, (var / n).sqrt())
    };
    let (mean_e_a, std_err_a) = stats(&sa, &qa);
    let (mean_e_b, std_err_b) = stats(&sb, &qb);
    Ok(SimulationResult {
        trials,
        mean_e_a,
        mean_e_b,
        std_err_a,
        std_err_b,
        response_rate: responses as f64 / n,
        seed,
    })
}
