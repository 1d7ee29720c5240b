//! Payoff-matrix model and the expected-payoff arithmetic of the oracle game.
//!
//! The base game `M` and its maximal matrix `R` are both [`BimatrixGame`]s.
//! `R` copies, in every row, the cell of `M` at A's best response to each
//! column; it holds the payoffs realised when the oracle responds. The
//! perceived game at response probability `I` is the cell-wise blend
//! `(1 - I) M + I R` ([`cross_section`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(p) == 1` for mixed strategies.
pub const PROB_TOL: f64 = 1e-9;
/// Probabilities above this are in the support.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Two payoffs closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PayoffPair {
    pub a: f64,
    pub b: f64,
}

impl PayoffPair {
    pub const fn new(a: f64, b: f64) -> Self {
        PayoffPair { a, b }
    }

    fn blend(self, other: PayoffPair, weight: f64) -> PayoffPair {
        PayoffPair {
            a: (1.0 - weight) * self.a + weight * other.a,
            b: (1.0 - weight) * self.b + weight * other.b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Labels {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

/// An `m x n` grid of payoff pairs; rows are A's strategies, columns B's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    cells: Vec<PayoffPair>,
    labels: Option<Labels>,
}

impl BimatrixGame {
    pub fn new(rows: usize, cols: usize, cells: Vec<PayoffPair>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame(format!(
                "game must have at least one row and one column, got {rows}x{cols}"
            )));
        }
        if cells.len() != rows * cols {
            return Err(Error::InvalidGame(format!(
                "expected {} cells for a {rows}x{cols} game, got {}",
                rows * cols,
                cells.len()
            )));
        }
        if let Some(pos) = cells.iter().position(|c| !c.a.is_finite() || !c.b.is_finite()) {
            return Err(Error::InvalidGame(format!(
                "non-finite payoff at cell ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(BimatrixGame {
            rows,
            cols,
            cells,
            labels: None,
        })
    }

    /// Builds a game from nested rows of `(a, b)` pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidGame(format!(
                "row {i} has {} cells, expected {n}",
                rows[i].len()
            )));
        }
        let cells = rows.iter().flatten().map(|&(a, b)| PayoffPair::new(a, b)).collect();
        BimatrixGame::new(rows.len(), n, cells)
    }

    /// Zero-sum game from A's payoff matrix.
    pub fn zero_sum(a: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<(f64, f64)>> = a.iter().map(|r| r.iter().map(|&v| (v, -v)).collect()).collect();
        BimatrixGame::from_rows(&rows)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.rows.len() != self.rows || labels.cols.len() != self.cols {
            return Err(Error::InvalidGame(format!(
                "labels are {}x{}, game is {}x{}",
                labels.rows.len(),
                labels.cols.len(),
                self.rows,
                self.cols
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn cells(&self) -> &[PayoffPair] {
        &self.cells
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> PayoffPair {
        self.cells[i * self.cols + j]
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.cell(i, j).a
    }

    #[inline]
    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.cell(i, j).b
    }

    pub fn row_label(&self, i: usize) -> String {
        self.labels
            .as_ref()
            .map_or_else(|| format!("A{}", i + 1), |l| l.rows[i].clone())
    }

    pub fn col_label(&self, j: usize) -> String {
        self.labels
            .as_ref()
            .map_or_else(|| format!("B{}", j + 1), |l| l.cols[j].clone())
    }

    /// Spread of A's payoffs, `max - min`.
    pub fn a_payoff_range(&self) -> f64 {
        let (lo, hi) = self
            .cells
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                (lo.min(c.a), hi.max(c.a))
            });
        hi - lo
    }

    /// Restriction to the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::InvalidGame("empty subsupport".into()));
        }
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::InvalidGame(format!("row index {i} out of range")));
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::InvalidGame(format!("column index {j} out of range")));
        }
        let cells = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.cell(i, j))
            .collect();
        let mut sub = BimatrixGame::new(rows.len(), cols.len(), cells)?;
        if let Some(l) = &self.labels {
            sub.labels = Some(Labels {
                rows: rows.iter().map(|&i| l.rows[i].clone()).collect(),
                cols: cols.iter().map(|&j| l.cols[j].clone()).collect(),
            });
        }
        Ok(sub)
    }

    /// A's payoff of each pure row against `s_b`.
    pub fn row_values_a(&self, s_b: &MixedStrategy) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| s_b[j] * self.a(i, j)).sum())
            .collect()
    }

    /// B's payoff of each pure column against `s_a`.
    pub fn col_values_b(&self, s_a: &MixedStrategy) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| s_a[i] * self.b(i, j)).sum())
            .collect()
    }

    /// True when every pair of outcomes is ordered oppositely by the two players.
    pub fn is_strictly_competitive(&self) -> bool {
        let tol = 1e-12;
        self.cells.iter().enumerate().all(|(k, c1)| {
            self.cells[k + 1..].iter().all(|c2| {
                let da = c1.a - c2.a;
                let db = c1.b - c2.b;
                if da.abs() <= tol {
                    db.abs() <= tol
                } else if da > 0.0 {
                    db < -tol
                } else {
                    db > tol
                }
            })
        })
    }

    fn check_dims(&self, s_a: &MixedStrategy, s_b: &MixedStrategy) -> Result<()> {
        if s_a.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: s_a.len(),
            });
        }
        if s_b.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: s_b.len(),
            });
        }
        Ok(())
    }
}

/// Probability vector over one player's pure strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        if let Some(p) = probs
            .iter()
            .find(|p| !p.is_finite() || **p < -PROB_TOL || **p > 1.0 + PROB_TOL)
        {
            return Err(Error::InvalidStrategy(format!("probability {p} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidStrategy(format!("probabilities sum to {sum}")));
        }
        Ok(MixedStrategy(probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect()))
    }

    /// Normalizes nonnegative weights; tiny negative round-off is clipped.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let clipped: Vec<f64> = weights
            .iter()
            .map(|&w| if w < 0.0 && w > -1e-9 { 0.0 } else { w })
            .collect();
        if clipped.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidStrategy(format!("negative weight in {weights:?}")));
        }
        let sum: f64 = clipped.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidStrategy("weights sum to zero".into()));
        }
        Ok(MixedStrategy(clipped.iter().map(|w| w / sum).collect()))
    }

    pub fn pure(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        MixedStrategy(p)
    }

    pub fn uniform(n: usize) -> Self {
        MixedStrategy(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > SUPPORT_TOL).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.support().len() == 1
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &MixedStrategy, p: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let w: Vec<f64> = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| p * a + (1.0 - p) * b)
            .collect();
        MixedStrategy::from_weights(&w)
    }

    /// Re-embeds a strategy over `indices` into a vector of length `n`.
    pub fn embed(&self, indices: &[usize], n: usize) -> Self {
        let mut p = vec![0.0; n];
        for (k, &i) in indices.iter().enumerate() {
            p[i] = self.0[k];
        }
        MixedStrategy(p)
    }

    pub fn max_abs_diff(&self, other: &MixedStrategy) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for MixedStrategy {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// `alpha[j]` is A's best-response row to column `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponseMap {
    pub alpha: Vec<usize>,
}

pub fn best_response_indices(game: &BimatrixGame) -> Result<BestResponseMap> {
    let mut alpha = Vec::with_capacity(game.cols());
    for j in 0..game.cols() {
        let mut best = 0;
        for i in 1..game.rows() {
            if game.a(i, j) > game.a(best, j) + TIE_TOL {
                best = i;
            }
        }
        // any tie with the chosen row must be a full duplicate of it
        for i in 0..game.rows() {
            if i != best && (game.a(i, j) - game.a(best, j)).abs() <= TIE_TOL {
                if (game.b(i, j) - game.b(best, j)).abs() > TIE_TOL {
                    return Err(Error::AmbiguousBestResponse {
                        col: j,
                        first: best.min(i),
                        second: best.max(i),
                    });
                }
                best = best.min(i);
            }
        }
        alpha.push(best);
    }
    Ok(BestResponseMap { alpha })
}

pub fn maximal_matrix(game: &BimatrixGame) -> Result<BimatrixGame> {
    let br = best_response_indices(game)?;
    let cells = (0..game.rows())
        .flat_map(|_| br.alpha.iter().enumerate().map(|(j, &i)| game.cell(i, j)))
        .collect();
    let mut r = BimatrixGame::new(game.rows(), game.cols(), cells)?;
    r.labels = game.labels.clone();
    Ok(r)
}

/// The perceived game `(1 - I) M + I R`.
pub fn cross_section(m: &BimatrixGame, r: &BimatrixGame, i_val: f64) -> Result<BimatrixGame> {
    if m.shape() != r.shape() {
        return Err(Error::ShapeMismatch {
            left: m.shape(),
            right: r.shape(),
        });
    }
    if !(0.0..=1.0).contains(&i_val) {
        return Err(Error::InvalidProbability(i_val));
    }
    // exact endpoints, no round-off from the blend
    let cells = if i_val == 0.0 {
        m.cells.clone()
    } else if i_val == 1.0 {
        r.cells.clone()
    } else {
        m.cells
            .iter()
            .zip(&r.cells)
            .map(|(&mc, &rc)| mc.blend(rc, i_val))
            .collect()
    };
    Ok(BimatrixGame {
        rows: m.rows,
        cols: m.cols,
        cells,
        labels: m.labels.clone(),
    })
}

pub fn expected_payoffs(game: &BimatrixGame, s_a: &MixedStrategy, s_b: &MixedStrategy) -> Result<PayoffPair> {
    game.check_dims(s_a, s_b)?;
    let mut out = PayoffPair::default();
    for i in 0..game.rows() {
        for j in 0..game.cols() {
            let w = s_a[i] * s_b[j];
            let c = game.cell(i, j);
            out.a += w * c.a;
            out.b += w * c.b;
        }
    }
    Ok(out)
}

fn check_maximal(r: &BimatrixGame) -> Result<()> {
    let mut worst: f64 = 0.0;
    for i in 1..r.rows() {
        for j in 0..r.cols() {
            let (c0, ci) = (r.cell(0, j), r.cell(i, j));
            worst = worst.max((c0.a - ci.a).abs()).max((c0.b - ci.b).abs());
        }
    }
    if worst > 1e-12 {
        return Err(Error::NotMaximalMatrix(worst));
    }
    Ok(())
}

/// Payoffs to (A, B) when the oracle responds; the row of `r` is irrelevant.
fn response_pair(r: &BimatrixGame, s_b: &MixedStrategy) -> Result<PayoffPair> {
    check_maximal(r)?;
    if s_b.len() != r.cols() {
        return Err(Error::DimensionMismatch {
            expected: r.cols(),
            got: s_b.len(),
        });
    }
    Ok((0..r.cols()).fold(PayoffPair::default(), |acc, j| PayoffPair {
        a: acc.a + s_b[j] * r.a(0, j),
        b: acc.b + s_b[j] * r.b(0, j),
    }))
}

/// A's expected payoff `E_r` when the oracle responds.
pub fn response_payoff(_m: &BimatrixGame, r: &BimatrixGame, s_b: &MixedStrategy) -> Result<f64> {
    Ok(response_pair(r, s_b)?.a)
}

/// Value of information `E_r(s_b) - E_n(s_a, s_b)`, unclamped.
pub fn value_of_information(
    m: &BimatrixGame,
    r: &BimatrixGame,
    s_a: &MixedStrategy,
    s_b: &MixedStrategy,
) -> Result<f64> {
    let e_n = expected_payoffs(m, s_a, s_b)?.a;
    let e_r = response_payoff(m, r, s_b)?;
    Ok(e_r - e_n)
}

/// Value of information when A answers `s_b` optimally in `m`.
pub fn value_of_information_br(m: &BimatrixGame, r: &BimatrixGame, s_b: &MixedStrategy) -> Result<f64> {
    let e_r = response_payoff(m, r, s_b)?;
    let e_n = m.row_values_a(s_b).into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(e_r - e_n)
}

/// Full oracle-game payoffs: A's blended expectation minus the payment, and B's blend.
pub fn full_payoff(
    m: &BimatrixGame,
    r: &BimatrixGame,
    s_a: &MixedStrategy,
    s_b: &MixedStrategy,
    i_val: f64,
    x: f64,
) -> Result<PayoffPair> {
    if x < 0.0 {
        return Err(Error::NegativePayment(x));
    }
    if !(0.0..=1.0).contains(&i_val) {
        return Err(Error::InvalidProbability(i_val));
    }
    let silent = expected_payoffs(m, s_a, s_b)?;
    let respond = response_pair(r, s_b)?;
    Ok(PayoffPair {
        a: silent.a * (1.0 - i_val) + respond.a * i_val - x,
        b: silent.b * (1.0 - i_val) + respond.b * i_val,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn ms(p: &[f64]) -> MixedStrategy {
        MixedStrategy::new(p.to_vec()).unwrap()
    }

    #[test]
    fn best_responses_of_fixtures() {
        let br = best_response_indices(&fixtures::example1()).unwrap();
        assert_eq!(br.alpha, vec![0, 1]);
        let one = BimatrixGame::from_rows(&[vec![(5.0, -5.0)]]).unwrap();
        assert_eq!(best_response_indices(&one).unwrap().alpha, vec![0]);
        // B_3 column ties on (0, 0) in both rows
        let br = best_response_indices(&fixtures::harmful()).unwrap();
        assert_eq!(br.alpha, vec![0, 1, 0]);
    }

    #[test]
    fn ambiguous_tie_is_rejected() {
        let g = BimatrixGame::from_rows(&[vec![(1.0, 0.0)], vec![(1.0, 3.0)]]).unwrap();
        assert!(matches!(
            best_response_indices(&g),
            Err(Error::AmbiguousBestResponse { col: 0, .. })
        ));
        assert!(maximal_matrix(&g).is_err());
    }

    #[test]
    fn maximal_matrices() {
        let r = maximal_matrix(&fixtures::example1()).unwrap();
        for i in 0..2 {
            assert_eq!(r.cell(i, 0), PayoffPair::new(1.0, -1.0));
            assert_eq!(r.cell(i, 1), PayoffPair::new(2.0, -2.0));
        }
        let r = maximal_matrix(&fixtures::harmful()).unwrap();
        for i in 0..2 {
            assert_eq!(r.cell(i, 0), PayoffPair::new(4.0, -1.0));
            assert_eq!(r.cell(i, 1), PayoffPair::new(4.0, -1.0));
            assert_eq!(r.cell(i, 2), PayoffPair::new(0.0, 0.0));
        }
        let single = BimatrixGame::from_rows(&[vec![(1.0, 2.0), (3.0, 4.0)]]).unwrap();
        assert_eq!(maximal_matrix(&single).unwrap(), single);
    }

    #[test]
    fn cross_section_blends() {
        let m = fixtures::example1();
        let r = maximal_matrix(&m).unwrap();
        let half = cross_section(&m, &r, 0.5).unwrap();
        assert_eq!(half.cell(0, 1), PayoffPair::new(1.0, -1.0));
        assert_eq!(half.cell(1, 0), PayoffPair::new(0.5, -0.5));
        assert_eq!(cross_section(&m, &r, 0.0).unwrap(), m);
        assert_eq!(cross_section(&m, &r, 1.0).unwrap(), r);
        let other = fixtures::example2();
        assert!(matches!(
            cross_section(&m, &other, 0.3),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(cross_section(&m, &r, 1.5).is_err());
    }

    #[test]
    fn expected_payoff_examples() {
        let m = fixtures::example1();
        let third = ms(&[2.0 / 3.0, 1.0 / 3.0]);
        let p = expected_payoffs(&m, &third, &third).unwrap();
        assert_abs_diff_eq!(p.a, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.b, -2.0 / 3.0, epsilon = 1e-15);
        let p = expected_payoffs(&m, &MixedStrategy::pure(2, 0), &MixedStrategy::pure(2, 0)).unwrap();
        assert_eq!(p, PayoffPair::new(1.0, -1.0));
        let g2 = fixtures::example2();
        let s = ms(&[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]);
        let p = expected_payoffs(&g2, &s, &s).unwrap();
        assert_abs_diff_eq!(p.a, 4.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.b, -4.0 / 7.0, epsilon = 1e-15);
        assert!(matches!(
            expected_payoffs(&g2, &third, &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn response_payoff_examples() {
        let m = fixtures::example1();
        let r = maximal_matrix(&m).unwrap();
        let e = response_payoff(&m, &r, &ms(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert_abs_diff_eq!(e, 4.0 / 3.0, epsilon = 1e-15);
        assert_eq!(response_payoff(&m, &r, &MixedStrategy::pure(2, 0)).unwrap(), 1.0);
        let g2 = fixtures::example2();
        let r2 = maximal_matrix(&g2).unwrap();
        let e = response_payoff(&g2, &r2, &ms(&[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0])).unwrap();
        assert_abs_diff_eq!(e, 12.0 / 7.0, epsilon = 1e-15);
        assert!(matches!(
            response_payoff(&m, &m, &MixedStrategy::pure(2, 0)),
            Err(Error::NotMaximalMatrix(_))
        ));
    }

    #[test]
    fn value_of_information_examples() {
        let m = fixtures::example1();
        let r = maximal_matrix(&m).unwrap();
        let third = ms(&[2.0 / 3.0, 1.0 / 3.0]);
        let v = value_of_information(&m, &r, &third, &third).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-15);
        // pure s_b answered by its best response carries no value
        for j in 0..2 {
            let sb = MixedStrategy::pure(2, j);
            let sa = MixedStrategy::pure(2, j);
            assert_eq!(value_of_information(&m, &r, &sa, &sb).unwrap(), 0.0);
        }
        let g2 = fixtures::example2();
        let r2 = maximal_matrix(&g2).unwrap();
        let s = ms(&[4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]);
        let v = value_of_information(&g2, &r2, &s, &s).unwrap();
        assert_abs_diff_eq!(v, 8.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn full_payoff_examples() {
        let m = fixtures::example1();
        let r = maximal_matrix(&m).unwrap();
        let sa = ms(&[5.0 / 6.0, 1.0 / 6.0]);
        let sb = ms(&[2.0 / 3.0, 1.0 / 3.0]);
        let p = full_payoff(&m, &r, &sa, &sb, 1.0 / 3.0, 1.0 / 9.0).unwrap();
        assert_abs_diff_eq!(p.a, 7.0 / 9.0, epsilon = 1e-15);
        let p0 = full_payoff(&m, &r, &sa, &sb, 0.0, 0.0).unwrap();
        assert_eq!(p0, expected_payoffs(&m, &sa, &sb).unwrap());
        assert!(matches!(
            full_payoff(&m, &r, &sa, &sb, 0.5, -0.1),
            Err(Error::NegativePayment(_))
        ));

        let h = fixtures::harmful();
        let rh = maximal_matrix(&h).unwrap();
        let opt_out = MixedStrategy::pure(3, 2);
        for (i, x) in [(0.0, 0.0), (0.4, 0.3), (1.0, 2.5)] {
            let p = full_payoff(&h, &rh, &ms(&[0.3, 0.7]), &opt_out, i, x).unwrap();
            assert_eq!(p.a, -x);
            assert_eq!(p.b, 0.0);
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(BimatrixGame::new(0, 2, vec![]).is_err());
        assert!(BimatrixGame::new(1, 2, vec![PayoffPair::new(1.0, 1.0)]).is_err());
        assert!(BimatrixGame::new(1, 1, vec![PayoffPair::new(f64::NAN, 1.0)]).is_err());
        assert!(BimatrixGame::from_rows(&[vec![(1.0, 1.0)], vec![]]).is_err());
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![1.2, -0.2]).is_err());
        assert_eq!(MixedStrategy::new(vec![0.25, 0.75]).unwrap().support(), vec![0, 1]);
    }

    #[test]
    fn strictly_competitive_detection() {
        assert!(fixtures::example1().is_strictly_competitive());
        assert!(!fixtures::harmful().is_strictly_competitive());
    }
}
