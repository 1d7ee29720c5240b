//! Small dense linear algebra and linear programming.
//!
//! Everything here is sized for games with a handful of strategies per player.

/// Largest strategy count for which maximin programs are solved by vertex enumeration.
pub const VERTEX_ENUM_LIMIT: usize = 8;

const PIVOT_TOL: f64 = 1e-12;
const FEAS_TOL: f64 = 1e-9;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when the matrix is numerically singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= PIVOT_TOL * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (t, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *t -= f * p;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// All index subsets of `0..n` with exactly `k` elements, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Optimal mixture for the maximizing row player of `gaps` (rows = own choices,
/// columns = opponent choices) and the guaranteed value.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximin {
    pub value: f64,
    pub weights: Vec<f64>,
}

/// `max_{σ ∈ Δ} min_o Σ_k σ_k gaps[k][o]`.
pub fn maximin(gaps: &[Vec<f64>]) -> Maximin {
    let k = gaps.len();
    let o = gaps.first().map_or(0, Vec::len);
    assert!(k > 0 && o > 0, "maximin needs a nonempty matrix");
    if k <= VERTEX_ENUM_LIMIT && o <= VERTEX_ENUM_LIMIT {
        if let Some(m) = maximin_vertices(gaps) {
            return m;
        }
    }
    maximin_simplex(gaps)
}

fn guaranteed(gaps: &[Vec<f64>], w: &[f64]) -> f64 {
    let o = gaps[0].len();
    (0..o)
        .map(|c| gaps.iter().zip(w).map(|(row, p)| p * row[c]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

fn maximin_vertices(gaps: &[Vec<f64>]) -> Option<Maximin> {
    let (k, o) = (gaps.len(), gaps[0].len());
    let mut best: Option<Maximin> = None;
    for s in 1..=k.min(o) {
        for support in combinations(k, s) {
            for active in combinations(o, s) {
                // unknowns: σ over support, then t
                let mut a = Vec::with_capacity(s + 1);
                let mut b = Vec::with_capacity(s + 1);
                for &c in &active {
                    let mut row: Vec<f64> = support.iter().map(|&r| gaps[r][c]).collect();
                    row.push(-1.0);
                    a.push(row);
                    b.push(0.0);
                }
                let mut row = vec![1.0; s];
                row.push(0.0);
                a.push(row);
                b.push(1.0);
                let Some(sol) = solve_linear(a, b) else { continue };
                if sol[..s].iter().any(|&p| p < -FEAS_TOL) {
                    continue;
                }
                let mut w = vec![0.0; k];
                for (&r, &p) in support.iter().zip(&sol) {
                    w[r] = p.max(0.0);
                }
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|p| *p /= total);
                let value = guaranteed(gaps, &w);
                if best.as_ref().is_none_or(|b| value > b.value) {
                    best = Some(Maximin { value, weights: w });
                }
            }
        }
    }
    best
}

fn maximin_simplex(gaps: &[Vec<f64>]) -> Maximin {
    let (k, o) = (gaps.len(), gaps[0].len());
    // shift so the value is positive and t can be a nonnegative variable
    let lo = gaps.iter().flatten().fold(f64::INFINITY, |m, &v| m.min(v));
    let shift = 1.0 - lo;
    let mut cons = Vec::with_capacity(o + 1);
    for c in 0..o {
        let mut coeffs: Vec<f64> = gaps.iter().map(|row| -(row[c] + shift)).collect();
        coeffs.push(1.0);
        cons.push(Constraint::new(coeffs, Relation::Le, 0.0));
    }
    let mut sum = vec![1.0; k];
    sum.push(0.0);
    cons.push(Constraint::new(sum, Relation::Eq, 1.0));
    let mut obj = vec![0.0; k];
    obj.push(1.0);
    match maximize(&obj, &cons) {
        LpOutcome::Optimal { x, .. } => {
            let w = x[..k].to_vec();
            Maximin {
                value: guaranteed(gaps, &w),
                weights: w,
            }
        }
        // the program is feasible and bounded by construction
        other => unreachable!("maximin program reported {other:?}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, rel: Relation, rhs: f64) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, obj: &mut [f64], r: usize, col: usize) {
        let p = self.rows[r][col];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            let f = row[col];
            if i != r && f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = obj[col];
        if f != 0.0 {
            obj.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
        }
        self.basis[r] = col;
    }

    /// Reduced-cost row for maximizing `cost` over the current basis.
    fn objective(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj = cost.to_vec();
        obj.resize(self.width + 1, 0.0);
        for (r, &b) in self.basis.iter().enumerate() {
            let f = obj[b];
            if f != 0.0 {
                obj.iter_mut().zip(&self.rows[r]).for_each(|(v, p)| *v -= f * p);
            }
        }
        obj
    }

    /// Bland's rule iterations; `false` if unbounded.
    fn run(&mut self, obj: &mut [f64], allowed: usize) -> bool {
        for _ in 0..50_000 {
            let Some(col) = (0..allowed).find(|&j| obj[j] > FEAS_TOL * 1e-1) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - PIVOT_TOL
                                || (ratio <= lratio + PIVOT_TOL && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(obj, r, col);
        }
        panic!("simplex failed to terminate under Bland's rule");
    }
}

/// Maximizes `c·x` subject to `constraints` and `x ≥ 0` with a dense two-phase simplex.
pub fn maximize(c: &[f64], constraints: &[Constraint]) -> LpOutcome {
    let n = c.len();
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|k| k.rel != Relation::Eq).count();
    // artificial for every row: simplest correct start, unused ones leave the basis at once
    let width = n + n_slack + m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = n;
    for (i, con) in constraints.iter().enumerate() {
        assert_eq!(con.coeffs.len(), n, "constraint {i} has the wrong width");
        let sign = if con.rhs < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for (j, &a) in con.coeffs.iter().enumerate() {
            row[j] = sign * a;
        }
        match con.rel {
            Relation::Le => row[slack] = sign,
            Relation::Ge => row[slack] = -sign,
            Relation::Eq => {}
        }
        if con.rel != Relation::Eq {
            slack += 1;
        }
        row[n + n_slack + i] = 1.0;
        row[width] = sign * con.rhs;
        rows.push(row);
        basis.push(n + n_slack + i);
    }
    let mut tab = Tableau { rows, basis, width };

    let mut phase1 = vec![0.0; width];
    phase1[n + n_slack..].iter_mut().for_each(|v| *v = -1.0);
    let mut obj = tab.objective(&phase1);
    tab.run(&mut obj, width);
    let infeasibility: f64 = (0..m)
        .filter(|&r| tab.basis[r] >= n + n_slack)
        .map(|r| tab.rhs(r))
        .sum();
    if infeasibility > FEAS_TOL {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis where possible
    for r in 0..m {
        if tab.basis[r] >= n + n_slack {
            if let Some(col) = (0..n + n_slack).find(|&j| tab.rows[r][j].abs() > FEAS_TOL) {
                let mut dummy = vec![0.0; width + 1];
                tab.pivot(&mut dummy, r, col);
            }
        }
    }

    let mut cost = c.to_vec();
    cost.resize(width, 0.0);
    let mut obj = tab.objective(&cost);
    if !tab.run(&mut obj, n + n_slack) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(r).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn linear_solve() {
        let x = solve_linear(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], 1.4, epsilon = 1e-14);
        assert!(solve_linear(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn matching_pennies_value() {
        let m = maximin(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert_abs_diff_eq!(m.value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.weights[0], 0.5, epsilon = 1e-12);
        let s = maximin_simplex(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert_abs_diff_eq!(s.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn simplex_basic() {
        // max 3x + 2y st x + y <= 4, x + 3y <= 6, x <= 3
        let cons = vec![
            Constraint::new(vec![1.0, 1.0], Relation::Le, 4.0),
            Constraint::new(vec![1.0, 3.0], Relation::Le, 6.0),
            Constraint::new(vec![1.0, 0.0], Relation::Le, 3.0),
        ];
        match maximize(&[3.0, 2.0], &cons) {
            LpOutcome::Optimal { value, x } => {
                assert_abs_diff_eq!(value, 11.0, epsilon = 1e-12);
                assert_abs_diff_eq!(x[0], 3.0, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let infeasible = vec![
            Constraint::new(vec![1.0], Relation::Ge, 2.0),
            Constraint::new(vec![1.0], Relation::Le, 1.0),
        ];
        assert_eq!(maximize(&[1.0], &infeasible), LpOutcome::Infeasible);
        let unbounded = vec![Constraint::new(vec![1.0, -1.0], Relation::Le, 1.0)];
        assert_eq!(maximize(&[1.0, 1.0], &unbounded), LpOutcome::Unbounded);
    }

    proptest! {
        #[test]
        fn vertex_and_simplex_agree(
            k in 1usize..5,
            o in 1usize..5,
            vals in prop::collection::vec(-5.0f64..5.0, 25),
        ) {
            let gaps: Vec<Vec<f64>> = (0..k).map(|r| vals[r * 5..r * 5 + o].to_vec()).collect();
            let v = maximin(&gaps);
            let s = maximin_simplex(&gaps);
            prop_assert!((v.value - s.value).abs() < 1e-8, "{} vs {}", v.value, s.value);
            prop_assert!((v.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            // no pure row does better than the optimum
            for row in &gaps {
                let pure = row.iter().cloned().fold(f64::INFINITY, f64::min);
                prop_assert!(pure <= v.value + 1e-9);
            }
        }
    }
}
