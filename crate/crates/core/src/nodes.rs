//! Nodes and the piecewise structure of cross-section equilibria in `I`.
//!
//! A node is a value of `I` where one of B's strategies switches between
//! dominated and undominated in `M_I`. Between nodes B's equilibrium strategy
//! is constant, and A's is a rational function of `I`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{cross_section, value_of_information_br, BimatrixGame, MixedStrategy};
use crate::lp::solve_linear;
use crate::nash::{dominance_margin, dominance_status, solve_cross_section, DominanceMode, EquilibriumProfile, Player};

/// Grid cells used to bracket sign changes of the dominance margin.
pub const NODE_GRID: usize = 1024;
/// Bisection stops once the bracket is this narrow.
pub const NODE_TOL: f64 = 1e-10;
/// Events closer than this share one interval boundary.
pub const NODE_MERGE_TOL: f64 = 1e-9;

const DOMINATED_TOL: f64 = 1e-12;
const FORM_TOL: f64 = 1e-8;
/// Relative positions inside an interval where the chosen equilibrium is re-checked.
/// Slack allowed when checking a branch at the ends of its interval.
const BRANCH_TOL: f64 = 1e-9;
const PROBES: [f64; 6] = [1e-3, 0.1, 0.3, 0.7, 0.9, 1.0 - 1e-3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeDirection {
    BecomesDominated,
    BecomesUndominated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEvent {
    pub i_star: f64,
    /// Payment reaching `i_star`, once an oracle is known.
    pub x_star: Option<f64>,
    /// B strategy whose status changes.
    pub strategy: usize,
    pub direction: NodeDirection,
    /// Dominating mixture on the dominated side of the node.
    pub witness: Option<MixedStrategy>,
}

/// `(a + b I) / (c (1 - I))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaCoeff {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SaCoeff {
    pub fn eval(&self, i: f64) -> f64 {
        (self.a + self.b * i) / (self.c * (1.0 - i))
    }

    /// Same function with the smallest integer `c ≤ 1000` making `a`, `b` integral, if any.
    pub fn rationalized(&self) -> SaCoeff {
        let (a, b) = (self.a / self.c, self.b / self.c);
        let near = |v: f64| (v - v.round()).abs() <= 1e-9 * v.abs().max(1.0);
        (1..=1000)
            .map(f64::from)
            .find(|c| near(a * c) && near(b * c))
            .map_or(*self, |c| SaCoeff {
                a: (a * c).round(),
                b: (b * c).round(),
                c,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalAnalysis {
    pub i_lo: f64,
    pub i_hi: f64,
    pub b_support: Vec<usize>,
    pub a_support: Vec<usize>,
    pub s_b: MixedStrategy,
    /// Rational form of A's strategy; `None` when A's equilibrium mixtures form a continuum.
    pub s_a_coeffs: Option<Vec<SaCoeff>>,
    /// Extreme equilibrium strategies of A at the interval midpoint.
    pub s_a_extremes: Vec<MixedStrategy>,
    /// Value of information, constant on the interval.
    pub v: f64,
}

impl IntervalAnalysis {
    pub fn contains(&self, i: f64) -> bool {
        self.i_lo < i && i < self.i_hi
    }

    /// A's strategy at `i` from the rational form; at `i = 1` the limit is taken.
    pub fn s_a_at(&self, i: f64) -> Option<MixedStrategy> {
        let coeffs = self.s_a_coeffs.as_ref()?;
        let w: Vec<f64> = if 1.0 - i <= 1e-12 {
            // numerator vanishes at 1; the ratio tends to -b / c
            coeffs
                .iter()
                .map(|k| {
                    if (k.a + k.b).abs() <= 1e-9 {
                        -k.b / k.c
                    } else {
                        f64::INFINITY
                    }
                })
                .collect()
        } else {
            coeffs.iter().map(|k| k.eval(i)).collect()
        };
        if w.iter().any(|v| !v.is_finite()) {
            return None;
        }
        MixedStrategy::from_weights(&w).ok()
    }
}

fn margin_at(m: &BimatrixGame, r: &BimatrixGame, j: usize, i: f64) -> Result<f64> {
    Ok(dominance_margin(&cross_section(m, r, i)?, Player::B, j))
}

/// Dominance-status changes of B's strategies as `I` runs over `[0, 1]`.
pub fn find_nodes(m: &BimatrixGame, r: &BimatrixGame) -> Result<Vec<NodeEvent>> {
    let grid: Vec<f64> = (0..=NODE_GRID).map(|k| k as f64 / NODE_GRID as f64).collect();
    let mut events = Vec::new();
    for j in 0..m.cols() {
        let dominated = |i: f64| -> Result<bool> { Ok(margin_at(m, r, j, i)? > DOMINATED_TOL) };
        let states: Vec<bool> = grid.iter().map(|&i| dominated(i)).collect::<Result<_>>()?;
        let mut own = Vec::new();
        for (k, w) in states.windows(2).enumerate() {
            if w[0] == w[1] {
                continue;
            }
            let (mut lo, mut hi) = (grid[k], grid[k + 1]);
            while hi - lo > NODE_TOL {
                let mid = 0.5 * (lo + hi);
                if dominated(mid)? == w[0] {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // secant on the margin inside the final bracket, clamped to it
            let (m_lo, m_hi) = (margin_at(m, r, j, lo)?, margin_at(m, r, j, hi)?);
            let i_star = if m_lo.is_finite() && m_hi.is_finite() && m_hi != m_lo {
                (lo - m_lo * (hi - lo) / (m_hi - m_lo)).clamp(lo, hi)
            } else {
                0.5 * (lo + hi)
            };
            let direction = if w[1] {
                NodeDirection::BecomesDominated
            } else {
                NodeDirection::BecomesUndominated
            };
            let probe = match direction {
                NodeDirection::BecomesDominated => hi,
                NodeDirection::BecomesUndominated => lo,
            };
            let witness = dominance_status(&cross_section(m, r, probe)?, Player::B, j, DominanceMode::Weak)?.witness;
            own.push(NodeEvent {
                i_star,
                x_star: None,
                strategy: j,
                direction,
                witness,
            });
        }
        use NodeDirection::*;
        let pattern: Vec<NodeDirection> = own.iter().map(|e| e.direction).collect();
        let allowed = matches!(
            pattern.as_slice(),
            [] | [BecomesDominated] | [BecomesUndominated] | [BecomesUndominated, BecomesDominated]
        );
        if !allowed {
            return Err(Error::InconsistentDominance {
                strategy: j,
                changes: own.len(),
            });
        }
        events.extend(own);
    }
    events.sort_by(|a, b| a.i_star.total_cmp(&b.i_star).then(a.strategy.cmp(&b.strategy)));
    Ok(events)
}

/// Distinct interior boundaries from a sorted event list.
pub fn node_levels(nodes: &[NodeEvent]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for e in nodes {
        if e.i_star <= NODE_MERGE_TOL || e.i_star >= 1.0 - NODE_MERGE_TOL {
            continue;
        }
        if out.last().is_none_or(|&l| e.i_star - l > NODE_MERGE_TOL) {
            out.push(e.i_star);
        }
    }
    out
}

/// Profiles grouped by B's strategy.
fn group_by_s_b(profiles: Vec<EquilibriumProfile>) -> Vec<(MixedStrategy, Vec<MixedStrategy>)> {
    let mut groups: Vec<(MixedStrategy, Vec<MixedStrategy>)> = Vec::new();
    for p in profiles {
        match groups.iter_mut().find(|g| g.0.max_abs_diff(&p.s_b) <= FORM_TOL) {
            Some(g) => g.1.push(p.s_a),
            None => groups.push((p.s_b, vec![p.s_a])),
        }
    }
    groups
}

/// Rational coefficients of A's strategy from B's indifference over `b_support`.
fn rational_form(m: &BimatrixGame, r: &BimatrixGame, a_support: &[usize], b_support: &[usize]) -> Option<Vec<SaCoeff>> {
    let n = a_support.len();
    if n != b_support.len() || n == 0 {
        return None;
    }
    // with u_i = (1 - I) s_a(i):  Σ u_i (b_ij - b_ij0) = I (r_j0 - r_j),  Σ u_i = 1 - I
    let j0 = b_support[0];
    let mut k = Vec::with_capacity(n);
    let mut c0 = Vec::with_capacity(n);
    let mut c1 = Vec::with_capacity(n);
    for &j in &b_support[1..] {
        k.push(a_support.iter().map(|&i| m.b(i, j) - m.b(i, j0)).collect::<Vec<_>>());
        c0.push(0.0);
        c1.push(r.b(0, j0) - r.b(0, j));
    }
    k.push(vec![1.0; n]);
    c0.push(1.0);
    c1.push(-1.0);
    let a = solve_linear(k.clone(), c0)?;
    let b = solve_linear(k, c1)?;
    let mut coeffs = vec![SaCoeff { a: 0.0, b: 0.0, c: 1.0 }; m.rows()];
    for (idx, &i) in a_support.iter().enumerate() {
        coeffs[i] = SaCoeff {
            a: a[idx],
            b: b[idx],
            c: 1.0,
        }
        .rationalized();
    }
    Some(coeffs)
}

/// Whether the rational `s_a` branch is still a valid equilibrium strategy at level `i`.
///
/// With `u = (1 - I) s_a` both A's weights and B's column payoffs are affine in `I`,
/// so checking the two ends of an interval covers all of it.
fn branch_holds(m: &BimatrixGame, r: &BimatrixGame, coeffs: &[SaCoeff], b_support: &[usize], i: f64) -> bool {
    let u: Vec<f64> = coeffs.iter().map(|k| (k.a + k.b * i) / k.c).collect();
    let scale = m.cells().iter().map(|c| c.b.abs()).fold(1.0, f64::max);
    if u.iter().any(|&w| w < -BRANCH_TOL) {
        return false;
    }
    let col = |j: usize| (0..m.rows()).map(|k| u[k] * m.b(k, j)).sum::<f64>() + i * r.b(0, j);
    let held = b_support.iter().map(|&j| col(j)).fold(f64::NEG_INFINITY, f64::max);
    (0..m.cols()).all(|j| col(j) <= held + BRANCH_TOL * scale)
}

fn support_union(strategies: &[MixedStrategy]) -> Vec<usize> {
    let mut out: Vec<usize> = strategies.iter().flat_map(|s| s.support()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Picks the equilibrium branch continuing from the previous interval.
struct Continuation {
    s_b: MixedStrategy,
    expected_support: Vec<usize>,
}

impl Continuation {
    fn choose<'g>(&self, groups: &'g [(MixedStrategy, Vec<MixedStrategy>)]) -> &'g (MixedStrategy, Vec<MixedStrategy>) {
        let dist = |g: &&(MixedStrategy, Vec<MixedStrategy>)| g.0.max_abs_diff(&self.s_b);
        groups
            .iter()
            .filter(|g| g.0.support() == self.expected_support)
            .min_by(|a, b| dist(a).total_cmp(&dist(b)))
            .or_else(|| groups.iter().min_by(|a, b| dist(a).total_cmp(&dist(b))))
            .expect("nonempty equilibrium set")
    }
}

/// Per-interval analysis over `[0, 1]`; every open interval must have a unique B strategy.
pub fn interval_profile(m: &BimatrixGame, r: &BimatrixGame, nodes: &[NodeEvent]) -> Result<Vec<IntervalAnalysis>> {
    analyse_intervals(m, r, nodes, 1.0, None)
}

/// Interval analysis up to level `i_max`.
///
/// With an `anchor` (an equilibrium B strategy of the base game), multiple
/// equilibria are resolved by following the anchor's branch; without one they
/// are reported as [`Error::NonUniqueInterior`].
pub fn analyse_intervals(
    m: &BimatrixGame,
    r: &BimatrixGame,
    nodes: &[NodeEvent],
    i_max: f64,
    anchor: Option<&MixedStrategy>,
) -> Result<Vec<IntervalAnalysis>> {
    match analyse_prefix(m, r, nodes, i_max, anchor) {
        (out, None) => Ok(out),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`analyse_intervals`], but keeps the intervals analysed before the first failure.
pub fn analyse_prefix(
    m: &BimatrixGame,
    r: &BimatrixGame,
    nodes: &[NodeEvent],
    i_max: f64,
    anchor: Option<&MixedStrategy>,
) -> (Vec<IntervalAnalysis>, Option<Error>) {
    let mut bounds = vec![0.0];
    bounds.extend(node_levels(nodes));
    bounds.push(1.0);
    let mut cont = anchor.map(|s| Continuation {
        s_b: s.clone(),
        expected_support: s.support(),
    });
    let mut out = Vec::new();
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if lo > i_max + NODE_MERGE_TOL && !out.is_empty() {
            break;
        }
        if let Some(c) = cont.as_mut() {
            for e in nodes.iter().filter(|e| (e.i_star - lo).abs() <= NODE_MERGE_TOL) {
                if e.direction == NodeDirection::BecomesDominated {
                    c.expected_support.retain(|&j| j != e.strategy);
                }
            }
        }
        match analyse_one(m, r, lo, hi, cont.as_ref()) {
            Ok(analysis) => {
                if let Some(c) = cont.as_mut() {
                    c.s_b = analysis.s_b.clone();
                    c.expected_support = analysis.b_support.clone();
                }
                out.push(analysis);
            }
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

fn analyse_one(
    m: &BimatrixGame,
    r: &BimatrixGame,
    lo: f64,
    hi: f64,
    cont: Option<&Continuation>,
) -> Result<IntervalAnalysis> {
    let mid = 0.5 * (lo + hi);
    let eq = solve_cross_section(&cross_section(m, r, mid)?)?;
    let groups = group_by_s_b(eq.profiles);
    let (s_b, s_as) = match (cont, groups.len()) {
        (_, 1) => groups[0].clone(),
        (Some(c), _) => c.choose(&groups).clone(),
        (None, count) => return Err(Error::NonUniqueInterior { lo, hi, count }),
    };
    let b_support = s_b.support();
    let a_support = support_union(&s_as);
    let s_a_coeffs = if s_as.len() == 1 {
        rational_form(m, r, &a_support, &b_support)
    } else {
        None
    };
    // the chosen branch must hold on the whole interval, not only at its midpoint
    match &s_a_coeffs {
        Some(coeffs) => {
            if let Some(at) = [lo, hi]
                .into_iter()
                .find(|&e| !branch_holds(m, r, coeffs, &b_support, e))
            {
                return Err(Error::EquilibriumShift { lo, hi, at });
            }
        }
        None => {
            for t in PROBES {
                let at = lo + (hi - lo) * t;
                let probe = solve_cross_section(&cross_section(m, r, at)?)?;
                if !probe.profiles.iter().any(|p| p.s_b.max_abs_diff(&s_b) <= FORM_TOL) {
                    return Err(Error::EquilibriumShift { lo, hi, at });
                }
            }
        }
    }
    let v = value_of_information_br(m, r, &s_b)?;
    let analysis = IntervalAnalysis {
        i_lo: lo,
        i_hi: hi,
        b_support,
        a_support,
        s_b,
        s_a_coeffs,
        s_a_extremes: s_as,
        v,
    };
    if let Some(fit) = analysis.s_a_at(mid) {
        let diff = fit.max_abs_diff(&analysis.s_a_extremes[0]);
        if diff > FORM_TOL {
            return Err(Error::Internal(format!(
                "rational form misses the equilibrium on ({lo}, {hi}) by {diff:e}"
            )));
        }
    }
    Ok(analysis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::maximal_matrix;
    use approx::assert_abs_diff_eq;

    fn analyse(g: &BimatrixGame) -> (Vec<NodeEvent>, Vec<IntervalAnalysis>) {
        let r = maximal_matrix(g).unwrap();
        let nodes = find_nodes(g, &r).unwrap();
        let iv = interval_profile(g, &r, &nodes).unwrap();
        (nodes, iv)
    }

    #[test]
    fn example1_structure() {
        let (nodes, iv) = analyse(&fixtures::example1());
        assert_eq!(nodes.len(), 1);
        assert_abs_diff_eq!(nodes[0].i_star, 0.5, epsilon = 1e-9);
        assert_eq!(nodes[0].strategy, 1);
        assert_eq!(nodes[0].direction, NodeDirection::BecomesDominated);
        assert_eq!(nodes[0].witness.as_ref().unwrap()[0], 1.0);

        assert_eq!(iv.len(), 2);
        assert_abs_diff_eq!(iv[0].v, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(iv[0].s_b[0], 2.0 / 3.0, epsilon = 1e-12);
        let k = iv[0].s_a_coeffs.as_ref().unwrap();
        assert_eq!(
            k[0],
            SaCoeff {
                a: 2.0,
                b: -1.0,
                c: 3.0
            }
        );
        assert_eq!(
            k[1],
            SaCoeff {
                a: 1.0,
                b: -2.0,
                c: 3.0
            }
        );
        assert_abs_diff_eq!(iv[1].v, 0.0, epsilon = 1e-12);
        assert_eq!(iv[1].s_b, MixedStrategy::pure(2, 0));
    }

    #[test]
    fn example2_structure() {
        let (nodes, iv) = analyse(&fixtures::example2());
        let levels = node_levels(&nodes);
        assert_eq!(levels.len(), 2);
        assert_abs_diff_eq!(levels[0], 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(levels[1], 0.5, epsilon = 1e-9);
        assert_eq!(nodes[0].strategy, 2);
        assert_eq!(nodes[1].strategy, 1);

        let v: Vec<f64> = iv.iter().map(|a| a.v).collect();
        assert_abs_diff_eq!(v[0], 8.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-12);
        let k = iv[0].s_a_coeffs.as_ref().unwrap();
        assert_eq!(k[0], SaCoeff { a: 4.0, b: 1.0, c: 7.0 });
        assert_eq!(
            k[1],
            SaCoeff {
                a: 2.0,
                b: -3.0,
                c: 7.0
            }
        );
        assert_eq!(
            k[2],
            SaCoeff {
                a: 1.0,
                b: -5.0,
                c: 7.0
            }
        );
        for (p, q) in iv[0].s_b.probs().iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert_abs_diff_eq!(*p, q, epsilon = 1e-12);
        }
        assert_eq!(iv[1].b_support, vec![0, 1]);
    }

    #[test]
    fn harmful_structure() {
        let (nodes, iv) = analyse(&fixtures::harmful());
        assert_eq!(nodes[0].strategy, 2);
        assert_eq!(nodes[0].direction, NodeDirection::BecomesUndominated);
        assert_abs_diff_eq!(nodes[0].i_star, 1.0 / 3.0, epsilon = 1e-9);
        let levels = node_levels(&nodes);
        assert_eq!(levels.len(), 2);
        assert_abs_diff_eq!(levels[1], 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(iv[0].v, 2.0, epsilon = 1e-12);
        // above 1/3 B opts out and A's mixture is not pinned down
        assert_eq!(iv[1].s_b, MixedStrategy::pure(3, 2));
        assert!(iv[1].s_a_coeffs.is_none());
        assert_abs_diff_eq!(iv[1].v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn two_blocks_needs_anchor() {
        let g = fixtures::two_blocks();
        let r = maximal_matrix(&g).unwrap();
        let nodes = find_nodes(&g, &r).unwrap();
        let levels = node_levels(&nodes);
        assert_abs_diff_eq!(levels[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(levels[1], 2.0 / 3.0, epsilon = 1e-9);
        assert!(matches!(
            interval_profile(&g, &r, &nodes),
            Err(Error::NonUniqueInterior { .. })
        ));
    }

    #[test]
    fn rational_form_limit_at_one() {
        let iv = IntervalAnalysis {
            i_lo: 0.5,
            i_hi: 1.0,
            b_support: vec![0],
            a_support: vec![0, 1],
            s_b: MixedStrategy::pure(1, 0),
            s_a_coeffs: Some(vec![
                SaCoeff {
                    a: 1.0,
                    b: -1.0,
                    c: 4.0,
                },
                SaCoeff {
                    a: 3.0,
                    b: -3.0,
                    c: 4.0,
                },
            ]),
            s_a_extremes: vec![],
            v: 0.0,
        };
        let s = iv.s_a_at(1.0).unwrap();
        assert_abs_diff_eq!(s[0], 0.25, epsilon = 1e-12);
    }
}
