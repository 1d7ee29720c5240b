//! Equilibria of the full oracle game `{s_a, s_b, x}`.
//!
//! With a normalized oracle the payment condition reduces to the sign of
//! `h(x) = V(x) I'(x) - 1`, where `V` is piecewise constant between nodes.
//! The solver collects every point where `h` changes sign (or the endpoint
//! conditions hold) and expects exactly one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::game::{
    best_response_indices, cross_section, full_payoff, maximal_matrix, value_of_information_br, BimatrixGame,
    MixedStrategy,
};
use crate::nash::{best_response_gap, pure_equilibria, solve_cross_section, EquilibriumProfile};
use crate::nodes::{analyse_prefix, find_nodes, node_levels, IntervalAnalysis, NodeEvent, NODE_MERGE_TOL};
use crate::oracle::{shift_to_zero, OracleFamily, OracleFunction, PaymentInterval};

const H_TOL: f64 = 1e-12;
/// Largest best-response gap accepted for a candidate, relative to A's payoff range.
const BR_TOL: f64 = 1e-9;
const SAME_X: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    InteriorZero,
    IntervalInterior,
    NodeMix,
    SaturatedFullInfo,
    PureBase,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::InteriorZero => "interior_zero",
            CaseLabel::IntervalInterior => "interval_interior",
            CaseLabel::NodeMix => "node_mix",
            CaseLabel::SaturatedFullInfo => "saturated_full_info",
            CaseLabel::PureBase => "pure_base",
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEquilibrium {
    pub s_a: MixedStrategy,
    pub s_b: MixedStrategy,
    pub x: f64,
    pub i_val: f64,
    pub case_label: CaseLabel,
    pub e_a: f64,
    pub e_b: f64,
    pub v_at_eq: f64,
    /// Payments giving the same equilibrium; wider than a point only where `I'` is flat.
    pub x_multiplicity: PaymentInterval,
    /// Case number counted along `I`: 1 for a zero payment, `2l + 2` inside
    /// interval `l`, `2l + 3` at the node ending interval `l`, 0 for a pure base game.
    pub region: u32,
    /// Payments at which the reachable nodes sit.
    pub node_payments: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Base {
    Pure(EquilibriumProfile),
    Mixed(EquilibriumProfile),
}

/// Oracle-independent analysis of a game: maximal matrix, nodes and intervals.
///
/// Build once and reuse for many oracle functions, as in parameter sweeps.
#[derive(Debug, Clone)]
pub struct GameAnalysis {
    m: BimatrixGame,
    r: BimatrixGame,
    base: Base,
    nodes: Vec<NodeEvent>,
    intervals: Vec<IntervalAnalysis>,
    /// First interval that could not be analysed, with the reason.
    failure: Option<(f64, Error)>,
}

impl GameAnalysis {
    /// Requires a single base equilibrium (up to A's choice inside a continuum).
    pub fn new(m: &BimatrixGame) -> Result<Self> {
        let r = maximal_matrix(m)?;
        let base = solve_cross_section(m)?;
        let first = base.profiles[0].clone();
        let groups = base
            .profiles
            .iter()
            .filter(|p| p.s_b.max_abs_diff(&first.s_b) > 1e-8)
            .count();
        if groups > 0 {
            return Err(Error::MultipleBaseEquilibria {
                count: base.profiles.len(),
            });
        }
        if let Some(&(i, j)) = pure_equilibria(m).first() {
            let p = EquilibriumProfile {
                s_a: MixedStrategy::pure(m.rows(), i),
                s_b: MixedStrategy::pure(m.cols(), j),
            };
            return Ok(GameAnalysis::pure(m, r, p));
        }
        GameAnalysis::mixed(m, r, first, None)
    }

    /// Follows the base equilibrium `anchor` through cross-sections with several equilibria.
    pub fn anchored(m: &BimatrixGame, anchor: EquilibriumProfile) -> Result<Self> {
        let r = maximal_matrix(m)?;
        if anchor.s_a.is_pure() && anchor.s_b.is_pure() {
            return Ok(GameAnalysis::pure(m, r, anchor));
        }
        let s_b = anchor.s_b.clone();
        GameAnalysis::mixed(m, r, anchor, Some(&s_b))
    }

    fn pure(m: &BimatrixGame, r: BimatrixGame, p: EquilibriumProfile) -> Self {
        GameAnalysis {
            m: m.clone(),
            r,
            base: Base::Pure(p),
            nodes: Vec::new(),
            intervals: Vec::new(),
            failure: None,
        }
    }

    fn mixed(
        m: &BimatrixGame,
        r: BimatrixGame,
        base: EquilibriumProfile,
        anchor: Option<&MixedStrategy>,
    ) -> Result<Self> {
        let nodes = find_nodes(m, &r)?;
        let (intervals, err) = analyse_prefix(m, &r, &nodes, 1.0, anchor);
        let failure = err.map(|e| (intervals.last().map_or(0.0, |iv| iv.i_hi), e));
        Ok(GameAnalysis {
            m: m.clone(),
            r,
            base: Base::Mixed(base),
            nodes,
            intervals,
            failure,
        })
    }

    pub fn game(&self) -> &BimatrixGame {
        &self.m
    }

    pub fn maximal(&self) -> &BimatrixGame {
        &self.r
    }

    pub fn nodes(&self) -> &[NodeEvent] {
        &self.nodes
    }

    pub fn intervals(&self) -> &[IntervalAnalysis] {
        &self.intervals
    }

    pub fn base_profile(&self) -> &EquilibriumProfile {
        match &self.base {
            Base::Pure(p) | Base::Mixed(p) => p,
        }
    }

    pub fn has_pure_base(&self) -> bool {
        matches!(self.base, Base::Pure(_))
    }

    /// Level from which intervals could not be analysed, and why.
    pub fn failure(&self) -> Option<(f64, &Error)> {
        self.failure.as_ref().map(|(lo, e)| (*lo, e))
    }

    /// Equilibrium for an oracle with `I(0) = 0`, already normalized.
    pub fn solve(&self, f: &OracleFunction) -> Result<OracleEquilibrium> {
        if f.eval_clamped(0.0) > 0.0 {
            return Err(Error::NotNormalized(
                "I(0) > 0; shift the game with shift_to_zero first".into(),
            ));
        }
        if let Base::Pure(p) = &self.base {
            return self.finish(f, p.s_a.clone(), p.s_b.clone(), 0.0, CaseLabel::PureBase, 0, None, &[]);
        }
        let i_max = f.sup();
        if let Some((lo, err)) = &self.failure {
            if i_max > lo + NODE_MERGE_TOL {
                return Err(err.clone());
            }
        }
        let reach: Vec<&IntervalAnalysis> = self
            .intervals
            .iter()
            .enumerate()
            .filter(|(l, iv)| *l == 0 || iv.i_lo < i_max)
            .map(|(_, iv)| iv)
            .collect();
        if reach.is_empty() {
            // the oracle never responds, so only the base game matters
            let base = self.base_profile().clone();
            return self.finish(f, base.s_a, base.s_b, 0.0, CaseLabel::InteriorZero, 1, None, &[]);
        }
        let node_x: Vec<f64> = node_levels(&self.nodes)
            .into_iter()
            .filter(|&z| z <= i_max)
            .map(|z| f.level_x(z))
            .collect::<Result<_>>()?;

        let mut cands: Vec<Candidate> = Vec::new();
        self.zero_candidate(f, reach[0], &mut cands)?;
        for (l, iv) in reach.iter().enumerate() {
            self.interior_candidate(f, l, iv, &mut cands)?;
        }
        for l in 0..reach.len().saturating_sub(1) {
            self.node_candidate(f, l, reach[l], reach[l + 1], i_max, &mut cands)?;
        }
        self.saturated_candidate(f, &reach, &mut cands)?;

        // a candidate built from one-sided limits can miss a strategy jump at a node
        let mut rejected = None;
        let mut checked = Vec::with_capacity(cands.len());
        for c in cands {
            let section = cross_section(&self.m, &self.r, f.eval_clamped(c.x))?;
            let gap = best_response_gap(&section, &c.s_a, &c.s_b);
            if gap <= BR_TOL * self.m.a_payoff_range().max(1.0) {
                checked.push(c);
            } else if rejected.is_none() {
                rejected = Some(Error::CandidateRejected {
                    case: c.case.to_string(),
                    x: c.x,
                    gap,
                });
            }
        }
        let mut unique: Vec<Candidate> = Vec::new();
        for c in checked {
            if !unique.iter().any(|u| (u.x - c.x).abs() <= SAME_X * c.x.max(1.0)) {
                unique.push(c);
            }
        }
        match unique.len() {
            0 => {
                Err(rejected
                    .unwrap_or_else(|| Error::Internal("no payment satisfies the equilibrium conditions".into())))
            }
            1 => {
                let c = unique.pop().expect("one candidate");
                self.finish(f, c.s_a, c.s_b, c.x, c.case, c.region, Some(c.mult), &node_x)
            }
            n => {
                let monotone = reach.windows(2).all(|w| w[1].v <= w[0].v + H_TOL);
                if monotone {
                    Err(Error::Internal(format!(
                        "{n} payment solutions although V is nonincreasing"
                    )))
                } else {
                    Err(Error::NonMonotoneValue { candidates: n })
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        f: &OracleFunction,
        s_a: MixedStrategy,
        s_b: MixedStrategy,
        x: f64,
        case: CaseLabel,
        region: u32,
        mult: Option<PaymentInterval>,
        node_x: &[f64],
    ) -> Result<OracleEquilibrium> {
        let i_val = f.eval(x)?;
        let pay = full_payoff(&self.m, &self.r, &s_a, &s_b, i_val, x)?;
        let v_at_eq = value_of_information_br(&self.m, &self.r, &s_b)?;
        Ok(OracleEquilibrium {
            s_a,
            s_b,
            x,
            i_val,
            case_label: case,
            e_a: pay.a,
            e_b: pay.b,
            v_at_eq,
            x_multiplicity: mult.unwrap_or(PaymentInterval::point(x)),
            region,
            node_payments: node_x.to_vec(),
        })
    }

    /// A's strategy on interval `iv` at level `i`, given B plays `s_b`.
    fn s_a_for(&self, iv: &IntervalAnalysis, i: f64, s_b: &MixedStrategy) -> Result<MixedStrategy> {
        if let Some(s) = iv.s_a_at(i) {
            return Ok(s);
        }
        let section = cross_section(&self.m, &self.r, i)?;
        let eq = solve_cross_section(&section)?;
        eq.profiles
            .into_iter()
            .map(|p| (best_response_gap(&section, &p.s_a, s_b), p.s_a))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, s)| s)
            .ok_or(Error::NoEquilibriumFound)
    }

    fn zero_candidate(&self, f: &OracleFunction, first: &IntervalAnalysis, out: &mut Vec<Candidate>) -> Result<()> {
        let v = first.v;
        let slope = f.decision_slope(0.0);
        if v > 0.0 && v * slope > 1.0 + H_TOL {
            return Ok(());
        }
        let base = self.base_profile();
        let mult = if v > 0.0 {
            match f.slope_x(1.0 / v) {
                Ok(iv) if iv.lo == 0.0 => iv,
                _ => PaymentInterval::point(0.0),
            }
        } else {
            PaymentInterval::point(0.0)
        };
        out.push(Candidate {
            x: 0.0,
            s_a: base.s_a.clone(),
            s_b: base.s_b.clone(),
            case: CaseLabel::InteriorZero,
            region: 1,
            mult,
        });
        Ok(())
    }

    fn interior_candidate(
        &self,
        f: &OracleFunction,
        l: usize,
        iv: &IntervalAnalysis,
        out: &mut Vec<Candidate>,
    ) -> Result<()> {
        if iv.v <= 0.0 {
            return Ok(());
        }
        let (x, mult) = match f.slope_x(1.0 / iv.v) {
            Ok(span) => {
                let top = if iv.i_hi <= f.sup() {
                    f.level_x(iv.i_hi)?
                } else {
                    f64::INFINITY
                };
                (
                    span.lo,
                    PaymentInterval {
                        lo: span.lo,
                        hi: span.hi.min(top).max(span.lo),
                    },
                )
            }
            // a kink where the slope jumps across 1/V
            Err(Error::SlopeOutOfRange { fallback, .. }) if fallback > 0.0 && fallback < f.payment_end() => {
                (fallback, PaymentInterval::point(fallback))
            }
            Err(Error::SlopeOutOfRange { .. }) => return Ok(()),
            Err(e) => return Err(e),
        };
        let i = f.eval_clamped(x);
        if !iv.contains(i) {
            return Ok(());
        }
        out.push(Candidate {
            x,
            s_a: self.s_a_for(iv, i, &iv.s_b)?,
            s_b: iv.s_b.clone(),
            case: CaseLabel::IntervalInterior,
            region: 2 * l as u32 + 2,
            mult,
        });
        Ok(())
    }

    fn node_candidate(
        &self,
        f: &OracleFunction,
        l: usize,
        below: &IntervalAnalysis,
        above: &IntervalAnalysis,
        i_max: f64,
        out: &mut Vec<Candidate>,
    ) -> Result<()> {
        let z = below.i_hi;
        if z >= i_max - H_TOL {
            return Ok(());
        }
        let x = f.level_x(z)?;
        if x <= 0.0 {
            return Ok(());
        }
        let g_minus = f.slope_at(x, Side::Left);
        let g_plus = if x >= f.x_cap() {
            0.0
        } else {
            f.slope_at(x, Side::Right)
        };
        let (v_lo, v_hi) = (below.v.min(above.v), below.v.max(above.v));
        if v_hi <= 0.0 {
            return Ok(());
        }
        // 1/g for supergradients g in [g_plus, g_minus]
        let t_lo = (1.0 / g_minus).max(v_lo);
        let t_hi = (1.0 / g_plus).min(v_hi);
        if t_lo > t_hi + H_TOL * t_hi.abs().max(1.0) {
            return Ok(());
        }
        let t = below.v.clamp(t_lo, t_hi.max(t_lo));
        let (_, beta) = node_mixture(below.v, above.v, 1.0 / t, &below.s_b, &above.s_b)?;
        let s_a = match below.s_a_at(z).or_else(|| above.s_a_at(z)) {
            Some(s) => s,
            None => self.s_a_for(below, z, &beta)?,
        };
        out.push(Candidate {
            x,
            s_a,
            s_b: beta,
            case: CaseLabel::NodeMix,
            region: 2 * l as u32 + 3,
            mult: PaymentInterval::point(x),
        });
        Ok(())
    }

    fn saturated_candidate(
        &self,
        f: &OracleFunction,
        reach: &[&IntervalAnalysis],
        out: &mut Vec<Candidate>,
    ) -> Result<()> {
        let x = f.payment_end();
        if x <= 0.0 {
            return Ok(());
        }
        let i = f.eval_clamped(x);
        let Some(l) = reach.iter().position(|iv| iv.i_lo < i && i <= iv.i_hi) else {
            return Ok(());
        };
        let iv = reach[l];
        if iv.v * f.slope_at(x, Side::Left) < 1.0 - H_TOL {
            return Ok(());
        }
        out.push(Candidate {
            x,
            s_a: self.s_a_for(iv, i, &iv.s_b)?,
            s_b: iv.s_b.clone(),
            case: CaseLabel::SaturatedFullInfo,
            region: 2 * l as u32 + 2,
            mult: PaymentInterval::point(x),
        });
        Ok(())
    }
}

struct Candidate {
    x: f64,
    s_a: MixedStrategy,
    s_b: MixedStrategy,
    case: CaseLabel,
    region: u32,
    mult: PaymentInterval,
}

/// Weight `p` on `s_below` making the mixture's value of information equal `1 / I'`.
pub fn node_mixture(
    v_below: f64,
    v_above: f64,
    i_slope_at_node: f64,
    s_below: &MixedStrategy,
    s_above: &MixedStrategy,
) -> Result<(f64, MixedStrategy)> {
    let target = 1.0 / i_slope_at_node;
    let (lo, hi) = (v_below.min(v_above), v_below.max(v_above));
    let slack = 1e-12 * hi.abs().max(1.0);
    if !(lo - slack..=hi + slack).contains(&target) {
        return Err(Error::NoMixExists { target, lo, hi });
    }
    let p = if hi - lo <= 1e-15 {
        1.0
    } else {
        ((target - v_above) / (v_below - v_above)).clamp(0.0, 1.0)
    };
    Ok((p, s_below.mix(s_above, p)?))
}

fn require_normalized(f: &OracleFunction) -> Result<()> {
    f.check_normalized()
}

/// Equilibrium of the oracle game for a normalized oracle function.
///
/// An oracle with `I(0) > 0` is handled through the equivalent shifted game.
pub fn solve_oracle_game(m: &BimatrixGame, f: &OracleFunction) -> Result<OracleEquilibrium> {
    require_normalized(f)?;
    let c = f.eval(0.0)?;
    if c >= 1.0 {
        return full_information(m, f);
    }
    if c > 0.0 {
        let (n, j) = shift_to_zero(m, f)?;
        let eq = GameAnalysis::new(&n)?.solve(&j)?;
        return restate(m, f, eq);
    }
    GameAnalysis::new(m)?.solve(f)
}

/// Re-expresses an equilibrium of the shifted game in terms of the original game and oracle.
fn restate(m: &BimatrixGame, f: &OracleFunction, eq: OracleEquilibrium) -> Result<OracleEquilibrium> {
    let r = maximal_matrix(m)?;
    let i_val = f.eval(eq.x)?;
    let pay = full_payoff(m, &r, &eq.s_a, &eq.s_b, i_val, eq.x)?;
    Ok(OracleEquilibrium {
        i_val,
        e_a: pay.a,
        e_b: pay.b,
        v_at_eq: value_of_information_br(m, &r, &eq.s_b)?,
        ..eq
    })
}

/// The oracle always answers: B picks its best column against A's best responses.
fn full_information(m: &BimatrixGame, f: &OracleFunction) -> Result<OracleEquilibrium> {
    let r = maximal_matrix(m)?;
    let alpha = best_response_indices(m)?.alpha;
    let j = (0..m.cols()).fold(0, |best, j| if r.b(0, j) > r.b(0, best) + 1e-12 { j } else { best });
    let s_a = MixedStrategy::pure(m.rows(), alpha[j]);
    let s_b = MixedStrategy::pure(m.cols(), j);
    let pay = full_payoff(m, &r, &s_a, &s_b, 1.0, 0.0)?;
    Ok(OracleEquilibrium {
        s_a,
        v_at_eq: value_of_information_br(m, &r, &s_b)?,
        s_b,
        x: 0.0,
        i_val: f.eval(0.0)?,
        case_label: CaseLabel::SaturatedFullInfo,
        e_a: pay.a,
        e_b: pay.b,
        x_multiplicity: PaymentInterval::point(0.0),
        region: 0,
        node_payments: Vec::new(),
    })
}

/// Solves the game restricted to each `(rows, cols)` block and re-embeds the strategies.
///
/// Within a block the base equilibrium using every block strategy is followed;
/// failing that, the block must have a single base equilibrium.
pub fn solve_multi(
    m: &BimatrixGame,
    f: &OracleFunction,
    subsupports: &[(Vec<usize>, Vec<usize>)],
) -> Result<Vec<OracleEquilibrium>> {
    require_normalized(f)?;
    subsupports
        .par_iter()
        .enumerate()
        .map(|(index, (rows, cols))| {
            solve_block(m, f, rows, cols).map_err(|e| Error::Subgame {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

fn solve_block(m: &BimatrixGame, f: &OracleFunction, rows: &[usize], cols: &[usize]) -> Result<OracleEquilibrium> {
    let sub = m.submatrix(rows, cols)?;
    let base = solve_cross_section(&sub)?;
    let eq = if base.unique {
        solve_oracle_game(&sub, f)?
    } else {
        let full = base
            .profiles
            .into_iter()
            .find(|p| p.s_a.support().len() == rows.len() && p.s_b.support().len() == cols.len());
        match full {
            Some(anchor) if f.eval(0.0)? == 0.0 => GameAnalysis::anchored(&sub, anchor)?.solve(f)?,
            _ => solve_oracle_game(&sub, f)?,
        }
    };
    Ok(OracleEquilibrium {
        s_a: eq.s_a.embed(rows, m.rows()),
        s_b: eq.s_b.embed(cols, m.cols()),
        ..eq
    })
}

/// `E_a` along a family of oracles; larger `k` means cheaper information.
pub fn harmful_info_profile(
    m: &BimatrixGame,
    family: OracleFamily,
    k_grid: &[f64],
) -> Result<Vec<(f64, OracleEquilibrium)>> {
    let analysis = GameAnalysis::new(m)?;
    let x_cap = m.a_payoff_range();
    k_grid
        .iter()
        .map(|&k| Ok((k, analysis.solve(&family.instantiate(k, x_cap)?)?)))
        .collect()
}

/// One row of a parameter sweep; solver failures are kept per row.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub k: f64,
    pub result: std::result::Result<OracleEquilibrium, Error>,
}

/// Solves `family(k)` for `steps` evenly spaced `k` in `[k_from, k_to]`, in parallel, in k order.
pub fn sweep(
    analysis: &GameAnalysis,
    family: OracleFamily,
    x_cap: f64,
    k_from: f64,
    k_to: f64,
    steps: usize,
) -> Vec<SweepPoint> {
    let ks = linspace(k_from, k_to, steps);
    ks.par_iter()
        .map(|&k| SweepPoint {
            k,
            result: family.instantiate(k, x_cap).and_then(|f| analysis.solve(&f)),
        })
        .collect()
}

pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|s| from + (to - from) * s as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Region change located between two sweep parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundary {
    pub k: f64,
    pub below: u32,
    pub above: u32,
}

/// Refines every region change in `points` by bisection in `k` down to `tol`.
pub fn region_boundaries(
    analysis: &GameAnalysis,
    family: OracleFamily,
    x_cap: f64,
    points: &[SweepPoint],
    tol: f64,
) -> Result<Vec<RegionBoundary>> {
    let region = |k: f64| -> Result<u32> { Ok(analysis.solve(&family.instantiate(k, x_cap)?)?.region) };
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (Ok(a), Ok(b)) = (&w[0].result, &w[1].result) else {
            continue;
        };
        if a.region == b.region {
            continue;
        }
        let (mut lo, mut hi) = (w[0].k, w[1].k);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if region(mid)? == a.region {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(RegionBoundary {
            k: 0.5 * (lo + hi),
            below: a.region,
            above: b.region,
        });
    }
    Ok(out)
}
