//! Oracle response-probability functions `I(x)`.
//!
//! A handful of analytic families cover the common cases; arbitrary curves are
//! piecewise linear. Every function is evaluated on `[0, x_cap]` and held
//! constant beyond the cap. The normalization pipeline (running-maximum
//! envelope, upper concave hull, shift to `I(0) = 0`) turns any response
//! curve into an equivalent continuous, nondecreasing, weakly concave one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::game::{cross_section, maximal_matrix, BimatrixGame};

/// Grid size used when an analytic family has to be sampled.
pub const NORMALIZATION_GRID: usize = 4096;

const SLOPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OracleKind {
    /// `min(sqrt(k x), 1)`
    SqrtK { k: f64 },
    /// `min(sqrt(x + a) - sqrt(a), 1)`
    SqrtShift { a: f64 },
    /// `min(b x, 1)`
    LinearSlope { b: f64 },
    /// `c` regardless of payment
    #[serde(alias = "constant_c")]
    Constant { c: f64 },
    /// Linear interpolation between `(x, I)` breakpoints, constant after the last one.
    PiecewiseLinear { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFunction {
    #[serde(flatten)]
    kind: OracleKind,
    x_cap: f64,
}

/// Closed interval of payments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaymentInterval {
    pub lo: f64,
    pub hi: f64,
}

impl PaymentInterval {
    pub fn point(x: f64) -> Self {
        PaymentInterval { lo: x, hi: x }
    }

    pub fn is_degenerate(&self) -> bool {
        self.hi - self.lo <= 1e-15
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl OracleFunction {
    pub fn new(kind: OracleKind, x_cap: f64) -> Result<Self> {
        if !x_cap.is_finite() || x_cap < 0.0 {
            return Err(Error::InvalidOracle(format!(
                "x_cap must be finite and >= 0, got {x_cap}"
            )));
        }
        let bad = |msg: String| Err(Error::InvalidOracle(msg));
        match &kind {
            OracleKind::SqrtK { k } if !(k.is_finite() && *k > 0.0) => {
                return bad(format!("sqrt_k needs k > 0, got {k}"))
            }
            OracleKind::SqrtShift { a } if !(a.is_finite() && *a >= 0.0) => {
                return bad(format!("sqrt_shift needs a >= 0, got {a}"))
            }
            OracleKind::LinearSlope { b } if !(b.is_finite() && *b > 0.0) => {
                return bad(format!("linear_slope needs b > 0, got {b}"))
            }
            OracleKind::Constant { c } if !(0.0..=1.0).contains(c) => {
                return bad(format!("constant needs c in [0, 1], got {c}"))
            }
            OracleKind::PiecewiseLinear { points } => validate_points(points)?,
            _ => {}
        }
        Ok(OracleFunction { kind, x_cap })
    }

    /// Uses the payoff spread of A in `game` as the payment cap.
    pub fn for_game(kind: OracleKind, game: &BimatrixGame) -> Result<Self> {
        OracleFunction::new(kind, game.a_payoff_range())
    }

    pub fn sqrt_k(k: f64, x_cap: f64) -> Result<Self> {
        OracleFunction::new(OracleKind::SqrtK { k }, x_cap)
    }

    pub fn sqrt_shift(a: f64, x_cap: f64) -> Result<Self> {
        OracleFunction::new(OracleKind::SqrtShift { a }, x_cap)
    }

    pub fn linear_slope(b: f64, x_cap: f64) -> Result<Self> {
        OracleFunction::new(OracleKind::LinearSlope { b }, x_cap)
    }

    pub fn constant(c: f64, x_cap: f64) -> Result<Self> {
        OracleFunction::new(OracleKind::Constant { c }, x_cap)
    }

    pub fn piecewise(points: Vec<(f64, f64)>, x_cap: f64) -> Result<Self> {
        OracleFunction::new(OracleKind::PiecewiseLinear { points }, x_cap)
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn x_cap(&self) -> f64 {
        self.x_cap
    }

    pub fn with_x_cap(&self, x_cap: f64) -> Result<Self> {
        OracleFunction::new(self.kind.clone(), x_cap)
    }

    /// Uncapped value on `[0, inf)`, before clipping at 1.
    fn raw(&self, x: f64) -> f64 {
        match &self.kind {
            OracleKind::SqrtK { k } => (k * x).sqrt(),
            OracleKind::SqrtShift { a } => (x + a).sqrt() - a.sqrt(),
            OracleKind::LinearSlope { b } => b * x,
            OracleKind::Constant { c } => *c,
            OracleKind::PiecewiseLinear { points } => interpolate(points, x),
        }
    }

    /// Smallest payment at which an analytic family reaches 1, ignoring the cap.
    fn raw_saturation(&self) -> Option<f64> {
        match &self.kind {
            OracleKind::SqrtK { k } => Some(1.0 / k),
            OracleKind::SqrtShift { a } => Some(1.0 + 2.0 * a.sqrt()),
            OracleKind::LinearSlope { b } => Some(1.0 / b),
            OracleKind::Constant { c } => (*c >= 1.0).then_some(0.0),
            OracleKind::PiecewiseLinear { points } => first_crossing(points, 1.0),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::NegativePayment(x));
        }
        Ok(self.eval_clamped(x))
    }

    /// `eval` for a payment already known to be nonnegative.
    pub(crate) fn eval_clamped(&self, x: f64) -> f64 {
        let x = x.min(self.x_cap).max(0.0);
        self.raw(x).clamp(0.0, 1.0)
    }

    /// Smallest payment at which the response probability reaches 1, if within the cap.
    pub fn saturation_point(&self) -> Option<f64> {
        self.raw_saturation().filter(|&x| x <= self.x_cap)
    }

    /// Largest payment worth considering: saturation or the cap, whichever is first.
    pub fn payment_end(&self) -> f64 {
        self.saturation_point().unwrap_or(self.x_cap)
    }

    /// Supremum of the response probability over `[0, x_cap]`.
    pub fn sup(&self) -> f64 {
        match &self.kind {
            OracleKind::PiecewiseLinear { points } => {
                self.clipped_points(points).iter().map(|p| p.1).fold(0.0, f64::max)
            }
            _ => self.eval_clamped(self.x_cap),
        }
    }

    fn inf(&self) -> f64 {
        match &self.kind {
            OracleKind::PiecewiseLinear { points } => {
                self.clipped_points(points).iter().map(|p| p.1).fold(1.0, f64::min)
            }
            _ => self.eval_clamped(0.0),
        }
    }

    /// Breakpoints inside `[0, x_cap]`, with an interpolated point at the cap.
    fn clipped_points(&self, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0 <= self.x_cap).collect();
        if out.last().is_some_and(|p| p.0 < self.x_cap) {
            out.push((self.x_cap, interpolate(points, self.x_cap)));
        }
        out
    }

    /// One-sided derivative; `+inf` where the curve starts vertically.
    pub fn derivative(&self, x: f64, side: Side) -> Result<f64> {
        let outside =
            x < 0.0 || x > self.x_cap || (x == 0.0 && side == Side::Left) || (x >= self.x_cap && side == Side::Right);
        if outside || x.is_nan() {
            return Err(Error::OutsideDomain {
                x,
                side,
                x_cap: self.x_cap,
            });
        }
        Ok(self.slope_at(x, side))
    }

    /// Derivative without domain checks: left/right limits of the capped curve.
    pub(crate) fn slope_at(&self, x: f64, side: Side) -> f64 {
        if let OracleKind::PiecewiseLinear { points } = &self.kind {
            return piecewise_slope(points, x, side);
        }
        if let Some(sat) = self.raw_saturation() {
            let past = match side {
                Side::Left => x > sat,
                Side::Right => x >= sat,
            };
            if past {
                return 0.0;
            }
        }
        match &self.kind {
            OracleKind::SqrtK { k } => {
                if x == 0.0 {
                    f64::INFINITY
                } else {
                    0.5 * (k / x).sqrt()
                }
            }
            OracleKind::SqrtShift { a } => {
                let s = (x + a).sqrt();
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    0.5 / s
                }
            }
            OracleKind::LinearSlope { b } => *b,
            OracleKind::Constant { .. } => 0.0,
            OracleKind::PiecewiseLinear { .. } => unreachable!(),
        }
    }

    /// Derivative used for payment decisions: right-sided, left-sided at the cap.
    pub(crate) fn decision_slope(&self, x: f64) -> f64 {
        if x >= self.x_cap {
            if self.x_cap == 0.0 {
                0.0
            } else {
                self.slope_at(self.x_cap, Side::Left)
            }
        } else {
            self.slope_at(x, Side::Right)
        }
    }

    /// Smallest payment whose response probability equals `a`.
    pub fn level_x(&self, a: f64) -> Result<f64> {
        let (lo, hi) = (self.inf(), self.sup());
        let unreachable = || Error::LevelUnreachable {
            level: a,
            min: lo,
            sup: hi,
        };
        if !(lo - 1e-12..=hi + 1e-12).contains(&a) {
            return Err(unreachable());
        }
        let a = a.clamp(lo, hi);
        let x = match &self.kind {
            OracleKind::SqrtK { k } => a * a / k,
            OracleKind::SqrtShift { a: s } => {
                let t = a + s.sqrt();
                (t * t - s).max(0.0)
            }
            OracleKind::LinearSlope { b } => a / b,
            OracleKind::Constant { .. } => 0.0,
            OracleKind::PiecewiseLinear { points } => {
                first_crossing(&self.clipped_points(points), a).ok_or_else(unreachable)?
            }
        };
        Ok(x.min(self.x_cap))
    }

    /// Payments where the slope equals `b`: the closed hull of `{x : I'(x) = b}`.
    ///
    /// When the slope jumps past `b` (a kink) or never gets that steep, the error
    /// carries `sup {x : I'(x) >= b}` (0 if empty) as a fallback.
    pub fn slope_x(&self, b: f64) -> Result<PaymentInterval> {
        if b.is_nan() || b <= 0.0 {
            return Err(Error::InvalidOracle(format!("slope must be positive, got {b}")));
        }
        let end = self.payment_end();
        let miss = |fallback: f64| Err(Error::SlopeOutOfRange { slope: b, fallback });
        let close = |s: f64| (s - b).abs() <= SLOPE_TOL * b.max(1.0);
        match &self.kind {
            OracleKind::SqrtK { .. } | OracleKind::SqrtShift { .. } => {
                let x = match &self.kind {
                    OracleKind::SqrtK { k } => k / (4.0 * b * b),
                    OracleKind::SqrtShift { a } => 1.0 / (4.0 * b * b) - a,
                    _ => unreachable!(),
                };
                if x < 0.0 {
                    miss(0.0)
                } else if x > end {
                    miss(end)
                } else {
                    Ok(PaymentInterval::point(x))
                }
            }
            OracleKind::LinearSlope { b: s } => {
                if close(*s) {
                    Ok(PaymentInterval { lo: 0.0, hi: end })
                } else if b < *s {
                    miss(end)
                } else {
                    miss(0.0)
                }
            }
            OracleKind::Constant { .. } => miss(0.0),
            OracleKind::PiecewiseLinear { points } => {
                let pts = self.clipped_points(points);
                let mut hit: Option<PaymentInterval> = None;
                let mut fallback = 0.0_f64;
                for w in pts.windows(2) {
                    let (x0, x1) = (w[0].0, w[1].0);
                    let s = (w[1].1 - w[0].1) / (x1 - x0);
                    if close(s) {
                        hit = Some(match hit {
                            Some(h) => PaymentInterval {
                                lo: h.lo.min(x0),
                                hi: h.hi.max(x1),
                            },
                            None => PaymentInterval { lo: x0, hi: x1 },
                        });
                    }
                    if s >= b {
                        fallback = fallback.max(x1);
                    }
                }
                match hit {
                    Some(h) => Ok(h),
                    None => miss(fallback),
                }
            }
        }
    }

    /// Breakpoints of a piecewise curve within the cap (empty for analytic families).
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            OracleKind::PiecewiseLinear { points } => self.clipped_points(points),
            _ => Vec::new(),
        }
    }

    /// `(x, I(x))` on the breakpoints (piecewise) or a uniform grid of `n` points.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        match &self.kind {
            OracleKind::PiecewiseLinear { points } => self.clipped_points(points),
            _ => {
                let n = n.max(2);
                (0..n)
                    .map(|k| {
                        let x = self.x_cap * k as f64 / (n - 1) as f64;
                        (x, self.eval_clamped(x))
                    })
                    .collect()
            }
        }
    }

    /// Checks continuity, monotonicity and weak concavity. Analytic families always pass.
    pub fn check_normalized(&self) -> Result<()> {
        let OracleKind::PiecewiseLinear { .. } = &self.kind else {
            return Ok(());
        };
        let pts = self.breakpoints();
        let mut prev = f64::INFINITY;
        for w in pts.windows(2) {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if s < -SLOPE_TOL {
                return Err(Error::NotNormalized(format!("decreasing on [{}, {}]", w[0].0, w[1].0)));
            }
            if s > prev + SLOPE_TOL * prev.abs().max(1.0) {
                return Err(Error::NotNormalized(format!("convex kink at x = {}", w[0].0)));
            }
            prev = s;
        }
        Ok(())
    }
}

fn validate_points(points: &[(f64, f64)]) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidOracle(msg));
    let Some(first) = points.first() else {
        return Err(Error::EmptyInput);
    };
    if first.0 != 0.0 {
        return bad(format!("first breakpoint must be at x = 0, got {}", first.0));
    }
    for p in points {
        if !p.0.is_finite() || !p.1.is_finite() || !(0.0..=1.0).contains(&p.1) {
            return bad(format!("breakpoint ({}, {}) outside the allowed range", p.0, p.1));
        }
    }
    if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
        return bad(format!("breakpoints not strictly increasing at x = {}", w[1].0));
    }
    Ok(())
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let last = points[points.len() - 1];
    if x >= last.0 {
        return last.1;
    }
    // first breakpoint with abscissa > x
    let k = points.partition_point(|p| p.0 <= x);
    let (p0, p1) = (points[k - 1], points[k]);
    p0.1 + (p1.1 - p0.1) * (x - p0.0) / (p1.0 - p0.0)
}

fn piecewise_slope(points: &[(f64, f64)], x: f64, side: Side) -> f64 {
    let seg = |k: usize| (points[k + 1].1 - points[k].1) / (points[k + 1].0 - points[k].0);
    let n = points.len();
    let k = match side {
        // segment [x_k, x_{k+1}) containing x
        Side::Right => points.partition_point(|p| p.0 <= x),
        // segment (x_k, x_{k+1}] containing x
        Side::Left => points.partition_point(|p| p.0 < x),
    };
    if k == 0 || k >= n {
        0.0
    } else {
        seg(k - 1)
    }
}

/// Smallest `x` with value `a` on the polyline, scanning segments in order.
fn first_crossing(points: &[(f64, f64)], a: f64) -> Option<f64> {
    if (points[0].1 - a).abs() <= 1e-15 {
        return Some(points[0].0);
    }
    for w in points.windows(2) {
        let ((x0, v0), (x1, v1)) = (w[0], w[1]);
        if (v0 - a) * (v1 - a) <= 0.0 && v0 != v1 {
            return Some(x0 + (a - v0) * (x1 - x0) / (v1 - v0));
        }
        if v1 == a {
            return Some(x1);
        }
    }
    None
}

/// Running maximum of sorted `(x, I)` samples.
pub fn monotone_envelope(samples: &[(f64, f64)]) -> Result<OracleFunction> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut best = f64::NEG_INFINITY;
    let points: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(x, v)| {
            best = best.max(v);
            (x, best)
        })
        .collect();
    let x_cap = points[points.len() - 1].0;
    OracleFunction::piecewise(points, x_cap)
}

/// Upper concave envelope, as a piecewise-linear curve keeping only hull vertices.
pub fn concavify(f: &OracleFunction) -> OracleFunction {
    let pts = f.samples(NORMALIZATION_GRID);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly above the chord a-p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    OracleFunction {
        kind: OracleKind::PiecewiseLinear { points: hull },
        x_cap: f.x_cap,
    }
}

/// Stages of the equivalence normalization of an oracle function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub original: OracleFunction,
    /// Running-maximum envelope.
    pub envelope: OracleFunction,
    /// Upper concave hull of the envelope.
    pub concave: OracleFunction,
    /// The concave curve starts above zero and the game must be shifted.
    pub shifted_game_required: bool,
    pub shift_c: f64,
}

pub fn normalize(f: &OracleFunction) -> Result<NormalizationReport> {
    let samples = f.samples(NORMALIZATION_GRID);
    let envelope = monotone_envelope(&samples)?.with_x_cap(f.x_cap)?;
    let concave = concavify(&envelope);
    let shift_c = concave.eval_clamped(0.0);
    Ok(NormalizationReport {
        original: f.clone(),
        envelope,
        concave,
        shifted_game_required: shift_c > 0.0,
        shift_c,
    })
}

/// Equivalent game and oracle with `J(0) = 0`: `N = (1 - c) M + c R`, `J = (I - c) / (1 - c)`.
pub fn shift_to_zero(m: &BimatrixGame, f: &OracleFunction) -> Result<(BimatrixGame, OracleFunction)> {
    let c = f.eval_clamped(0.0);
    if c == 0.0 {
        return Ok((m.clone(), f.clone()));
    }
    if c >= 1.0 {
        return Err(Error::DegenerateOracle);
    }
    let r = maximal_matrix(m)?;
    let n = cross_section(m, &r, c)?;
    let rescale = |v: f64| ((v - c) / (1.0 - c)).clamp(0.0, 1.0);
    let kind = match &f.kind {
        OracleKind::Constant { .. } => OracleKind::Constant { c: 0.0 },
        OracleKind::PiecewiseLinear { points } => OracleKind::PiecewiseLinear {
            points: points.iter().map(|&(x, v)| (x, rescale(v))).collect(),
        },
        // the analytic families all start at zero
        other => unreachable!("{other:?} has I(0) = {c}"),
    };
    Ok((n, OracleFunction::new(kind, f.x_cap)?))
}

/// One-parameter oracle families used by parameter sweeps; larger `k` is cheaper information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleFamily {
    SqrtK,
    LinearSlope,
}

impl OracleFamily {
    pub fn instantiate(self, k: f64, x_cap: f64) -> Result<OracleFunction> {
        match self {
            OracleFamily::SqrtK => OracleFunction::sqrt_k(k, x_cap),
            OracleFamily::LinearSlope => OracleFunction::linear_slope(k, x_cap),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OracleFamily::SqrtK => "sqrt_k",
            OracleFamily::LinearSlope => "linear_slope",
        }
    }
}

impl std::str::FromStr for OracleFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt_k" => Ok(OracleFamily::SqrtK),
            "linear_slope" => Ok(OracleFamily::LinearSlope),
            other => Err(Error::InvalidOracle(format!("unknown sweep family '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eval_examples() {
        let f = OracleFunction::sqrt_k(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(f.eval(1.0 / 9.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let f4 = OracleFunction::sqrt_k(4.0, 2.0).unwrap();
        assert_abs_diff_eq!(f4.eval(1.0 / 16.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(OracleFunction::constant(1.0, 1.0).unwrap().eval(0.0).unwrap(), 1.0);
        assert!(matches!(f.eval(-0.1), Err(Error::NegativePayment(_))));
        // saturation and the cap
        assert_eq!(f4.eval(1.0).unwrap(), 1.0);
        let capped = OracleFunction::sqrt_k(0.01, 4.0).unwrap();
        assert_eq!(capped.eval(9.0).unwrap(), capped.eval(4.0).unwrap());
    }

    #[test]
    fn derivative_examples() {
        let f = OracleFunction::sqrt_k(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(f.derivative(1.0 / 9.0, Side::Left).unwrap(), 1.5, epsilon = 1e-14);
        assert_eq!(f.derivative(0.0, Side::Right).unwrap(), f64::INFINITY);
        assert!(matches!(
            f.derivative(0.0, Side::Left),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(f.derivative(2.0, Side::Right).is_err());
        // kink at saturation x = 1
        assert_abs_diff_eq!(f.derivative(1.0, Side::Left).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(f.derivative(1.0, Side::Right).unwrap(), 0.0);
        let s = OracleFunction::sqrt_shift(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(s.derivative(0.0, Side::Right).unwrap(), 0.5, epsilon = 1e-15);
        let l = OracleFunction::linear_slope(2.0, 2.0).unwrap();
        for x in [0.0, 0.1, 0.3, 0.49] {
            assert_eq!(l.derivative(x, Side::Right).unwrap(), 2.0);
        }
        assert_eq!(l.derivative(0.5, Side::Right).unwrap(), 0.0);
    }

    #[test]
    fn level_examples() {
        let f4 = OracleFunction::sqrt_k(4.0, 2.0).unwrap();
        assert_abs_diff_eq!(f4.level_x(0.5).unwrap(), 1.0 / 16.0, epsilon = 1e-15);
        assert_eq!(f4.level_x(0.0).unwrap(), 0.0);
        let f = OracleFunction::sqrt_k(1.0, 2.0).unwrap();
        assert_abs_diff_eq!(f.level_x(1.0).unwrap(), 1.0, epsilon = 1e-15);
        let low = OracleFunction::sqrt_k(0.01, 4.0).unwrap();
        assert!(matches!(low.level_x(0.5), Err(Error::LevelUnreachable { .. })));
        let p = OracleFunction::piecewise(vec![(0.0, 0.0), (1.0, 0.5), (3.0, 0.8)], 3.0).unwrap();
        assert_abs_diff_eq!(p.level_x(0.25).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.level_x(0.65).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn slope_examples() {
        let f = OracleFunction::sqrt_k(1.0, 2.0).unwrap();
        let iv = f.slope_x(1.5).unwrap();
        assert_abs_diff_eq!(iv.lo, 1.0 / 9.0, epsilon = 1e-15);
        assert!(iv.is_degenerate());
        assert_abs_diff_eq!(f.slope_x(10.0).unwrap().lo, 1.0 / 400.0, epsilon = 1e-16);
        let l = OracleFunction::linear_slope(2.0, 2.0).unwrap();
        assert_eq!(l.slope_x(2.0).unwrap(), PaymentInterval { lo: 0.0, hi: 0.5 });
        assert!(matches!(
            l.slope_x(1.0),
            Err(Error::SlopeOutOfRange { fallback, .. }) if fallback == 0.5
        ));
        assert!(matches!(
            l.slope_x(3.0),
            Err(Error::SlopeOutOfRange { fallback, .. }) if fallback == 0.0
        ));
        // never as steep as 0.4 beyond saturation at x = 1
        assert!(matches!(
            f.slope_x(0.4),
            Err(Error::SlopeOutOfRange { fallback, .. }) if fallback == 1.0
        ));
        let shift = OracleFunction::sqrt_shift(1.0, 3.0).unwrap();
        assert!(matches!(
            shift.slope_x(0.6),
            Err(Error::SlopeOutOfRange { fallback, .. }) if fallback == 0.0
        ));
        // kink: slopes 0.5 then 0.15, target 0.3 falls in between
        let p = OracleFunction::piecewise(vec![(0.0, 0.0), (1.0, 0.5), (3.0, 0.8)], 3.0).unwrap();
        assert!(matches!(
            p.slope_x(0.3),
            Err(Error::SlopeOutOfRange { fallback, .. }) if fallback == 1.0
        ));
        assert_eq!(p.slope_x(0.5).unwrap(), PaymentInterval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn envelope_examples() {
        let env = monotone_envelope(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.3), (3.0, 0.8)]).unwrap();
        assert_eq!(env.breakpoints(), vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.5), (3.0, 0.8)]);
        let mono = vec![(0.0, 0.1), (1.0, 0.2), (2.0, 0.9)];
        assert_eq!(monotone_envelope(&mono).unwrap().breakpoints(), mono);
        let env = monotone_envelope(&[(0.0, 0.4), (1.0, 0.2)]).unwrap();
        assert_eq!(env.breakpoints(), vec![(0.0, 0.4), (1.0, 0.4)]);
        assert!(matches!(monotone_envelope(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn concavify_examples() {
        let env = monotone_envelope(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.3), (3.0, 0.8)]).unwrap();
        let j = concavify(&env);
        assert_abs_diff_eq!(j.eval(2.0).unwrap(), 0.65, epsilon = 1e-15);
        assert_eq!(j.breakpoints(), vec![(0.0, 0.0), (1.0, 0.5), (3.0, 0.8)]);
        let seg = OracleFunction::piecewise(vec![(0.0, 0.0), (1.0, 1.0)], 1.0).unwrap();
        assert_eq!(concavify(&seg).breakpoints(), vec![(0.0, 0.0), (1.0, 1.0)]);
        let root = OracleFunction::sqrt_k(1.0, 1.0).unwrap();
        let j = concavify(&root);
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            let diff = j.eval(x).unwrap() - root.eval(x).unwrap();
            // chord error of sqrt on a 1/4095 grid is largest near the origin
            assert!(diff.abs() < 2e-2, "x = {x}: {diff}");
            if x >= 0.1 {
                assert!(diff.abs() < 1e-5, "x = {x}: {diff}");
            }
        }
    }

    #[test]
    fn normalization_flags_shift() {
        let f = OracleFunction::piecewise(vec![(0.0, 0.4), (1.0, 0.2), (2.0, 0.9)], 2.0).unwrap();
        let rep = normalize(&f).unwrap();
        assert!(rep.shifted_game_required);
        assert_eq!(rep.shift_c, 0.4);
        rep.concave.check_normalized().unwrap();
        assert!(f.check_normalized().is_err());
    }

    #[test]
    fn shift_examples() {
        let m = fixtures::example1();
        let f = OracleFunction::sqrt_k(1.0, 2.0).unwrap();
        let (n, j) = shift_to_zero(&m, &f).unwrap();
        assert_eq!(n, m);
        assert_eq!(j, f);

        let f = OracleFunction::piecewise(vec![(0.0, 0.5), (1.0, 1.0)], 2.0).unwrap();
        let (n, j) = shift_to_zero(&m, &f).unwrap();
        assert_eq!(j.eval(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(j.eval(0.5).unwrap(), 0.5, epsilon = 1e-15);
        let r = maximal_matrix(&m).unwrap();
        let direct = cross_section(&m, &r, f.eval(0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(direct.a(0, 1), 1.5, epsilon = 1e-15);
        let shifted = cross_section(&n, &maximal_matrix(&n).unwrap(), 0.5).unwrap();
        assert_abs_diff_eq!(shifted.a(0, 1), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(shifted.b(0, 1), -1.5, epsilon = 1e-15);

        let c = OracleFunction::constant(0.4, 2.0).unwrap();
        let (n, j) = shift_to_zero(&m, &c).unwrap();
        assert_eq!(j.kind(), &OracleKind::Constant { c: 0.0 });
        assert_eq!(n, cross_section(&m, &r, 0.4).unwrap());
        let one = OracleFunction::constant(1.0, 2.0).unwrap();
        assert!(matches!(shift_to_zero(&m, &one), Err(Error::DegenerateOracle)));
    }

    #[test]
    fn invalid_oracles() {
        assert!(OracleFunction::sqrt_k(0.0, 1.0).is_err());
        assert!(OracleFunction::constant(1.5, 1.0).is_err());
        assert!(OracleFunction::piecewise(vec![(0.5, 0.0)], 1.0).is_err());
        assert!(OracleFunction::piecewise(vec![(0.0, 0.0), (0.0, 0.1)], 1.0).is_err());
        assert!(OracleFunction::sqrt_k(1.0, -1.0).is_err());
    }
}
