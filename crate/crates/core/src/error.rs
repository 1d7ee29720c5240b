use thiserror::Error;

/// Which side of a point a one-sided derivative is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    #[error("ambiguous best response in column {col}: rows {first} and {second} tie on A's payoff but differ for B")]
    AmbiguousBestResponse { col: usize, first: usize, second: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not a maximal matrix (rows differ by {0:e})")]
    NotMaximalMatrix(f64),

    #[error("negative payment x = {0}")]
    NegativePayment(f64),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid oracle function: {0}")]
    InvalidOracle(String),

    #[error("{side:?} derivative undefined at x = {x} (domain [0, {x_cap}])")]
    OutsideDomain { x: f64, side: Side, x_cap: f64 },

    #[error("response level {level} unreachable (attainable range [{min}, {sup}])")]
    LevelUnreachable { level: f64, min: f64, sup: f64 },

    #[error("slope {slope} never attained; supremum of payments with slope >= {slope} is {fallback}")]
    SlopeOutOfRange { slope: f64, fallback: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("oracle responds with certainty at zero payment")]
    DegenerateOracle,

    #[error("oracle function is not normalized: {0}")]
    NotNormalized(String),

    #[error("no equilibrium found (numerical failure)")]
    NoEquilibriumFound,

    #[error("game too large for exhaustive enumeration: {rows}x{cols} (limit {limit})")]
    TooLarge { rows: usize, cols: usize, limit: usize },

    #[error("dominance margin of B strategy {strategy} changes sign {changes} times")]
    InconsistentDominance { strategy: usize, changes: usize },

    #[error("cross-section on ({lo}, {hi}) has {count} equilibria with different B strategies")]
    NonUniqueInterior { lo: f64, hi: f64, count: usize },

    #[error("B's equilibrium strategy on ({lo}, {hi}) no longer holds at I = {at} although no node lies between")]
    EquilibriumShift { lo: f64, hi: f64, at: f64 },

    #[error("base game has {count} equilibria; use solve_multi with explicit subsupports")]
    MultipleBaseEquilibria { count: usize },

    #[error("{case} candidate at x = {x} is not an equilibrium: best-response gap {gap:e}")]
    CandidateRejected { case: String, x: f64, gap: f64 },

    #[error("value of information increases across a node and {candidates} payment solutions exist")]
    NonMonotoneValue { candidates: usize },

    #[error("no node mixture: 1/I' = {target} outside [{lo}, {hi}]")]
    NoMixExists { target: f64, lo: f64, hi: f64 },

    #[error("subgame {index}: {source}")]
    Subgame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
