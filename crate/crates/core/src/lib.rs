//! Two-player normal-form games in which player A can pay an oracle for a
//! chance to learn player B's realized strategy before moving.
//!
//! The pipeline runs bottom-up: [`game`] builds the maximal matrix and
//! cross-sections, [`nash`] solves a fixed cross-section, [`nodes`] finds where
//! B's dominance structure changes along `I`, and [`solver`] combines the
//! intervals with an [`oracle`] function into the equilibrium `{s_a, s_b, x}`.
//! [`verify`] checks results independently.

pub mod error;
pub mod fixtures;
pub mod game;
pub mod lp;
pub mod nash;
pub mod nodes;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use error::{Error, Result, Side};
pub use game::{BimatrixGame, MixedStrategy, PayoffPair};
pub use oracle::{OracleFamily, OracleFunction, OracleKind};
pub use solver::{solve_multi, solve_oracle_game, CaseLabel, GameAnalysis, OracleEquilibrium};
