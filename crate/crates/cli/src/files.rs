//! TOML game, oracle and sample files.
//!
//! Game file:
//!
//! ```toml
//! class = "strictly_competitive"   # optional: "general" (default) or "strictly_competitive"
//! row_labels = ["A1", "A2"]        # optional
//! col_labels = ["B1", "B2"]        # optional
//! payoffs = [
//!   [[1, -1], [0, 0]],
//!   [[0, 0], [2, -2]],
//! ]
//! ```
//!
//! Oracle file: `family` plus that family's parameter, an optional `x_cap`:
//!
//! ```toml
//! family = "sqrt_k"    # sqrt_k (k), sqrt_shift (a), linear_slope (b), constant_c (c), piecewise_linear (points)
//! k = 1.0
//! x_cap = 2.0          # optional; defaults to the game's A payoff range
//! ```
//!
//! Sample file (input to `normalize`): `samples = [[x, I], ...]`, sorted by `x`.

use std::fs;
use std::path::Path;

use oracle_games::game::Labels;
use oracle_games::{BimatrixGame, OracleFunction, OracleKind};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameClass {
    #[default]
    General,
    StrictlyCompetitive,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFileIn {
    #[serde(default)]
    class: GameClass,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
    payoffs: Vec<Spanned<Vec<[f64; 2]>>>,
}

#[derive(Debug, Serialize)]
struct GameFileOut<'a> {
    class: GameClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    row_labels: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    col_labels: Option<&'a [String]>,
    payoffs: Vec<Vec<[f64; 2]>>,
}

/// Oracle file contents before `x_cap` is resolved against a game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    #[serde(flatten)]
    pub kind: OracleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_cap: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    samples: Vec<(f64, f64)>,
}

/// What `normalize` was given.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalizeInput {
    Oracle(OracleSpec),
    Samples(Vec<(f64, f64)>),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// 1-based line and column of byte `offset` in `src`.
fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |n| n + 1) + 1;
    (line, col)
}

pub fn parse_game(src: &str, path: &Path) -> Result<BimatrixGame, CliError> {
    let raw: GameFileIn = toml::from_str(src).map_err(|e| CliError::parse(path, e.to_string()))?;
    let Some(first) = raw.payoffs.first() else {
        return Err(CliError::parse(path, "payoffs is empty"));
    };
    let width = first.get_ref().len();
    if let Some(bad) = raw.payoffs.iter().find(|r| r.get_ref().len() != width) {
        let (line, col) = position(src, bad.span().start);
        return Err(CliError::parse(
            path,
            format!(
                "line {line}, column {col}: row has {} cells, expected {width}",
                bad.get_ref().len()
            ),
        ));
    }
    let rows: Vec<Vec<(f64, f64)>> = raw
        .payoffs
        .iter()
        .map(|r| r.get_ref().iter().map(|&[a, b]| (a, b)).collect())
        .collect();
    let mut game = BimatrixGame::from_rows(&rows).map_err(|e| CliError::parse(path, e.to_string()))?;
    if raw.row_labels.is_some() || raw.col_labels.is_some() {
        let labels = Labels {
            rows: raw
                .row_labels
                .unwrap_or_else(|| (1..=game.rows()).map(|i| format!("A{i}")).collect()),
            cols: raw
                .col_labels
                .unwrap_or_else(|| (1..=game.cols()).map(|j| format!("B{j}")).collect()),
        };
        game = game
            .with_labels(labels)
            .map_err(|e| CliError::parse(path, e.to_string()))?;
    }
    if raw.class == GameClass::StrictlyCompetitive && !game.is_strictly_competitive() {
        return Err(CliError::parse(
            path,
            "declared strictly_competitive, but some pair of cells orders A's and B's payoffs the same way",
        ));
    }
    Ok(game)
}

pub fn load_game(path: &Path) -> Result<BimatrixGame, CliError> {
    parse_game(&read(path)?, path)
}

/// TOML text that [`parse_game`] reads back into an identical game.
pub fn write_game(game: &BimatrixGame) -> String {
    let payoffs = (0..game.rows())
        .map(|i| (0..game.cols()).map(|j| [game.a(i, j), game.b(i, j)]).collect())
        .collect();
    let labels = game.labels();
    let out = GameFileOut {
        class: if game.is_strictly_competitive() {
            GameClass::StrictlyCompetitive
        } else {
            GameClass::General
        },
        row_labels: labels.map(|l| l.rows.as_slice()),
        col_labels: labels.map(|l| l.cols.as_slice()),
        payoffs,
    };
    toml::to_string(&out).expect("game files always serialize")
}

pub fn parse_oracle(src: &str, path: &Path) -> Result<OracleSpec, CliError> {
    toml::from_str(src).map_err(|e| CliError::parse(path, e.to_string()))
}

pub fn load_oracle(path: &Path) -> Result<OracleSpec, CliError> {
    parse_oracle(&read(path)?, path)
}

pub fn write_oracle(f: &OracleFunction) -> String {
    let spec = OracleSpec {
        kind: f.kind().clone(),
        x_cap: Some(f.x_cap()),
    };
    toml::to_string(&spec).expect("oracle files always serialize")
}

pub fn load_normalize_input(path: &Path) -> Result<NormalizeInput, CliError> {
    let src = read(path)?;
    let table: toml::Table = src
        .parse()
        .map_err(|e: toml::de::Error| CliError::parse(path, e.to_string()))?;
    if table.contains_key("samples") {
        let s: SampleFile = toml::from_str(&src).map_err(|e| CliError::parse(path, e.to_string()))?;
        if s.samples.is_empty() {
            return Err(CliError::Solver(oracle_games::Error::EmptyInput));
        }
        Ok(NormalizeInput::Samples(s.samples))
    } else {
        parse_oracle(&src, path).map(NormalizeInput::Oracle)
    }
}

/// Cap used when an oracle file leaves `x_cap` out: A's payoff range, or 1 for a flat game.
pub fn default_x_cap(game: &BimatrixGame) -> f64 {
    let range = game.a_payoff_range();
    if range > 0.0 {
        range
    } else {
        1.0
    }
}

impl OracleSpec {
    /// Resolves the cap against `game` (or the spec's own cap) and validates the parameters.
    pub fn resolve(&self, game: Option<&BimatrixGame>, path: &Path) -> Result<OracleFunction, CliError> {
        let x_cap = match (self.x_cap, game, &self.kind) {
            (Some(c), _, _) => c,
            (None, Some(g), _) => default_x_cap(g),
            (None, None, OracleKind::PiecewiseLinear { points }) => points.last().map_or(1.0, |p| p.0.max(1e-12)),
            (None, None, _) => {
                return Err(CliError::parse(path, "x_cap is required when no game file is given"));
            }
        };
        OracleFunction::new(self.kind.clone(), x_cap).map_err(|e| CliError::parse(path, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use oracle_games::fixtures;

    const P: &str = "test.toml";

    #[test]
    fn reads_example_game() {
        let src = "payoffs = [\n  [[1, -1], [0, 0]],\n  [[0, 0], [2, -2]],\n]\n";
        let g = parse_game(src, Path::new(P)).unwrap();
        assert_eq!(g, fixtures::example1());
    }

    #[test]
    fn ragged_rows_report_position() {
        let src = "payoffs = [\n  [[1, -1], [0, 0]],\n  [[0, 0]],\n]\n";
        let e = parse_game(src, Path::new(P)).unwrap_err().to_string();
        assert!(e.contains("line 3, column 3"), "{e}");
    }

    #[test]
    fn syntax_errors_report_position() {
        let e = parse_game("payoffs = [[[1, 2]]\n", Path::new(P))
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn declared_class_is_checked() {
        let src = "class = \"strictly_competitive\"\npayoffs = [[[1, 1], [0, 0]]]\n";
        assert!(matches!(parse_game(src, Path::new(P)), Err(CliError::Parse { .. })));
        let ok = "class = \"strictly_competitive\"\npayoffs = [[[1, -1], [0, 0]]]\n";
        assert!(parse_game(ok, Path::new(P)).is_ok());
    }

    #[test]
    fn labels_survive_round_trip() {
        let src = "row_labels = [\"up\", \"down\"]\npayoffs = [[[1, -1], [0, 0]], [[0, 0], [2, -2]]]\n";
        let g = parse_game(src, Path::new(P)).unwrap();
        assert_eq!(g.row_label(1), "down");
        assert_eq!(g.col_label(0), "B1");
        assert_eq!(parse_game(&write_game(&g), Path::new(P)).unwrap(), g);
    }

    #[test]
    fn oracle_families() {
        let f = parse_oracle("family = \"sqrt_k\"\nk = 4\n", Path::new(P)).unwrap();
        assert_eq!(f.kind, OracleKind::SqrtK { k: 4.0 });
        assert_eq!(f.x_cap, None);
        let f = parse_oracle("family = \"constant_c\"\nc = 0.4\nx_cap = 3\n", Path::new(P)).unwrap();
        assert_eq!(f.kind, OracleKind::Constant { c: 0.4 });
        let f = parse_oracle(
            "family = \"piecewise_linear\"\npoints = [[0, 0], [1, 0.5]]\n",
            Path::new(P),
        )
        .unwrap();
        let g = f.resolve(None, Path::new(P)).unwrap();
        assert_eq!(g.x_cap(), 1.0);
        assert!(parse_oracle("family = \"cubic\"\n", Path::new(P)).is_err());
    }

    #[test]
    fn oracle_cap_defaults_to_payoff_range() {
        let spec = parse_oracle("family = \"sqrt_k\"\nk = 1\n", Path::new(P)).unwrap();
        let f = spec.resolve(Some(&fixtures::example2()), Path::new(P)).unwrap();
        assert_eq!(f.x_cap(), 4.0);
        assert!(spec.resolve(None, Path::new(P)).is_err());
    }

    #[test]
    fn oracle_round_trip() {
        let f = OracleFunction::sqrt_shift(1.0, 2.0).unwrap();
        let spec = parse_oracle(&write_oracle(&f), Path::new(P)).unwrap();
        assert_eq!(spec.resolve(None, Path::new(P)).unwrap(), f);
    }
}
