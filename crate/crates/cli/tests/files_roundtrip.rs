use std::path::Path;

use oracle_games::{BimatrixGame, OracleFunction};
use oracle_games_cli::files::{parse_game, parse_oracle, write_game, write_oracle};
use proptest::prelude::*;

fn cells() -> impl Strategy<Value = Vec<Vec<(f64, f64)>>> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), n), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn games_survive_a_write_and_read(rows in cells()) {
        let game = BimatrixGame::from_rows(&rows).unwrap();
        let back = parse_game(&write_game(&game), Path::new("t.toml")).unwrap();
        prop_assert_eq!(back, game);
    }

    #[test]
    fn oracles_survive_a_write_and_read(k in 1e-3f64..10.0, cap in 0.1f64..10.0) {
        for f in [
            OracleFunction::sqrt_k(k, cap).unwrap(),
            OracleFunction::linear_slope(k, cap).unwrap(),
        ] {
            let spec = parse_oracle(&write_oracle(&f), Path::new("o.toml")).unwrap();
            prop_assert_eq!(spec.resolve(None, Path::new("o.toml")).unwrap(), f);
        }
    }
}
