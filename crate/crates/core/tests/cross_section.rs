mod common;

use oracle_games::game::{cross_section, maximal_matrix};
use oracle_games::nash::{best_response_gap, solve_cross_section};
use oracle_games::MixedStrategy;
use proptest::prelude::*;

fn same(a: &MixedStrategy, b: &MixedStrategy) -> bool {
    a.max_abs_diff(b) <= 1e-7
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertex_enumeration_matches_support_enumeration(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (r, c) = common::random_shape(&mut rng);
        let game = common::random_game(&mut rng, r, c);
        let ours = solve_cross_section(&game).unwrap();
        let reference = common::support_enumeration(&game);
        prop_assert_eq!(ours.profiles.len(), reference.len());
        for (sa, sb) in &reference {
            prop_assert!(ours.profiles.iter().any(|p| same(&p.s_a, sa) && same(&p.s_b, sb)));
        }
    }

    #[test]
    fn every_profile_is_an_equilibrium(seed in any::<u64>(), level in 0.0f64..1.0) {
        let mut rng = common::rng(seed);
        let (r, c) = common::random_shape(&mut rng);
        let game = common::random_game(&mut rng, r, c);
        let section = cross_section(&game, &maximal_matrix(&game).unwrap(), level).unwrap();
        let set = solve_cross_section(&section).unwrap();
        prop_assert!(!set.profiles.is_empty());
        for p in &set.profiles {
            prop_assert!(best_response_gap(&section, &p.s_a, &p.s_b) <= 1e-9);
        }
    }

    #[test]
    fn zero_sum_games_have_one_value(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (r, c) = common::random_shape(&mut rng);
        let game = common::random_zero_sum(&mut rng, r, c);
        let set = solve_cross_section(&game).unwrap();
        let values: Vec<f64> = set
            .profiles
            .iter()
            .map(|p| game.row_values_a(&p.s_b).iter().zip(p.s_a.probs()).map(|(v, q)| v * q).sum())
            .collect();
        for v in &values {
            prop_assert!((v - values[0]).abs() <= 1e-9);
        }
    }
}
