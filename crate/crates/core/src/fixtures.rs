//! Reference games used throughout the tests, the acceptance suite and the CLI examples.

use crate::game::BimatrixGame;

/// Scaled matching pennies: unique mixed equilibrium `(2/3, 1/3)` for both players.
pub fn example1() -> BimatrixGame {
    BimatrixGame::zero_sum(&[vec![1.0, 0.0], vec![0.0, 2.0]]).expect("valid fixture")
}

/// 3x3 diagonal game containing [`example1`] as its upper-left block.
pub fn example2() -> BimatrixGame {
    BimatrixGame::zero_sum(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 4.0]]).expect("valid fixture")
}

/// Weighted matching pennies where B may opt out with the third column.
pub fn harmful() -> BimatrixGame {
    BimatrixGame::from_rows(&[
        vec![(4.0, -1.0), (0.0, 2.0), (0.0, 0.0)],
        vec![(0.0, 2.0), (4.0, -1.0), (0.0, 0.0)],
    ])
    .expect("valid fixture")
}

/// 4x4 game built from two 2x2 blocks with heavy off-block penalties; three mixed equilibria.
pub fn two_blocks() -> BimatrixGame {
    let p = (-10.0, -10.0);
    BimatrixGame::from_rows(&[
        vec![(1.0, -1.0), (0.0, 0.0), p, p],
        vec![(0.0, 0.0), (2.0, -2.0), p, p],
        vec![p, p, (2.0, -2.0), (0.0, 0.0)],
        vec![p, p, (0.0, 0.0), (3.0, -3.0)],
    ])
    .expect("valid fixture")
}
