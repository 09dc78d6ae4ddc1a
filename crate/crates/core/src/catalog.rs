//! Small reference games used by tests, documentation and the CLI.

use crate::game::{
    binarize_bounded_integer, BinaryEncoding, GameInstance, LinearConstraint, PayoffSpec, Player,
    Sense, StrategySet,
};
use crate::scalar::{int, Scalar};

fn row<T: Scalar>(v: &[i64]) -> Vec<T> {
    v.iter().map(|&x| int(x)).collect()
}

fn matrix<T: Scalar>(rows: &[&[i64]]) -> Vec<Vec<T>> {
    rows.iter().map(|r| row(r)).collect()
}

/// Two-player knapsack game:
///
/// ```text
/// max x1 + 2 x2 - 2 x1 y1 - 3 x2 y2   s.t. 3 x1 + 4 x2 <= 5
/// max 3 y1 + 5 y2 - 5 y1 x1 - 4 y2 x2 s.t. 2 y1 + 5 y2 <= 5
/// ```
///
/// Its equilibria are the pure profiles (0,1,1,0) and (1,0,0,1) and the
/// mixed profile (2/9, 7/9; 2/5, 3/5).
pub fn knapsack_game<T: Scalar>() -> GameInstance<T> {
    let p1 = Player {
        strategies: StrategySet::knapsack(&[3, 4], 5).expect("valid"),
        payoff: PayoffSpec::linear(T::zero(), row(&[1, 2]))
            .with_bilinear(1, matrix(&[&[-2, 0], &[0, -3]])),
    };
    let p2 = Player {
        strategies: StrategySet::knapsack(&[2, 5], 5).expect("valid"),
        payoff: PayoffSpec::linear(T::zero(), row(&[3, 5]))
            .with_bilinear(0, matrix(&[&[-5, 0], &[0, -4]])),
    };
    GameInstance::new("knapsack-game", vec![p1, p2]).expect("valid")
}

/// Matching pennies with one binary variable per player: the first player
/// wants to match (`-x + 2xy`), the second to mismatch (`y - 2xy`). No pure
/// equilibrium exists.
pub fn matching_pennies<T: Scalar>() -> GameInstance<T> {
    let p1 = Player {
        strategies: StrategySet::new(1, vec![]).expect("valid"),
        payoff: PayoffSpec::linear(T::zero(), row(&[-1])).with_bilinear(1, matrix(&[&[2]])),
    };
    let p2 = Player {
        strategies: StrategySet::new(1, vec![]).expect("valid"),
        payoff: PayoffSpec::linear(T::zero(), row(&[1])).with_bilinear(0, matrix(&[&[-2]])),
    };
    GameInstance::new("matching-pennies", vec![p1, p2]).expect("valid")
}

/// Bounded two-player game `max -x1 x2` / `max x1 x2` with the first player
/// choosing an integer `x1 in [1, upper]` (binary encoded) and the second
/// `x2 in {-1, 1}` encoded as `2c - 1`. With `floor = Some(k)` the first
/// player is additionally restricted to `x1 >= k`.
///
/// Returns the game and the encoding of `x1`.
pub fn bounded_sign_game<T: Scalar>(
    upper: i64,
    floor: Option<i64>,
) -> (GameInstance<T>, BinaryEncoding) {
    let enc = binarize_bounded_integer(1, upper).expect("upper >= 1");
    let lower = enc.lower;
    let w: Vec<i64> = enc.weights.clone();
    let bits = enc.bits().max(1);
    let pad = |v: Vec<i64>| -> Vec<i64> {
        let mut v = v;
        v.resize(bits, 0);
        v
    };
    let mut constraints = Vec::new();
    if let Some((coeffs, rhs)) = enc.range_constraint() {
        constraints.push(LinearConstraint::new(row(&coeffs), Sense::Le, int(rhs)));
    }
    if let Some(k) = floor {
        constraints.push(LinearConstraint::new(
            row(&pad(w.clone())),
            Sense::Ge,
            int(k - lower),
        ));
    }
    if enc.bits() == 0 {
        // A singleton range still needs one (fixed) variable.
        constraints.push(LinearConstraint::new(row(&[1]), Sense::Eq, T::zero()));
    }
    // -x1 x2 = L - 2Lc + Σ w b - 2 Σ w b c
    let p1 = Player {
        strategies: StrategySet::new(bits, constraints).expect("valid"),
        payoff: PayoffSpec::linear(int(lower), row(&pad(w.clone())))
            .with_opp_linear(1, row(&[-2 * lower]))
            .with_bilinear(
                1,
                pad(w.clone()).iter().map(|&wk| row(&[-2 * wk])).collect(),
            ),
    };
    // x1 x2 = -L + 2Lc - Σ w b + 2 Σ w b c
    let p2 = Player {
        strategies: StrategySet::new(1, vec![]).expect("valid"),
        payoff: PayoffSpec::linear(int(-lower), row(&[2 * lower]))
            .with_opp_linear(0, row(&pad(w.iter().map(|v| -v).collect())))
            .with_bilinear(0, vec![row(&pad(w.iter().map(|v| 2 * v).collect()))]),
    };
    let name = match floor {
        Some(k) => format!("bounded-sign-game-{upper}-floor-{k}"),
        None => format!("bounded-sign-game-{upper}"),
    };
    (GameInstance::new(name, vec![p1, p2]).expect("valid"), enc)
}
