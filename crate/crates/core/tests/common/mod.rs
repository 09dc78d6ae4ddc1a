#![allow(dead_code)]

use ipgkit::game::{
    GameInstance, LinearConstraint, PayoffSpec, Player, PureProfile, Sense, Strategy, StrategySet,
};
use ipgkit::scalar::{int, ratio};
use ipgkit::{Game, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer or half-integer in `[-spread, spread]`.
pub fn coefficient(rng: &mut ChaCha8Rng, spread: i64) -> Rational {
    ratio(rng.gen_range(-2 * spread..=2 * spread), 2)
}

/// One random constraint that the random point `anchor` satisfies, so the
/// set is never empty.
fn constraint(rng: &mut ChaCha8Rng, n: usize, anchor: &[i64]) -> LinearConstraint<Rational> {
    let coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=4)).collect();
    let at: i64 = coeffs.iter().zip(anchor).map(|(a, x)| a * x).sum();
    let (sense, rhs) = match rng.gen_range(0..5) {
        0 => (Sense::Ge, at - rng.gen_range(0..=2)),
        1 => (Sense::Eq, at),
        _ => (Sense::Le, at + rng.gen_range(0..=3)),
    };
    LinearConstraint::new(coeffs.into_iter().map(int).collect(), sense, int(rhs))
}

fn strategy_set(rng: &mut ChaCha8Rng, n: usize) -> StrategySet<Rational> {
    if rng.gen_bool(0.5) {
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        let capacity = rng.gen_range(0..=weights.iter().sum::<i64>());
        return StrategySet::knapsack(&weights, capacity).unwrap();
    }
    let anchor: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
    let count = rng.gen_range(0..=2);
    StrategySet::new(n, (0..count).map(|_| constraint(rng, n, &anchor)).collect()).unwrap()
}

/// A random game with `dims[i]` binary variables for player `i`.
pub fn random_game(seed: u64, dims: &[usize]) -> Game {
    let mut rng = rng(seed);
    let players = dims
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let strategies = strategy_set(&mut rng, n);
            let own = (0..n).map(|_| coefficient(&mut rng, 5)).collect();
            let mut payoff = PayoffSpec::linear(coefficient(&mut rng, 3), own);
            for (j, &m) in dims.iter().enumerate() {
                if j == i {
                    continue;
                }
                payoff =
                    payoff.with_opp_linear(j, (0..m).map(|_| coefficient(&mut rng, 4)).collect());
                let matrix = (0..n)
                    .map(|_| (0..m).map(|_| coefficient(&mut rng, 4)).collect())
                    .collect();
                payoff = payoff.with_bilinear(j, matrix);
            }
            Player { strategies, payoff }
        })
        .collect();
    GameInstance::new(format!("random-{seed}"), players).unwrap()
}

/// Dimensions of a random two-player game with at most `total` variables.
pub fn random_dims(seed: u64, total: usize) -> Vec<usize> {
    let mut rng = rng(seed ^ 0x5eed);
    let a = rng.gen_range(1..total);
    let b = rng.gen_range(1..=total - a);
    vec![a, b]
}

pub fn feasible(game: &Game, i: usize) -> Vec<Strategy> {
    let mut pts = game.player(i).strategies.feasible_points().unwrap();
    pts.sort();
    pts
}

/// Every joint pure profile, lexicographically.
pub fn all_profiles(game: &Game) -> Vec<PureProfile> {
    let lists: Vec<Vec<Strategy>> = (0..game.num_players()).map(|i| feasible(game, i)).collect();
    let mut out = vec![Vec::new()];
    for list in &lists {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Strategy>| {
                list.iter().map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(PureProfile::new).collect()
}

pub fn shuffled<T: Clone>(rng: &mut ChaCha8Rng, items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
