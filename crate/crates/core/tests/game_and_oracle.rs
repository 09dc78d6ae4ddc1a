mod common;

use std::collections::BTreeMap;

use common::{all_profiles, feasible, random_dims, random_game};
use ipgkit::game::{GameInstance, MixedProfile, Player, PureProfile, Strategy};
use ipgkit::oracle::{best_response, epsilon_of, improve};
use ipgkit::scalar::{int, ratio};
use ipgkit::{Game, Rational};
use proptest::prelude::*;
use rand::Rng;

fn random_mixed(seed: u64, game: &Game, max_support: usize) -> MixedProfile<Rational> {
    let mut rng = common::rng(seed);
    let players = (0..game.num_players())
        .map(|i| {
            let pool = common::shuffled(&mut rng, &feasible(game, i));
            let k = rng.gen_range(1..=max_support.min(pool.len()));
            let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=5)).collect();
            let total: i64 = weights.iter().sum();
            pool.into_iter()
                .take(k)
                .zip(weights)
                .map(|(s, w)| (s, ratio(w, total)))
                .collect()
        })
        .collect();
    MixedProfile::new(players).unwrap()
}

fn flip<V: Clone>(m: &BTreeMap<usize, V>) -> BTreeMap<usize, V> {
    m.iter().map(|(&j, v)| (1 - j, v.clone())).collect()
}

/// The same game with the two players listed in the opposite order.
fn swapped(game: &Game) -> Game {
    let players: Vec<Player<Rational>> = game
        .players()
        .iter()
        .rev()
        .map(|p| {
            let mut p = p.clone();
            p.payoff.opp_linear = flip(&p.payoff.opp_linear);
            p.payoff.bilinear = flip(&p.payoff.bilinear);
            p
        })
        .collect();
    GameInstance::new("swapped", players).unwrap()
}

fn pure_is_equilibrium(game: &Game, p: &PureProfile) -> bool {
    (0..game.num_players()).all(|i| {
        let now = game.evaluate_pure(p, i).unwrap();
        feasible(game, i).into_iter().all(|alt| {
            let mut q = p.strategies.clone();
            q[i] = alt;
            game.evaluate_pure(&PureProfile::new(q), i).unwrap()
                <= now.clone() + game.tolerance().clone()
        })
    })
}

fn mixed_is_equilibrium(game: &Game, m: &MixedProfile<Rational>) -> bool {
    (0..game.num_players()).all(|i| {
        let now = game.evaluate_mixed(m, i).unwrap();
        feasible(game, i).into_iter().all(|alt| {
            let mut supports = m.supports().to_vec();
            supports[i] = vec![(alt, int(1))];
            let dev = MixedProfile::new(supports).unwrap();
            game.evaluate_mixed(&dev, i).unwrap() <= now.clone() + game.tolerance().clone()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn payoffs_are_affine_in_own_variables(seed in any::<u64>()) {
        let dims = random_dims(seed, 10);
        let g = random_game(seed, &dims);
        let mut rng = common::rng(seed ^ 7);
        let opp: Vec<Rational> = (0..dims[1]).map(|_| int(rng.gen_range(0..=1))).collect();
        let n = dims[0];
        let f = |x: &[u8]| g.payoff_at(0, &[Strategy::from_bits(x).to_vector(), opp.clone()]);
        for _ in 0..20 {
            let x: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1)).collect();
            let y: Vec<u8> = x.iter().map(|&b| if b == 1 { 0 } else { rng.gen_range(0..=1) }).collect();
            let sum: Vec<u8> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            prop_assert_eq!(f(&x) + f(&y) - f(&vec![0; n]), f(&sum));
        }
    }

    #[test]
    fn mixed_payoff_is_the_expectation_over_outcomes(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        let m = random_mixed(seed, &g, 3);
        for i in 0..2 {
            let mut expected = int(0);
            for (a, p) in m.support(0) {
                for (b, q) in m.support(1) {
                    expected += p * q * g.evaluate_pure(&PureProfile::new(vec![a.clone(), b.clone()]), i).unwrap();
                }
            }
            prop_assert_eq!(g.evaluate_mixed(&m, i).unwrap(), expected);
        }
    }

    #[test]
    fn point_masses_evaluate_like_pure_profiles(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        for p in all_profiles(&g).into_iter().take(30) {
            for i in 0..2 {
                prop_assert_eq!(g.evaluate_mixed(&MixedProfile::from_pure(&p), i).unwrap(), g.evaluate_pure(&p, i).unwrap());
            }
        }
    }

    #[test]
    fn improve_agrees_with_brute_force(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        for p in all_profiles(&g) {
            prop_assert_eq!(improve(&g, &p).unwrap().is_yes(), pure_is_equilibrium(&g, &p));
        }
        for k in 0..10 {
            let m = random_mixed(seed.wrapping_add(k), &g, 3);
            prop_assert_eq!(improve(&g, &m).unwrap().is_yes(), mixed_is_equilibrium(&g, &m));
        }
    }

    #[test]
    fn best_response_dominates_the_incumbent(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        let m = random_mixed(seed, &g, 3);
        for i in 0..2 {
            let br = best_response(&g, i, &m).unwrap();
            prop_assert!(br.value >= g.evaluate_mixed(&m, i).unwrap());
            for (s, _) in m.support(i) {
                let mut supports = m.supports().to_vec();
                supports[i] = vec![(s.clone(), int(1))];
                prop_assert!(br.value >= g.evaluate_mixed(&MixedProfile::new(supports).unwrap(), i).unwrap());
            }
        }
    }

    #[test]
    fn opponent_only_terms_do_not_move_best_responses(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        let players: Vec<Player<Rational>> = g
            .players()
            .iter()
            .map(|p| {
                let mut p = p.clone();
                for e in p.payoff.opp_linear.values_mut() {
                    e.iter_mut().for_each(|v| *v = int(0));
                }
                p
            })
            .collect();
        let zeroed = GameInstance::new("zeroed", players).unwrap();
        for k in 0..5 {
            let m = random_mixed(seed.wrapping_add(k), &g, 3);
            for i in 0..2 {
                prop_assert_eq!(best_response(&g, i, &m).unwrap().strategy, best_response(&zeroed, i, &m).unwrap().strategy);
            }
            let (a, b) = (improve(&g, &m).unwrap(), improve(&zeroed, &m).unwrap());
            prop_assert_eq!(a.is_yes(), b.is_yes());
            prop_assert_eq!(a.worst_violation, b.worst_violation);
        }
    }

    #[test]
    fn epsilon_ignores_player_order(seed in any::<u64>()) {
        let g = random_game(seed, &random_dims(seed, 10));
        let h = swapped(&g);
        let m = random_mixed(seed, &g, 3);
        let mut flipped = m.supports().to_vec();
        flipped.reverse();
        prop_assert_eq!(epsilon_of(&g, &m).unwrap(), epsilon_of(&h, &MixedProfile::new(flipped).unwrap()).unwrap());
    }
}
