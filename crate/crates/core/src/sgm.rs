//! Sampled generation method for two-player games: play a mixed
//! equilibrium of the game restricted to sampled strategies, ask the
//! improvement oracle for profitable deviations in the full game, add them
//! to the samples, repeat.

use crate::error::{Error, Result};
use crate::game::{GameInstance, MixedProfile, Strategy};
use crate::limits::Limits;
use crate::oracle::{best_response_at, improve};
use crate::scalar::Scalar;
use crate::support::Bimatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleEvent {
    pub iteration: usize,
    pub player: usize,
    pub strategy: Strategy,
}

/// Inner approximation of both strategy sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledGame {
    pub samples: Vec<Vec<Strategy>>,
    pub iteration: usize,
    pub history: Vec<SampleEvent>,
}

impl SampledGame {
    /// Appends `strategy` unless already sampled; reports whether it was new.
    pub fn add(&mut self, player: usize, strategy: Strategy) -> bool {
        if self.samples[player].contains(&strategy) {
            return false;
        }
        self.history.push(SampleEvent {
            iteration: self.iteration,
            player,
            strategy: strategy.clone(),
        });
        self.samples[player].push(strategy);
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SgmOutcome<T> {
    /// Certified by the oracle on the full game.
    Equilibrium {
        profile: MixedProfile<T>,
        iterations: usize,
    },
    /// The profile with the smallest ε seen.
    IterationLimit {
        profile: MixedProfile<T>,
        epsilon: T,
        iterations: usize,
    },
    /// The last sampled-game equilibrium.
    TimeLimit {
        profile: MixedProfile<T>,
        epsilon: T,
        iterations: usize,
    },
}

impl<T> SgmOutcome<T> {
    pub fn profile(&self) -> &MixedProfile<T> {
        match self {
            SgmOutcome::Equilibrium { profile, .. }
            | SgmOutcome::IterationLimit { profile, .. }
            | SgmOutcome::TimeLimit { profile, .. } => profile,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            SgmOutcome::Equilibrium { iterations, .. }
            | SgmOutcome::IterationLimit { iterations, .. }
            | SgmOutcome::TimeLimit { iterations, .. } => *iterations,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SgmRun<T> {
    pub outcome: SgmOutcome<T>,
    pub sample: SampledGame,
}

fn require_two<T: Scalar>(game: &GameInstance<T>) -> Result<()> {
    if game.num_players() != 2 {
        return Err(Error::TwoPlayersOnly("the sampled generation method"));
    }
    Ok(())
}

/// Each player starts from its best response to an all-zeros opponent.
pub fn initialize_sample<T: Scalar>(game: &GameInstance<T>) -> Result<SampledGame> {
    require_two(game)?;
    let zeros: Vec<Vec<T>> = (0..2).map(|i| vec![T::zero(); game.num_vars(i)]).collect();
    let samples = (0..2)
        .map(|i| best_response_at(game, i, &zeros).map(|br| vec![br.strategy]))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledGame {
        samples,
        iteration: 0,
        history: Vec::new(),
    })
}

/// Payoff matrices of the game restricted to the sampled strategies.
pub fn sampled_bimatrix<T: Scalar>(game: &GameInstance<T>, s: &SampledGame) -> Bimatrix<T> {
    let p1: Vec<Vec<T>> = s.samples[0].iter().map(Strategy::to_vector).collect();
    let p2: Vec<Vec<T>> = s.samples[1].iter().map(Strategy::to_vector).collect();
    let mut row = Vec::with_capacity(p1.len());
    let mut col = Vec::with_capacity(p1.len());
    for x in &p1 {
        let (mut r, mut c) = (Vec::with_capacity(p2.len()), Vec::with_capacity(p2.len()));
        for y in &p2 {
            let points = [x.clone(), y.clone()];
            r.push(game.payoff_at(0, &points));
            c.push(game.payoff_at(1, &points));
        }
        row.push(r);
        col.push(c);
    }
    Bimatrix { row, col }
}

/// A mixed equilibrium of the sampled game, found by support enumeration.
pub fn play_sampled<T: Scalar>(game: &GameInstance<T>, s: &SampledGame) -> Result<MixedProfile<T>> {
    require_two(game)?;
    if s.samples.iter().any(Vec::is_empty) {
        return Err(Error::InvalidProfile(
            "sampled game has an empty sample".into(),
        ));
    }
    let bimatrix = sampled_bimatrix(game, s);
    let sol = bimatrix.first_equilibrium()?.ok_or_else(|| {
        Error::Internal("support enumeration exhausted without an equilibrium".into())
    })?;
    let support = |sample: &[Strategy], mix: Vec<T>| -> Vec<(Strategy, T)> {
        sample.iter().cloned().zip(mix).collect()
    };
    Ok(MixedProfile::new_unchecked(vec![
        support(&s.samples[0], sol.row_mix),
        support(&s.samples[1], sol.col_mix),
    ])
    .canonicalize())
}

pub fn solve_sgm<T: Scalar>(game: &GameInstance<T>, limits: Limits) -> Result<SgmRun<T>> {
    let sample = initialize_sample(game)?;
    solve_sgm_from(game, sample, limits)
}

/// Runs the play/improve loop from a given sample.
pub fn solve_sgm_from<T: Scalar>(
    game: &GameInstance<T>,
    mut sample: SampledGame,
    limits: Limits,
) -> Result<SgmRun<T>> {
    if limits.max_iterations == 0 {
        return Err(Error::InvalidGame(
            "max iterations must be at least 1".into(),
        ));
    }
    let mut best: Option<(MixedProfile<T>, T)> = None;
    loop {
        sample.iteration += 1;
        let profile = play_sampled(game, &sample)?;
        let verdict = improve(game, &profile)?;
        let iterations = sample.iteration;
        if verdict.is_yes() {
            return Ok(SgmRun {
                outcome: SgmOutcome::Equilibrium {
                    profile,
                    iterations,
                },
                sample,
            });
        }
        let epsilon = verdict.worst_violation.clone();
        if best.as_ref().is_none_or(|(_, e)| epsilon < *e) {
            best = Some((profile.clone(), epsilon.clone()));
        }
        if limits.expired() {
            return Ok(SgmRun {
                outcome: SgmOutcome::TimeLimit {
                    profile,
                    epsilon,
                    iterations,
                },
                sample,
            });
        }
        if iterations >= limits.max_iterations {
            let (profile, epsilon) = best.expect("at least one iteration ran");
            return Ok(SgmRun {
                outcome: SgmOutcome::IterationLimit {
                    profile,
                    epsilon,
                    iterations,
                },
                sample,
            });
        }
        let deviations: Vec<(usize, Strategy)> = verdict
            .deviations()
            .map(|(p, s, _)| (p, s.clone()))
            .collect();
        let mut grew = false;
        for (player, strategy) in deviations {
            grew |= sample.add(player, strategy);
        }
        if !grew {
            return Err(Error::Internal(
                "oracle deviation already present in the sample".into(),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{knapsack_game, matching_pennies};
    use crate::game::PureProfile;
    use crate::scalar::{ratio, Rational};

    fn s(bits: &[u8]) -> Strategy {
        Strategy::from_bits(bits)
    }

    fn sampled(a: &[&[u8]], b: &[&[u8]]) -> SampledGame {
        SampledGame {
            samples: vec![
                a.iter().map(|x| s(x)).collect(),
                b.iter().map(|x| s(x)).collect(),
            ],
            iteration: 0,
            history: vec![],
        }
    }

    #[test]
    fn initial_sample_of_knapsack_game() {
        let g = knapsack_game::<Rational>();
        let smp = initialize_sample(&g).unwrap();
        assert_eq!(smp.samples, vec![vec![s(&[0, 1])], vec![s(&[0, 1])]]);
    }

    #[test]
    fn play_with_one_sided_sample_is_pure() {
        let g = knapsack_game::<Rational>();
        let p = play_sampled(&g, &sampled(&[&[0, 1]], &[&[0, 1], &[1, 0]])).unwrap();
        let expected = PureProfile::new(vec![s(&[0, 1]), s(&[1, 0])]);
        assert_eq!(p.as_pure(), Some(expected));
    }

    #[test]
    fn play_with_full_samples_finds_a_pure_equilibrium_first() {
        let g = knapsack_game::<Rational>();
        let p = play_sampled(&g, &sampled(&[&[0, 1], &[1, 0]], &[&[0, 1], &[1, 0]])).unwrap();
        assert!(p.as_pure().is_some());
    }

    #[test]
    fn mixed_system_of_the_knapsack_game() {
        // Restrict the sampled game to its fully mixed support pair.
        let g = knapsack_game::<Rational>();
        let smp = sampled(&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]);
        let all = sampled_bimatrix(&g, &smp).all_support_solutions().unwrap();
        let mixed = all
            .iter()
            .find(|sol| sol.row_mix.iter().all(|p| *p > ratio(0, 1)))
            .unwrap();
        assert_eq!(mixed.row_mix, vec![ratio(2, 9), ratio(7, 9)]);
        assert_eq!(mixed.col_mix, vec![ratio(2, 5), ratio(3, 5)]);
    }

    #[test]
    fn singleton_samples_play_their_profile() {
        let g = knapsack_game::<Rational>();
        let p = play_sampled(&g, &sampled(&[&[1, 0]], &[&[0, 0]])).unwrap();
        assert_eq!(
            p.as_pure(),
            Some(PureProfile::new(vec![s(&[1, 0]), s(&[0, 0])]))
        );
    }

    #[test]
    fn knapsack_game_converges_in_two_iterations() {
        let g = knapsack_game::<Rational>();
        let run = solve_sgm(&g, Limits::default()).unwrap();
        match &run.outcome {
            SgmOutcome::Equilibrium {
                profile,
                iterations,
            } => {
                assert_eq!(*iterations, 2);
                assert_eq!(
                    profile.as_pure(),
                    Some(PureProfile::new(vec![s(&[0, 1]), s(&[1, 0])]))
                );
                assert!(improve(&g, profile).unwrap().is_yes());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(run.sample.history.iter().all(|e| e.iteration == 1));
    }

    #[test]
    fn matching_pennies_mixes() {
        let g = matching_pennies::<Rational>();
        let run = solve_sgm(&g, Limits::default()).unwrap();
        let SgmOutcome::Equilibrium { profile, .. } = run.outcome else {
            panic!("no equilibrium");
        };
        assert_eq!(profile.as_pure(), None);
        assert_eq!(improve(&g, &profile).unwrap().worst_violation, ratio(0, 1));
    }

    #[test]
    fn iteration_limit_reports_best_epsilon() {
        let g = knapsack_game::<Rational>();
        let run = solve_sgm(&g, Limits::iterations(1)).unwrap();
        match run.outcome {
            SgmOutcome::IterationLimit {
                epsilon,
                iterations,
                ..
            } => {
                assert_eq!(iterations, 1);
                assert_eq!(epsilon, ratio(2, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn floating_point_instantiation() {
        let g = knapsack_game::<f64>();
        let run = solve_sgm(&g, Limits::default()).unwrap();
        assert!(matches!(
            run.outcome,
            SgmOutcome::Equilibrium { iterations: 2, .. }
        ));
    }
}
