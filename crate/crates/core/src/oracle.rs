//! Improvement oracle: membership and stability checks, best responses,
//! and the approximation constant of a profile.

use crate::error::{Error, Result};
use crate::game::{GameInstance, ProfileRef, Strategy};
use crate::kernel::{
    solve_knapsack, solve_milp, KnapsackProblem, LinearProgram, MilpOutcome, MilpProblem,
};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse<T> {
    pub strategy: Strategy,
    pub value: T,
}

/// Best response of `player` to the opponents in `profile`. Against a mixed
/// profile the objective uses the opponents' mean strategies.
pub fn best_response<'a, T: Scalar>(
    game: &GameInstance<T>,
    player: usize,
    profile: impl Into<ProfileRef<'a, T>>,
) -> Result<BestResponse<T>> {
    game.check_player(player)?;
    let profile = profile.into();
    let points = profile.points();
    if points.len() != game.num_players() {
        return Err(Error::DimensionMismatch {
            context: "profile players".into(),
            expected: game.num_players(),
            found: points.len(),
        });
    }
    for (k, p) in points.iter().enumerate() {
        if k != player && p.len() != game.num_vars(k) {
            return Err(Error::DimensionMismatch {
                context: format!("player {k} strategy"),
                expected: game.num_vars(k),
                found: p.len(),
            });
        }
    }
    best_response_at(game, player, &points)
}

/// Best response with every opponent `j` fixed at `points[j]`.
pub fn best_response_at<T: Scalar>(
    game: &GameInstance<T>,
    player: usize,
    points: &[Vec<T>],
) -> Result<BestResponse<T>> {
    let form = game.affine_payoff(player, points);
    let set = &game.player(player).strategies;
    let strategy = match set.as_knapsack() {
        Some(shape) => {
            solve_knapsack(&KnapsackProblem {
                weights: shape.weights,
                capacity: shape.capacity,
                primary: form.coeffs.clone(),
                secondary: None,
            })?
            .selection
        }
        None => {
            let mut lp = LinearProgram::unit_box(form.coeffs.clone());
            lp.constraints = set.constraints().to_vec();
            let milp = MilpProblem {
                lp,
                binary: (0..set.num_vars()).collect(),
            };
            match solve_milp(&milp)? {
                MilpOutcome::Optimal { point, .. } => Strategy(
                    point
                        .iter()
                        .map(|v| *v > T::one() / (T::one() + T::one()))
                        .collect(),
                ),
                MilpOutcome::Infeasible => return Err(Error::EmptyStrategySet { player }),
            }
        }
    };
    let value = form.eval_ones(strategy.ones());
    Ok(BestResponse { strategy, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Finding<T> {
    /// A played strategy lies outside the player's strategy set.
    NotMember { player: usize, strategy: Strategy },
    /// `strategy` improves the player's (expected) payoff by `improvement`.
    Deviation {
        player: usize,
        strategy: Strategy,
        improvement: T,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleVerdict<T> {
    pub answer: Answer,
    pub info: Vec<Finding<T>>,
    /// Largest best-response gain over all players, floored at zero.
    pub worst_violation: T,
}

impl<T: Scalar> OracleVerdict<T> {
    pub fn is_yes(&self) -> bool {
        self.answer == Answer::Yes
    }

    /// Profitable deviations carried in the information list.
    pub fn deviations(&self) -> impl Iterator<Item = (usize, &Strategy, &T)> {
        self.info.iter().filter_map(|f| match f {
            Finding::Deviation {
                player,
                strategy,
                improvement,
            } => Some((*player, strategy, improvement)),
            Finding::NotMember { .. } => None,
        })
    }

    pub fn membership_failure(&self) -> Option<usize> {
        self.info.iter().find_map(|f| match f {
            Finding::NotMember { player, .. } => Some(*player),
            Finding::Deviation { .. } => None,
        })
    }
}

/// Checks membership of every played strategy and stability of every
/// player. `Yes` certifies a `tol`-approximate Nash equilibrium; `No`
/// reports every violating player.
pub fn improve<'a, T: Scalar>(
    game: &GameInstance<T>,
    profile: impl Into<ProfileRef<'a, T>>,
) -> Result<OracleVerdict<T>> {
    let profile = profile.into();
    if let ProfileRef::Mixed(m) = profile {
        m.check_distribution(game.tolerance())?;
    }
    let points = profile.points();
    game.check_points(&points)?;

    let mut info = Vec::new();
    for player in 0..game.num_players() {
        for s in profile.strategies_of(player) {
            if !game.player(player).strategies.is_feasible(s)? {
                info.push(Finding::NotMember {
                    player,
                    strategy: s.clone(),
                });
            }
        }
    }

    let tol = game.tolerance().clone();
    let mut worst = T::zero();
    for player in 0..game.num_players() {
        let current = game.payoff_at(player, &points);
        let br = best_response_at(game, player, &points)?;
        let gain = br.value - current;
        if gain > tol {
            info.push(Finding::Deviation {
                player,
                strategy: br.strategy,
                improvement: gain.clone(),
            });
        }
        worst = worst.max_of(gain);
    }
    let answer = if info.is_empty() {
        Answer::Yes
    } else {
        Answer::No
    };
    Ok(OracleVerdict {
        answer,
        info,
        worst_violation: worst,
    })
}

/// Smallest absolute ε for which `profile` is an ε-equilibrium.
pub fn epsilon_of<'a, T: Scalar>(
    game: &GameInstance<T>,
    profile: impl Into<ProfileRef<'a, T>>,
) -> Result<T> {
    let verdict = improve(game, profile)?;
    match verdict.membership_failure() {
        Some(player) => Err(Error::Membership { player }),
        None => Ok(verdict.worst_violation),
    }
}
