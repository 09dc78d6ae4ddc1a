use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{GameInstance, MixedProfile, ProfileRef, PureProfile};

/// `constant + coeffs · x`: a player's payoff as a function of its own
/// variables once every opponent is fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineForm<T> {
    pub constant: T,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> AffineForm<T> {
    pub fn eval(&self, x: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(x)
            .fold(self.constant.clone(), |acc, (c, v)| {
                acc + c.clone() * v.clone()
            })
    }

    /// Value at a binary point given by the indices of its ones.
    pub fn eval_ones(&self, ones: impl Iterator<Item = usize>) -> T {
        ones.fold(self.constant.clone(), |acc, k| acc + self.coeffs[k].clone())
    }
}

impl<T: Scalar> GameInstance<T> {
    /// Payoff of `player` as an affine function of its own variables, with
    /// each opponent `j` fixed at the (possibly fractional) point `points[j]`.
    /// The entry `points[player]` is ignored.
    pub fn affine_payoff(&self, player: usize, points: &[Vec<T>]) -> AffineForm<T> {
        let spec = &self.player(player).payoff;
        let mut constant = spec.constant.clone();
        for (&j, e) in &spec.opp_linear {
            constant = e
                .iter()
                .zip(&points[j])
                .fold(constant, |acc, (a, v)| acc + a.clone() * v.clone());
        }
        let mut coeffs = spec.own_linear.clone();
        for (&j, q) in &spec.bilinear {
            let y = &points[j];
            for (c, row) in coeffs.iter_mut().zip(q) {
                for (a, v) in row.iter().zip(y) {
                    if !v.is_zero() && !a.is_zero() {
                        *c = c.clone() + a.clone() * v.clone();
                    }
                }
            }
        }
        AffineForm { constant, coeffs }
    }

    /// Payoff of `player` when every player `k` sits at `points[k]`.
    pub fn payoff_at(&self, player: usize, points: &[Vec<T>]) -> T {
        self.affine_payoff(player, points).eval(&points[player])
    }

    pub(crate) fn check_points(&self, points: &[Vec<T>]) -> Result<()> {
        if points.len() != self.num_players() {
            return Err(Error::DimensionMismatch {
                context: "profile players".into(),
                expected: self.num_players(),
                found: points.len(),
            });
        }
        for (k, p) in points.iter().enumerate() {
            if p.len() != self.num_vars(k) {
                return Err(Error::DimensionMismatch {
                    context: format!("player {k} strategy"),
                    expected: self.num_vars(k),
                    found: p.len(),
                });
            }
        }
        Ok(())
    }

    pub fn evaluate_pure(&self, profile: &PureProfile, player: usize) -> Result<T> {
        self.check_player(player)?;
        let points = profile.points::<T>();
        self.check_points(&points)?;
        Ok(self.payoff_at(player, &points))
    }

    /// Expected payoff under independent mixing. Payoffs are at most
    /// bilinear across distinct players, so the expectation equals the
    /// payoff at the players' mean strategies.
    pub fn evaluate_mixed(&self, profile: &MixedProfile<T>, player: usize) -> Result<T> {
        self.check_player(player)?;
        profile.check_distribution(self.tolerance())?;
        let means = profile.means();
        self.check_points(&means)?;
        Ok(self.payoff_at(player, &means))
    }

    pub fn evaluate(&self, profile: ProfileRef<'_, T>, player: usize) -> Result<T> {
        match profile {
            ProfileRef::Pure(p) => self.evaluate_pure(p, player),
            ProfileRef::Mixed(m) => self.evaluate_mixed(m, player),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::knapsack_game;
    use crate::game::Strategy;
    use crate::scalar::{ratio, Rational};

    fn s(bits: &[u8]) -> Strategy {
        Strategy::from_bits(bits)
    }

    #[test]
    fn knapsack_pure_payoffs() {
        let g = knapsack_game::<Rational>();
        let p = PureProfile::new(vec![s(&[0, 1]), s(&[1, 0])]);
        assert_eq!(g.evaluate_pure(&p, 0).unwrap(), ratio(2, 1));
        assert_eq!(g.evaluate_pure(&p, 1).unwrap(), ratio(3, 1));
        let zero = PureProfile::new(vec![s(&[0, 0]), s(&[0, 0])]);
        assert_eq!(g.evaluate_pure(&zero, 0).unwrap(), ratio(0, 1));
        assert_eq!(g.evaluate_pure(&zero, 1).unwrap(), ratio(0, 1));
    }

    #[test]
    fn knapsack_mixed_payoffs() {
        let g = knapsack_game::<Rational>();
        let m = MixedProfile::new(vec![
            vec![(s(&[1, 0]), ratio(2, 9)), (s(&[0, 1]), ratio(7, 9))],
            vec![(s(&[1, 0]), ratio(2, 5)), (s(&[0, 1]), ratio(3, 5))],
        ])
        .unwrap();
        assert_eq!(g.evaluate_mixed(&m, 0).unwrap(), ratio(1, 5));
        assert_eq!(g.evaluate_mixed(&m, 1).unwrap(), ratio(17, 9));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = knapsack_game::<Rational>();
        let bad = PureProfile::new(vec![s(&[0, 1, 0]), s(&[1, 0])]);
        assert!(matches!(
            g.evaluate_pure(&bad, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        let p = PureProfile::new(vec![s(&[0, 1]), s(&[1, 0])]);
        assert!(g.evaluate_pure(&p, 2).is_err());
    }

    #[test]
    fn bad_probability_sum_rejected() {
        let g = knapsack_game::<Rational>();
        let m = MixedProfile::<Rational>::new_unchecked(vec![
            vec![(s(&[1, 0]), ratio(1, 2))],
            vec![(s(&[1, 0]), ratio(1, 1))],
        ]);
        assert!(g.evaluate_mixed(&m, 0).is_err());
    }

    #[test]
    fn float_game_agrees_with_exact() {
        let g = knapsack_game::<Rational>();
        let gf = g.convert::<f64>();
        let p = PureProfile::new(vec![s(&[0, 1]), s(&[1, 0])]);
        assert_eq!(gf.evaluate_pure(&p, 1).unwrap(), 3.0);
    }
}
