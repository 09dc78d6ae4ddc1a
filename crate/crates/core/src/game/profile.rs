use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Strategy;

/// One pure strategy per player.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureProfile {
    pub strategies: Vec<Strategy>,
}

impl PureProfile {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        PureProfile { strategies }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        PureProfile::new(dims.iter().map(|&n| Strategy::zeros(n)).collect())
    }

    /// Splits a joint bit vector into per-player strategies.
    pub fn from_joint(bits: &[u8], dims: &[usize]) -> Self {
        let mut at = 0;
        let strategies = dims
            .iter()
            .map(|&n| {
                let s = Strategy::from_bits(&bits[at..at + n]);
                at += n;
                s
            })
            .collect();
        PureProfile { strategies }
    }

    pub fn points<T: Scalar>(&self) -> Vec<Vec<T>> {
        self.strategies.iter().map(Strategy::to_vector).collect()
    }

    pub fn joint_bits(&self) -> Vec<bool> {
        self.strategies
            .iter()
            .flat_map(|s| s.0.iter().copied())
            .collect()
    }

    pub fn with_strategy(&self, player: usize, s: Strategy) -> Self {
        let mut p = self.clone();
        p.strategies[player] = s;
        p
    }
}

impl fmt::Display for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: Vec<String> = self
            .joint_bits()
            .into_iter()
            .map(|b| u8::from(b).to_string())
            .collect();
        write!(f, "({})", bits.join(","))
    }
}

impl fmt::Debug for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Per-player finite-support distributions over pure strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile<T> {
    players: Vec<Vec<(Strategy, T)>>,
}

impl<T: Scalar> MixedProfile<T> {
    /// Validates nonnegativity, distinct support members, and unit mass
    /// (within the scalar's own zero tolerance).
    pub fn new(players: Vec<Vec<(Strategy, T)>>) -> Result<Self> {
        let m = MixedProfile { players };
        m.check_distribution(&T::zero_tolerance())?;
        Ok(m)
    }

    pub fn new_unchecked(players: Vec<Vec<(Strategy, T)>>) -> Self {
        MixedProfile { players }
    }

    pub fn from_pure(p: &PureProfile) -> Self {
        MixedProfile {
            players: p
                .strategies
                .iter()
                .map(|s| vec![(s.clone(), T::one())])
                .collect(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn support(&self, player: usize) -> &[(Strategy, T)] {
        &self.players[player]
    }

    pub fn supports(&self) -> &[Vec<(Strategy, T)>] {
        &self.players
    }

    pub fn check_distribution(&self, tol: &T) -> Result<()> {
        for (i, support) in self.players.iter().enumerate() {
            if support.is_empty() {
                return Err(Error::InvalidProfile(format!(
                    "player {i} has an empty support"
                )));
            }
            let mut seen = HashSet::new();
            let mut total = T::zero();
            for (s, p) in support {
                if p.is_negative() && p.abs() > *tol {
                    return Err(Error::InvalidProfile(format!(
                        "player {i} assigns negative probability {p} to {s}"
                    )));
                }
                if !seen.insert(s) {
                    return Err(Error::InvalidProfile(format!("player {i} lists {s} twice")));
                }
                if s.len() != support[0].0.len() {
                    return Err(Error::InvalidProfile(format!(
                        "player {i} mixes strategies of different lengths"
                    )));
                }
                total = total + p.clone();
            }
            if (total.clone() - T::one()).abs() > *tol {
                return Err(Error::InvalidProfile(format!(
                    "player {i} probabilities sum to {total}"
                )));
            }
        }
        Ok(())
    }

    /// Probability-weighted mean strategy of every player.
    pub fn means(&self) -> Vec<Vec<T>> {
        self.players
            .iter()
            .map(|support| {
                let n = support.first().map_or(0, |(s, _)| s.len());
                let mut mean = vec![T::zero(); n];
                for (s, p) in support {
                    for k in s.ones() {
                        mean[k] = mean[k].clone() + p.clone();
                    }
                }
                mean
            })
            .collect()
    }

    /// The pure profile when every player has a single support member.
    pub fn as_pure(&self) -> Option<PureProfile> {
        self.players
            .iter()
            .map(|support| match support.as_slice() {
                [(s, _)] => Some(s.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(PureProfile::new)
    }

    /// Drops support members with negligible probability and orders each
    /// support by strategy.
    pub fn canonicalize(&self) -> Self {
        let players = self
            .players
            .iter()
            .map(|support| {
                let mut kept: Vec<(Strategy, T)> = support
                    .iter()
                    .filter(|(_, p)| !p.is_negligible())
                    .cloned()
                    .collect();
                kept.sort_by(|a, b| a.0.cmp(&b.0));
                kept
            })
            .collect();
        MixedProfile { players }
    }

    /// `true` when both profiles have the same supports and every
    /// probability differs by at most `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let a = self.canonicalize();
        let b = other.canonicalize();
        a.players.len() == b.players.len()
            && a.players.iter().zip(&b.players).all(|(x, y)| {
                x.len() == y.len()
                    && x.iter()
                        .zip(y)
                        .all(|((s, p), (t, q))| s == t && (p.to_f64() - q.to_f64()).abs() <= tol)
            })
    }
}

impl<T: Scalar> fmt::Display for MixedProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, support) in self.players.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            let parts: Vec<String> = support.iter().map(|(s, p)| format!("{p} on {s}")).collect();
            write!(f, "{}", parts.join(", "))?;
        }
        Ok(())
    }
}

/// Borrowed pure or mixed profile.
#[derive(Clone, Copy, Debug)]
pub enum ProfileRef<'a, T> {
    Pure(&'a PureProfile),
    Mixed(&'a MixedProfile<T>),
}

impl<'a, T: Scalar> ProfileRef<'a, T> {
    /// Per-player (mean) points.
    pub fn points(&self) -> Vec<Vec<T>> {
        match self {
            ProfileRef::Pure(p) => p.points(),
            ProfileRef::Mixed(m) => m.means(),
        }
    }

    pub fn num_players(&self) -> usize {
        match self {
            ProfileRef::Pure(p) => p.strategies.len(),
            ProfileRef::Mixed(m) => m.num_players(),
        }
    }

    /// Every pure strategy the player may play.
    pub fn strategies_of(&self, player: usize) -> Vec<&'a Strategy> {
        match self {
            ProfileRef::Pure(p) => vec![&p.strategies[player]],
            ProfileRef::Mixed(m) => m.players[player].iter().map(|(s, _)| s).collect(),
        }
    }
}

impl<'a, T> From<&'a PureProfile> for ProfileRef<'a, T> {
    fn from(p: &'a PureProfile) -> Self {
        ProfileRef::Pure(p)
    }
}

impl<'a, T> From<&'a MixedProfile<T>> for ProfileRef<'a, T> {
    fn from(m: &'a MixedProfile<T>) -> Self {
        ProfileRef::Mixed(m)
    }
}
