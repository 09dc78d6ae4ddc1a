//! Game data model: binary strategy polytopes, bilinear-separable payoffs,
//! and pure/mixed strategy profiles.

mod binarize;
mod payoff;
mod profile;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::{default_tolerance, Scalar};

pub use binarize::{binarize_bounded_integer, BinaryEncoding};
pub use payoff::AffineForm;
pub use profile::{MixedProfile, ProfileRef, PureProfile};

/// Largest number of binary variables for which a strategy set is
/// enumerated point by point.
pub const MAX_ENUMERATED_VARS: usize = 24;

/// A pure strategy: one binary vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy(pub Vec<bool>);

impl Strategy {
    pub fn zeros(n: usize) -> Self {
        Strategy(vec![false; n])
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Strategy(bits.iter().map(|&b| b != 0).collect())
    }

    /// Strategy whose bit `k` is bit `k` of `code`.
    pub fn from_code(code: u64, n: usize) -> Self {
        Strategy((0..n).map(|k| code >> k & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn to_vector<T: Scalar>(&self) -> Vec<T> {
        self.0
            .iter()
            .map(|&b| if b { T::one() } else { T::zero() })
            .collect()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| k)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, &b) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(b))?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    pub fn holds<T: Scalar>(self, lhs: &T, rhs: &T) -> bool {
        let tol = T::zero_tolerance();
        match self {
            Sense::Le => lhs.clone() - rhs.clone() <= tol,
            Sense::Ge => rhs.clone() - lhs.clone() <= tol,
            Sense::Eq => (lhs.clone() - rhs.clone()).abs() <= tol,
        }
    }
}

/// `coeffs · x (sense) rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<T>,
    pub sense: Sense,
    pub rhs: T,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn new(coeffs: Vec<T>, sense: Sense, rhs: T) -> Self {
        LinearConstraint { coeffs, sense, rhs }
    }

    pub fn activity(&self, x: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, v)| acc + a.clone() * v.clone())
    }

    pub fn is_satisfied(&self, x: &[T]) -> bool {
        self.sense.holds(&self.activity(x), &self.rhs)
    }

    pub fn is_satisfied_by(&self, s: &Strategy) -> bool {
        let lhs = s
            .ones()
            .fold(T::zero(), |acc, k| acc + self.coeffs[k].clone());
        self.sense.holds(&lhs, &self.rhs)
    }
}

/// Binary 0-1 knapsack view of a strategy set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackShape {
    pub weights: Vec<u64>,
    pub capacity: u64,
}

/// Feasible region `{x ∈ {0,1}^n : constraints}` of one player.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySet<T> {
    num_vars: usize,
    constraints: Vec<LinearConstraint<T>>,
}

impl<T: Scalar> StrategySet<T> {
    pub fn new(num_vars: usize, constraints: Vec<LinearConstraint<T>>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidGame(
                "a strategy set needs at least one variable".into(),
            ));
        }
        for c in &constraints {
            if c.coeffs.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    context: "constraint coefficients".into(),
                    expected: num_vars,
                    found: c.coeffs.len(),
                });
            }
        }
        Ok(StrategySet {
            num_vars,
            constraints,
        })
    }

    /// Single knapsack constraint `weights · x <= capacity`.
    pub fn knapsack(weights: &[i64], capacity: i64) -> Result<Self> {
        Self::new(
            weights.len(),
            vec![LinearConstraint::new(
                weights.iter().map(|&w| crate::scalar::int(w)).collect(),
                Sense::Le,
                crate::scalar::int(capacity),
            )],
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[LinearConstraint<T>] {
        &self.constraints
    }

    pub fn is_feasible(&self, x: &Strategy) -> Result<bool> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                context: "strategy".into(),
                expected: self.num_vars,
                found: x.len(),
            });
        }
        Ok(self.constraints.iter().all(|c| c.is_satisfied_by(x)))
    }

    /// All feasible binary points, in increasing binary code order
    /// (bit `k` of the code is variable `k`).
    pub fn feasible_points(&self) -> Result<Vec<Strategy>> {
        if self.num_vars > MAX_ENUMERATED_VARS {
            return Err(Error::EnumerationCap {
                size: self.num_vars,
                cap: MAX_ENUMERATED_VARS,
            });
        }
        Ok((0..1u64 << self.num_vars)
            .map(|code| Strategy::from_code(code, self.num_vars))
            .filter(|s| self.constraints.iter().all(|c| c.is_satisfied_by(s)))
            .collect())
    }

    /// Returns the knapsack shape when the set is described by at most one
    /// `<=` constraint with nonnegative integral weights and a nonnegative
    /// right-hand side.
    pub fn as_knapsack(&self) -> Option<KnapsackShape> {
        match self.constraints.as_slice() {
            [] => Some(KnapsackShape {
                weights: vec![0; self.num_vars],
                capacity: 0,
            }),
            [c] if c.sense == Sense::Le && !c.rhs.is_negative() => {
                let mut weights = Vec::with_capacity(self.num_vars);
                for w in &c.coeffs {
                    let r = w.to_rational();
                    if r.is_negative() || !r.is_integer() {
                        return None;
                    }
                    weights.push(r.to_integer().to_u64()?);
                }
                let capacity = c.rhs.to_rational().floor().to_integer().to_u64()?;
                Some(KnapsackShape { weights, capacity })
            }
            _ => None,
        }
    }
}

/// `f(x; x⁻) = constant + own·x + Σ_j opp[j]·x^j + Σ_j xᵀ bilinear[j] x^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffSpec<T> {
    pub constant: T,
    pub own_linear: Vec<T>,
    pub opp_linear: BTreeMap<usize, Vec<T>>,
    /// Row `k` holds the coefficients multiplying own variable `k`.
    pub bilinear: BTreeMap<usize, Vec<Vec<T>>>,
}

impl<T: Scalar> PayoffSpec<T> {
    pub fn linear(constant: T, own_linear: Vec<T>) -> Self {
        PayoffSpec {
            constant,
            own_linear,
            opp_linear: BTreeMap::new(),
            bilinear: BTreeMap::new(),
        }
    }

    pub fn with_opp_linear(mut self, opponent: usize, coeffs: Vec<T>) -> Self {
        self.opp_linear.insert(opponent, coeffs);
        self
    }

    pub fn with_bilinear(mut self, opponent: usize, matrix: Vec<Vec<T>>) -> Self {
        self.bilinear.insert(opponent, matrix);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Player<T> {
    pub strategies: StrategySet<T>,
    pub payoff: PayoffSpec<T>,
}

/// Simultaneous game among `n ≥ 2` players, each maximizing its payoff
/// over its own binary strategy set.
#[derive(Clone, Debug, PartialEq)]
pub struct GameInstance<T> {
    name: String,
    players: Vec<Player<T>>,
    tol: T,
}

impl<T: Scalar> GameInstance<T> {
    pub fn new(name: impl Into<String>, players: Vec<Player<T>>) -> Result<Self> {
        Self::with_tolerance(name, players, default_tolerance())
    }

    pub fn with_tolerance(
        name: impl Into<String>,
        players: Vec<Player<T>>,
        tol: T,
    ) -> Result<Self> {
        if players.len() < 2 {
            return Err(Error::InvalidGame(format!(
                "a game needs at least two players, got {}",
                players.len()
            )));
        }
        if tol.is_negative() {
            return Err(Error::InvalidGame("tolerance must be nonnegative".into()));
        }
        let dims: Vec<usize> = players.iter().map(|p| p.strategies.num_vars()).collect();
        for (i, p) in players.iter().enumerate() {
            let spec = &p.payoff;
            check_len(
                format!("player {i} own linear"),
                dims[i],
                spec.own_linear.len(),
            )?;
            for (&j, v) in &spec.opp_linear {
                check_opponent(i, j, dims.len())?;
                check_len(format!("player {i} opp linear[{j}]"), dims[j], v.len())?;
            }
            for (&j, m) in &spec.bilinear {
                check_opponent(i, j, dims.len())?;
                check_len(format!("player {i} bilinear[{j}] rows"), dims[i], m.len())?;
                for row in m {
                    check_len(format!("player {i} bilinear[{j}] cols"), dims[j], row.len())?;
                }
            }
        }
        Ok(GameInstance {
            name: name.into(),
            players,
            tol,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tolerance(&self) -> &T {
        &self.tol
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[Player<T>] {
        &self.players
    }

    pub fn player(&self, i: usize) -> &Player<T> {
        &self.players[i]
    }

    pub fn num_vars(&self, i: usize) -> usize {
        self.players[i].strategies.num_vars()
    }

    pub fn total_vars(&self) -> usize {
        self.players.iter().map(|p| p.strategies.num_vars()).sum()
    }

    pub(crate) fn check_player(&self, i: usize) -> Result<()> {
        if i >= self.players.len() {
            return Err(Error::InvalidProfile(format!(
                "player index {i} out of range for {} players",
                self.players.len()
            )));
        }
        Ok(())
    }

    /// Converts every coefficient to another scalar type.
    pub fn convert<U: Scalar>(&self) -> GameInstance<U> {
        let cv = |v: &T| U::from_rational(&v.to_rational());
        let cvec = |v: &[T]| v.iter().map(cv).collect::<Vec<U>>();
        let players = self
            .players
            .iter()
            .map(|p| Player {
                strategies: StrategySet {
                    num_vars: p.strategies.num_vars,
                    constraints: p
                        .strategies
                        .constraints
                        .iter()
                        .map(|c| LinearConstraint::new(cvec(&c.coeffs), c.sense, cv(&c.rhs)))
                        .collect(),
                },
                payoff: PayoffSpec {
                    constant: cv(&p.payoff.constant),
                    own_linear: cvec(&p.payoff.own_linear),
                    opp_linear: p
                        .payoff
                        .opp_linear
                        .iter()
                        .map(|(&j, v)| (j, cvec(v)))
                        .collect(),
                    bilinear: p
                        .payoff
                        .bilinear
                        .iter()
                        .map(|(&j, m)| (j, m.iter().map(|r| cvec(r)).collect()))
                        .collect(),
                },
            })
            .collect();
        GameInstance {
            name: self.name.clone(),
            players,
            tol: cv(&self.tol),
        }
    }

    /// Copy of the game with every opponent-only linear term removed.
    pub fn without_opp_linear(&self) -> Self {
        let mut g = self.clone();
        for p in &mut g.players {
            p.payoff.opp_linear.clear();
        }
        g
    }
}

fn check_len(context: String, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

fn check_opponent(i: usize, j: usize, n: usize) -> Result<()> {
    if j == i || j >= n {
        return Err(Error::InvalidGame(format!(
            "player {i} payoff references invalid opponent {j}"
        )));
    }
    Ok(())
}
