use thiserror::Error;

use crate::game::Strategy;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("player {player} has an empty strategy set")]
    EmptyStrategySet { player: usize },

    #[error("strategy {strategy} is infeasible for player {player}")]
    InfeasibleStrategy { player: usize, strategy: Strategy },

    #[error("invalid integer range [{lower}, {upper}]")]
    InvalidRange { lower: i64, upper: i64 },

    #[error("simplex stalled after {iterations} pivots")]
    LpStall { iterations: usize },

    #[error("LP reported unbounded on a problem with finite bounds")]
    LpUnbounded,

    #[error("branch-and-bound node limit of {limit} reached")]
    NodeLimit {
        limit: usize,
        incumbent: Option<Vec<f64>>,
    },

    #[error("knapsack table of {cells} cells exceeds the cap of {cap}")]
    KnapsackCap { cells: u128, cap: u128 },

    #[error("enumeration size {size} exceeds the cap of {cap}")]
    EnumerationCap { size: usize, cap: usize },

    #[error("{0} requires exactly two players")]
    TwoPlayersOnly(&'static str),

    #[error("epsilon is undefined: profile fails membership for player {player}")]
    Membership { player: usize },

    #[error("invalid CNG instance: {0}")]
    InvalidCng(String),

    #[error("price of stability undefined: denominator {0} is not positive")]
    NonPositiveDenominator(String),

    #[error("internal solver invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
