//! Equilibrium computation for integer programming games with binary
//! strategy sets and bilinear-separable payoffs.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix the
//! exact rational instantiation used by the solvers and the CLI.

pub mod catalog;
pub mod cng;
pub mod error;
pub mod game;
pub mod kernel;
pub mod limits;
pub mod oracle;
pub mod scalar;
pub mod sgm;
pub mod support;
pub mod verify;
pub mod zero_regrets;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Exact-rational game.
pub type Game = game::GameInstance<Rational>;
/// Floating point game.
pub type GameF64 = game::GameInstance<f64>;
pub type Mixed = game::MixedProfile<Rational>;
