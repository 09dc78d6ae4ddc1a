//! Instance files: JSON with exact rationals.
//!
//! Rationals are written as `"p/q"` strings and read from strings or plain
//! JSON numbers. Opponent keys in `oppLinear` / `bilinear` are 0-based
//! player indices.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ipgkit::cng::CngInstance;
use ipgkit::game::{LinearConstraint, PayoffSpec, Player, Sense, StrategySet};
use ipgkit::scalar::{default_tolerance, format_rational, parse_rational};
use ipgkit::{Game, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] ipgkit::Error),
}

/// A rational that serializes as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq)]
pub struct Num(pub Rational);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"p/q\" string or a number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                parse_rational(v)
                    .map(Num)
                    .ok_or_else(|| E::custom(format!("not a rational: {v:?}")))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(Rational::from_integer(v.into())))
            }
            // Read through the shortest decimal rendering, so 0.1 is 1/10.
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                self.visit_str(&v.to_string())
            }
        }
        d.deserialize_any(V)
    }
}

fn nums(v: &[Rational]) -> Vec<Num> {
    v.iter().cloned().map(Num).collect()
}

fn rats(v: &[Num]) -> Vec<Rational> {
    v.iter().map(|n| n.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct InstanceFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<Num>,
    pub players: Vec<PlayerFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cng: Option<CngFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct PlayerFile {
    pub num_vars: usize,
    pub constraints: Vec<ConstraintFile>,
    pub payoff: PayoffFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFile {
    pub coeffs: Vec<Num>,
    pub sense: String,
    pub rhs: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct PayoffFile {
    pub constant: Num,
    pub own_linear: Vec<Num>,
    #[serde(default)]
    pub opp_linear: BTreeMap<usize, Vec<Num>>,
    #[serde(default)]
    pub bilinear: BTreeMap<usize, Vec<Vec<Num>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CngFile {
    pub resources: usize,
    pub pd: Vec<Num>,
    pub pa: Vec<Num>,
    pub d: Vec<u64>,
    pub a: Vec<u64>,
    #[serde(rename = "D")]
    pub defender_budget: u64,
    #[serde(rename = "A")]
    pub attacker_budget: u64,
    pub delta: Num,
    pub eta: Num,
    pub epsilon: Num,
    pub gamma: Num,
}

impl From<&CngInstance> for CngFile {
    fn from(c: &CngInstance) -> Self {
        CngFile {
            resources: c.resources(),
            pd: nums(&c.pd),
            pa: nums(&c.pa),
            d: c.d.clone(),
            a: c.a.clone(),
            defender_budget: c.defender_budget,
            attacker_budget: c.attacker_budget,
            delta: Num(c.delta.clone()),
            eta: Num(c.eta.clone()),
            epsilon: Num(c.epsilon.clone()),
            gamma: Num(c.gamma.clone()),
        }
    }
}

impl CngFile {
    pub fn to_instance(&self) -> Result<CngInstance, IoError> {
        let c = CngInstance {
            pd: rats(&self.pd),
            pa: rats(&self.pa),
            d: self.d.clone(),
            a: self.a.clone(),
            defender_budget: self.defender_budget,
            attacker_budget: self.attacker_budget,
            delta: self.delta.0.clone(),
            eta: self.eta.0.clone(),
            epsilon: self.epsilon.0.clone(),
            gamma: self.gamma.0.clone(),
        };
        if c.resources() != self.resources {
            return Err(IoError::Invalid(format!(
                "cng.resources is {} but pd has {} entries",
                self.resources,
                c.resources()
            )));
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_sense(s: &str) -> Result<Sense, IoError> {
    match s {
        "<=" => Ok(Sense::Le),
        ">=" => Ok(Sense::Ge),
        "=" | "==" => Ok(Sense::Eq),
        _ => Err(IoError::Invalid(format!("unknown constraint sense {s:?}"))),
    }
}

/// A parsed instance: the game plus its CNG parameters when present.
#[derive(Clone, Debug)]
pub struct Instance {
    pub game: Game,
    pub cng: Option<CngInstance>,
}

impl Instance {
    pub fn size(&self) -> usize {
        match &self.cng {
            Some(c) => c.resources(),
            None => self.game.total_vars(),
        }
    }
}

impl InstanceFile {
    pub fn from_game(game: &Game, cng: Option<&CngInstance>) -> Self {
        let tol = game.tolerance();
        InstanceFile {
            name: game.name().to_string(),
            tol: (*tol != default_tolerance::<Rational>()).then(|| Num(tol.clone())),
            players: game
                .players()
                .iter()
                .map(|p| PlayerFile {
                    num_vars: p.strategies.num_vars(),
                    constraints: p
                        .strategies
                        .constraints()
                        .iter()
                        .map(|c| ConstraintFile {
                            coeffs: nums(&c.coeffs),
                            sense: c.sense.symbol().to_string(),
                            rhs: Num(c.rhs.clone()),
                        })
                        .collect(),
                    payoff: PayoffFile {
                        constant: Num(p.payoff.constant.clone()),
                        own_linear: nums(&p.payoff.own_linear),
                        opp_linear: p
                            .payoff
                            .opp_linear
                            .iter()
                            .map(|(&j, v)| (j, nums(v)))
                            .collect(),
                        bilinear: p
                            .payoff
                            .bilinear
                            .iter()
                            .map(|(&j, m)| (j, m.iter().map(|row| nums(row)).collect()))
                            .collect(),
                    },
                })
                .collect(),
            cng: cng.map(CngFile::from),
        }
    }

    pub fn from_cng(c: &CngInstance, name: &str) -> Result<Self, IoError> {
        Ok(Self::from_game(&c.to_game(name)?, Some(c)))
    }

    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Pretty JSON with a trailing newline; deterministic for equal input.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn to_game(&self) -> Result<Game, IoError> {
        let players = self
            .players
            .iter()
            .map(|p| {
                let constraints = p
                    .constraints
                    .iter()
                    .map(|c| {
                        Ok(LinearConstraint::new(
                            rats(&c.coeffs),
                            parse_sense(&c.sense)?,
                            c.rhs.0.clone(),
                        ))
                    })
                    .collect::<Result<Vec<_>, IoError>>()?;
                Ok(Player {
                    strategies: StrategySet::new(p.num_vars, constraints)?,
                    payoff: PayoffSpec {
                        constant: p.payoff.constant.0.clone(),
                        own_linear: rats(&p.payoff.own_linear),
                        opp_linear: p
                            .payoff
                            .opp_linear
                            .iter()
                            .map(|(&j, v)| (j, rats(v)))
                            .collect(),
                        bilinear: p
                            .payoff
                            .bilinear
                            .iter()
                            .map(|(&j, m)| (j, m.iter().map(|row| rats(row)).collect()))
                            .collect(),
                    },
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let tol = self
            .tol
            .as_ref()
            .map_or_else(default_tolerance, |t| t.0.clone());
        Ok(Game::with_tolerance(self.name.clone(), players, tol)?)
    }

    /// Game and CNG parameters; a `cng` section must expand to exactly the
    /// listed players.
    pub fn to_instance(&self) -> Result<Instance, IoError> {
        let game = self.to_game()?;
        let cng = match &self.cng {
            Some(section) => {
                let c = section.to_instance()?;
                let expanded = c.to_game::<Rational>(self.name.clone())?;
                if expanded.players() != game.players() {
                    return Err(IoError::Invalid(
                        "cng section does not match the players".into(),
                    ));
                }
                Some(c)
            }
            None => None,
        };
        Ok(Instance { game, cng })
    }
}

pub fn read_instance(path: &Path) -> Result<Instance, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    InstanceFile::parse(&text)?.to_instance()
}

pub fn write_instance(path: &Path, file: &InstanceFile) -> Result<(), IoError> {
    fs::write(path, file.emit()).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}
