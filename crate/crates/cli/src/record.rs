//! Solver results as emitted by `solve` and collected by `bench`.

use std::fmt;

use ipgkit::game::{MixedProfile, PureProfile, Strategy};
use ipgkit::Mixed;
use serde::{Deserialize, Serialize};

use crate::io::Num;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Status {
    /// Certified equilibrium (sgm; pure or mixed).
    Eq,
    /// Certified pure equilibrium optimal for the selection (zeror).
    PureEq,
    NoPureEq,
    TimeLimit,
    IterLimit,
    /// Optimal defender-first solution of the sequential CNG (mcnp). Not an
    /// equilibrium of the simultaneous game in general.
    Bilevel,
    /// The run failed; only produced by `bench`.
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Eq => "eq",
            Status::PureEq => "pureEq",
            Status::NoPureEq => "noPureEq",
            Status::TimeLimit => "timeLimit",
            Status::IterLimit => "iterLimit",
            Status::Bilevel => "bilevel",
            Status::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Status::Eq,
            Status::PureEq,
            Status::NoPureEq,
            Status::TimeLimit,
            Status::IterLimit,
            Status::Bilevel,
            Status::Error,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
    }

    pub fn is_equilibrium(self) -> bool {
        matches!(self, Status::Eq | Status::PureEq)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub strategy: Vec<u8>,
    pub probability: Num,
}

/// `{"pure": [[0,1],[1,0]]}` or `{"mixed": [[{strategy, probability}, ..], ..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Payload {
    Pure(Vec<Vec<u8>>),
    Mixed(Vec<Vec<SupportEntry>>),
}

fn bits(s: &Strategy) -> Vec<u8> {
    s.bits().iter().map(|&b| u8::from(b)).collect()
}

impl Payload {
    pub fn pure(p: &PureProfile) -> Self {
        Payload::Pure(p.strategies.iter().map(bits).collect())
    }

    pub fn mixed(p: &Mixed) -> Self {
        Payload::Mixed(
            p.supports()
                .iter()
                .map(|support| {
                    support
                        .iter()
                        .map(|(s, prob)| SupportEntry {
                            strategy: bits(s),
                            probability: Num(prob.clone()),
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn as_pure(&self) -> Option<PureProfile> {
        match self {
            Payload::Pure(v) => Some(PureProfile::new(
                v.iter().map(|b| Strategy::from_bits(b)).collect(),
            )),
            Payload::Mixed(_) => self.to_mixed().ok()?.as_pure(),
        }
    }

    pub fn to_mixed(&self) -> ipgkit::Result<Mixed> {
        match self {
            Payload::Pure(_) => Ok(MixedProfile::from_pure(
                &self.as_pure().expect("pure payload"),
            )),
            Payload::Mixed(players) => MixedProfile::new(
                players
                    .iter()
                    .map(|support| {
                        support
                            .iter()
                            .map(|e| (Strategy::from_bits(&e.strategy), e.probability.0.clone()))
                            .collect()
                    })
                    .collect(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ResultRecord {
    pub instance: String,
    pub algo: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<Payload>,
    /// Largest unilateral gain at the payload profile.
    pub epsilon: Option<Num>,
    pub wall_time: f64,
    /// Absent for mcnp, which is not iterative.
    pub iterations: Option<usize>,
    /// Selection value (zeror) or leader value (mcnp).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Num>,
    /// Price of stability; CNG instances only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn failed(instance: &str, algo: &str, wall_time: f64, message: String) -> Self {
        ResultRecord {
            instance: instance.to_string(),
            algo: algo.to_string(),
            status: Status::Error,
            equilibrium: None,
            epsilon: None,
            wall_time,
            iterations: None,
            objective: None,
            pos: None,
            error: Some(message),
        }
    }

    /// Status and payload agree: solutions carry one, failures and
    /// infeasibility proofs do not; limits may go either way.
    pub fn is_consistent(&self) -> bool {
        match self.status {
            Status::PureEq => matches!(self.equilibrium, Some(Payload::Pure(_))),
            Status::Eq | Status::Bilevel => self.equilibrium.is_some(),
            Status::NoPureEq | Status::Error => self.equilibrium.is_none(),
            Status::TimeLimit | Status::IterLimit => true,
        }
    }

    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        }
        .expect("record serializes")
    }

    /// Two-column text rendering for people.
    pub fn table(&self) -> String {
        let f = |n: &Option<Num>| {
            n.as_ref()
                .map_or("-".to_string(), |n| ipgkit::scalar::format_rational(&n.0))
        };
        let mut rows = vec![
            ("instance", self.instance.clone()),
            ("algorithm", self.algo.clone()),
            ("status", self.status.to_string()),
            ("epsilon", f(&self.epsilon)),
            ("time (s)", format!("{:.3}", self.wall_time)),
            (
                "iterations",
                self.iterations.map_or("-".into(), |k| k.to_string()),
            ),
            ("objective", f(&self.objective)),
            ("PoS", f(&self.pos)),
        ];
        if let Some(e) = &self.error {
            rows.push(("error", e.clone()));
        }
        match &self.equilibrium {
            Some(Payload::Pure(v)) => {
                for (i, b) in v.iter().enumerate() {
                    rows.push(("", format!("player {}: {}", i + 1, render(b))));
                }
            }
            Some(Payload::Mixed(v)) => {
                for (i, support) in v.iter().enumerate() {
                    let terms: Vec<String> = support
                        .iter()
                        .map(|e| {
                            format!(
                                "{} @ {}",
                                render(&e.strategy),
                                ipgkit::scalar::format_rational(&e.probability.0)
                            )
                        })
                        .collect();
                    rows.push(("", format!("player {}: {}", i + 1, terms.join(", "))));
                }
            }
            None => {}
        }
        rows.iter().map(|(k, v)| format!("{k:<12}{v}\n")).collect()
    }
}

fn render(b: &[u8]) -> String {
    b.iter().map(|x| x.to_string()).collect()
}
