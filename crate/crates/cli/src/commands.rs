use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use ipgkit::cng::{
    best_defender_outcome, generate_instances, price_of_stability_of, solve_mcnp, CngInstance,
    GeneratorProfile, TieBreak,
};
use ipgkit::game::PureProfile;
use ipgkit::limits::Limits;
use ipgkit::oracle::epsilon_of;
use ipgkit::scalar::ratio;
use ipgkit::sgm::{solve_sgm, SgmOutcome};
use ipgkit::zero_regrets::{solve_zero_regrets, SelectionFunction, ZeroRegretsOutcome};
use ipgkit::{Mixed, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{read_instance, write_instance, Instance, InstanceFile, IoError, Num};
use crate::record::{Payload, ResultRecord, Status};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    /// Bad flags or input files; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The solver or the file system failed; exit code 3.
    #[error("{0}")]
    Failure(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 2,
            CommandError::Failure(_) => 3,
        }
    }
}

impl From<ipgkit::Error> for CommandError {
    fn from(e: ipgkit::Error) -> Self {
        CommandError::Failure(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Sgm,
    Zeror,
    Mcnp,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Sgm => "sgm",
            Algo::Zeror => "zeror",
            Algo::Mcnp => "mcnp",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sgm" => Ok(Algo::Sgm),
            "zeror" => Ok(Algo::Zeror),
            "mcnp" => Ok(Algo::Mcnp),
            _ => Err(format!(
                "unknown algorithm {s:?} (expected sgm, zeror or mcnp)"
            )),
        }
    }
}

/// `welfare` or `player:i` with `i` counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Welfare,
    /// 0-based internally.
    Player(usize),
}

impl FromStr for Selection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "welfare" {
            return Ok(Selection::Welfare);
        }
        match s.strip_prefix("player:").map(str::parse::<usize>) {
            Some(Ok(i)) if i >= 1 => Ok(Selection::Player(i - 1)),
            _ => Err(format!(
                "bad selection {s:?} (expected welfare or player:i with i >= 1)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub selection: Selection,
    pub time_limit: Option<Duration>,
    pub max_iter: usize,
    pub tie_break: TieBreak,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            selection: Selection::Welfare,
            time_limit: None,
            max_iter: Limits::default().max_iterations,
            tie_break: TieBreak::Optimistic,
        }
    }
}

impl SolveOptions {
    fn limits(&self) -> Limits {
        let l = Limits::iterations(self.max_iter);
        match self.time_limit {
            Some(t) => l.with_time_limit(t),
            None => l,
        }
    }
}

struct Outcome {
    status: Status,
    profile: Option<Mixed>,
    epsilon: Option<Rational>,
    iterations: Option<usize>,
    objective: Option<Rational>,
}

fn run(inst: &Instance, algo: Algo, opts: &SolveOptions) -> Result<Outcome, CommandError> {
    let game = &inst.game;
    let pure_eps = |p: &PureProfile| epsilon_of(game, p);
    Ok(match algo {
        Algo::Sgm => {
            let run = solve_sgm(game, opts.limits())?;
            let iterations = Some(run.outcome.iterations());
            let (status, epsilon) = match &run.outcome {
                SgmOutcome::Equilibrium { profile, .. } => (Status::Eq, epsilon_of(game, profile)?),
                SgmOutcome::IterationLimit { epsilon, .. } => (Status::IterLimit, epsilon.clone()),
                SgmOutcome::TimeLimit { epsilon, .. } => (Status::TimeLimit, epsilon.clone()),
            };
            Outcome {
                status,
                profile: Some(run.outcome.profile().clone()),
                epsilon: Some(epsilon),
                iterations,
                objective: None,
            }
        }
        Algo::Zeror => {
            let h = match opts.selection {
                Selection::Welfare => SelectionFunction::Welfare,
                Selection::Player(i) if i < game.num_players() => {
                    SelectionFunction::PlayerPayoff(i)
                }
                Selection::Player(i) => {
                    return Err(CommandError::Usage(format!(
                        "selection player:{} but the game has {} players",
                        i + 1,
                        game.num_players()
                    )))
                }
            };
            let report = solve_zero_regrets(game, &h, opts.limits(), true)?;
            let limit = |status, best: Option<(PureProfile, Rational)>, iterations| Outcome {
                status,
                epsilon: best.as_ref().map(|(_, e)| e.clone()),
                profile: best.map(|(p, _)| Mixed::from_pure(&p)),
                iterations: Some(iterations),
                objective: None,
            };
            match report.outcome {
                ZeroRegretsOutcome::OptimalPureNe {
                    profile,
                    h_value,
                    iterations,
                } => Outcome {
                    status: Status::PureEq,
                    epsilon: Some(pure_eps(&profile)?),
                    profile: Some(Mixed::from_pure(&profile)),
                    iterations: Some(iterations),
                    objective: Some(h_value),
                },
                ZeroRegretsOutcome::NoPureNe { iterations } => Outcome {
                    status: Status::NoPureEq,
                    profile: None,
                    epsilon: None,
                    iterations: Some(iterations),
                    objective: None,
                },
                ZeroRegretsOutcome::IterationLimit { best, iterations } => {
                    limit(Status::IterLimit, best, iterations)
                }
                ZeroRegretsOutcome::TimeLimit { best, iterations } => {
                    limit(Status::TimeLimit, best, iterations)
                }
            }
        }
        Algo::Mcnp => {
            let c = inst
                .cng
                .as_ref()
                .ok_or_else(|| CommandError::Usage("mcnp requires cng section".into()))?;
            let sol = solve_mcnp(c, opts.tie_break)?;
            let profile = PureProfile::new(vec![sol.defender, sol.attacker]);
            Outcome {
                status: Status::Bilevel,
                epsilon: Some(pure_eps(&profile)?),
                profile: Some(Mixed::from_pure(&profile)),
                iterations: None,
                objective: Some(sol.leader_value),
            }
        }
    })
}

/// Best joint defender payoff over the expected defender payoff at the
/// profile; `None` when that denominator is not positive.
fn price_of_stability(
    c: &CngInstance,
    inst: &Instance,
    profile: &Mixed,
) -> Result<Option<Rational>, CommandError> {
    if let Some(p) = profile.as_pure() {
        return match price_of_stability_of(c, &p) {
            Ok(r) => Ok(Some(r)),
            Err(ipgkit::Error::NonPositiveDenominator(_)) => Ok(None),
            Err(e) => Err(e.into()),
        };
    }
    let expected = inst.game.evaluate_mixed(profile, 0)?;
    if expected <= ratio(0, 1) {
        return Ok(None);
    }
    Ok(Some(best_defender_outcome(c)? / expected))
}

pub fn solve(
    inst: &Instance,
    algo: Algo,
    opts: &SolveOptions,
) -> Result<ResultRecord, CommandError> {
    let start = Instant::now();
    let out = run(inst, algo, opts)?;
    let wall_time = start.elapsed().as_secs_f64();
    let pos = match (&inst.cng, &out.profile) {
        (Some(c), Some(p)) => price_of_stability(c, inst, p)?,
        _ => None,
    };
    let equilibrium = out
        .profile
        .as_ref()
        .map(|p| match (out.status, p.as_pure()) {
            (Status::Eq, _) | (_, None) => Payload::mixed(p),
            (_, Some(pure)) => Payload::pure(&pure),
        });
    Ok(ResultRecord {
        instance: inst.game.name().to_string(),
        algo: algo.to_string(),
        status: out.status,
        equilibrium,
        epsilon: out.epsilon.map(Num),
        wall_time,
        iterations: out.iterations,
        objective: out.objective.map(Num),
        pos: pos.map(Num),
        error: None,
    })
}

pub fn load(path: &Path) -> Result<Instance, CommandError> {
    read_instance(path).map_err(|e| CommandError::Usage(e.to_string()))
}

pub fn cng_file_name(size: usize, seed: u64, index: usize) -> String {
    format!("cng_{size}_{seed}_{index}")
}

/// Writes `cng_{size}_{seed}_{index}.json` for `index < count`.
pub fn gen_cng(
    size: usize,
    count: usize,
    seed: u64,
    out: &Path,
) -> Result<Vec<PathBuf>, CommandError> {
    let failure = |e: IoError| CommandError::Failure(e.to_string());
    fs::create_dir_all(out)
        .map_err(|e| CommandError::Failure(format!("{}: {e}", out.display())))?;
    let instances = generate_instances(size, count, seed, &GeneratorProfile::default())?;
    instances
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let name = cng_file_name(size, seed, index);
            let path = out.join(format!("{name}.json"));
            write_instance(&path, &InstanceFile::from_cng(c, &name).map_err(failure)?)
                .map_err(failure)?;
            Ok(path)
        })
        .collect()
}

pub const CSV_HEADER: [&str; 7] = [
    "instance",
    "algo",
    "status",
    "epsilon",
    "time_s",
    "iterations",
    "pos",
];

/// One CSV row. `epsilon` and `pos` are decimal renderings of the exact
/// values; `pos` is empty for non-CNG instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub algo: String,
    pub status: String,
    pub epsilon: Option<f64>,
    pub time_s: f64,
    pub iterations: Option<usize>,
    pub pos: Option<f64>,
}

impl From<&ResultRecord> for BenchRow {
    fn from(r: &ResultRecord) -> Self {
        let f = |n: &Option<Num>| n.as_ref().map(|n| ipgkit::Scalar::to_f64(&n.0));
        BenchRow {
            instance: r.instance.clone(),
            algo: r.algo.clone(),
            status: r.status.to_string(),
            epsilon: f(&r.epsilon),
            time_s: r.wall_time,
            iterations: r.iterations,
            pos: f(&r.pos),
        }
    }
}

/// Aggregates of one `(size, algo)` group. Means run over the rows that
/// have the value; `None` when none do.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub size: usize,
    pub algo: String,
    pub instances: usize,
    pub eq: usize,
    pub pure_eq: usize,
    pub time_limits: usize,
    pub errors: usize,
    pub mean_time_s: f64,
    pub mean_iterations: Option<f64>,
    pub mean_pos: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, sum) = values.fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    (n > 0).then(|| sum / n as f64)
}

/// Groups rows by the size of their instance (`sizes[instance]`) and algorithm.
pub fn summarize(rows: &[BenchRow], sizes: &BTreeMap<String, usize>) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, &str), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        let size = sizes.get(&r.instance).copied().unwrap_or(0);
        groups.entry((size, &r.algo)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((size, algo), rs)| {
            let count = |st: Status| rs.iter().filter(|r| r.status == st.as_str()).count();
            SummaryRow {
                size,
                algo: algo.to_string(),
                instances: rs.len(),
                eq: count(Status::Eq) + count(Status::PureEq),
                pure_eq: count(Status::PureEq),
                time_limits: count(Status::TimeLimit),
                errors: count(Status::Error),
                mean_time_s: mean(rs.iter().map(|r| r.time_s)).unwrap_or(0.0),
                mean_iterations: mean(rs.iter().filter_map(|r| r.iterations.map(|k| k as f64))),
                mean_pos: mean(rs.iter().filter_map(|r| r.pos)),
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub records: Vec<ResultRecord>,
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
    pub summary_path: PathBuf,
}

/// `results.csv` → `results.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or("bench".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn threads() -> Option<usize> {
    std::env::var("IPGKIT_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs every algorithm on every `*.json` file of `dir` (sorted by file
/// name), writes one CSV row per pair to `out` and the per-(size, algo)
/// aggregates to the summary file next to it. Failures become rows.
pub fn bench(
    dir: &Path,
    algos: &[Algo],
    time_limit: Duration,
    out: &Path,
) -> Result<BenchReport, CommandError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CommandError::Usage(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();

    let jobs: Vec<(usize, Algo)> = (0..files.len())
        .flat_map(|f| algos.iter().map(move |&a| (f, a)))
        .collect();
    let loaded: Vec<Result<Instance, String>> = files
        .iter()
        .map(|p| read_instance(p).map_err(|e| e.to_string()))
        .collect();
    let label = |f: usize| match &loaded[f] {
        Ok(inst) => inst.game.name().to_string(),
        Err(_) => files[f]
            .file_stem()
            .map_or(String::new(), |s| s.to_string_lossy().into_owned()),
    };
    let opts = SolveOptions {
        time_limit: Some(time_limit),
        ..SolveOptions::default()
    };
    let work = || -> Vec<ResultRecord> {
        jobs.par_iter()
            .map(|&(f, algo)| {
                let start = Instant::now();
                let result = match &loaded[f] {
                    Ok(inst) => solve(inst, algo, &opts).map_err(|e| e.to_string()),
                    Err(e) => Err(e.clone()),
                };
                result.unwrap_or_else(|e| {
                    ResultRecord::failed(&label(f), algo.as_str(), start.elapsed().as_secs_f64(), e)
                })
            })
            .collect()
    };
    let records = match threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CommandError::Failure(e.to_string()))?
            .install(work),
        None => work(),
    };

    let rows: Vec<BenchRow> = records.iter().map(BenchRow::from).collect();
    let sizes: BTreeMap<String, usize> = (0..files.len())
        .filter_map(|f| loaded[f].as_ref().ok().map(|inst| (label(f), inst.size())))
        .collect();
    let summary = summarize(&rows, &sizes);

    let csv_failure = |e: csv::Error| CommandError::Failure(format!("{}: {e}", out.display()));
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(out)
        .map_err(csv_failure)?;
    w.write_record(CSV_HEADER).map_err(csv_failure)?;
    for r in &rows {
        w.serialize(r).map_err(csv_failure)?;
    }
    w.flush()
        .map_err(|e| CommandError::Failure(e.to_string()))?;

    let summary_path = summary_path(out);
    let mut w = csv::Writer::from_path(&summary_path).map_err(csv_failure)?;
    for s in &summary {
        w.serialize(s).map_err(csv_failure)?;
    }
    w.flush()
        .map_err(|e| CommandError::Failure(e.to_string()))?;

    Ok(BenchReport {
        records,
        rows,
        summary,
        summary_path,
    })
}
