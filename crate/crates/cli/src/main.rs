use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use ipgkit::cng::TieBreak;
use ipgkit_cli::commands::{
    bench, gen_cng, load, solve, Algo, CommandError, Selection, SolveOptions,
};

#[derive(Parser)]
#[command(
    name = "ipgkit",
    version,
    about = "Equilibria of integer programming games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Opt,
    Pess,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print a JSON result record.
    Solve {
        #[arg(long, value_parser = parse_algo)]
        algo: Algo,
        #[arg(long)]
        instance: PathBuf,
        /// `welfare` or `player:i` (players counted from 1); zeror only.
        #[arg(long, default_value = "welfare")]
        selection: Selection,
        /// Seconds, checked between iterations.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Attacker tie-breaking for mcnp.
        #[arg(long, value_enum, default_value = "opt")]
        tie_break: Tie,
        /// Also print a readable table on standard error.
        #[arg(long)]
        pretty: bool,
    },
    /// Write seeded critical node game instances.
    GenCng {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run algorithms over a directory of instances and write a CSV.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated, e.g. `zeror,mcnp`.
        #[arg(long, value_delimiter = ',', value_parser = parse_algo, default_value = "sgm,zeror")]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 50.0)]
        time_limit: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_algo(s: &str) -> Result<Algo, String> {
    s.parse()
}

fn seconds(s: f64) -> Result<Duration, CommandError> {
    Duration::try_from_secs_f64(s).map_err(|_| CommandError::Usage(format!("bad time limit {s}")))
}

fn run(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Solve {
            algo,
            instance,
            selection,
            time_limit,
            max_iter,
            tie_break,
            pretty,
        } => {
            let inst = load(&instance)?;
            let opts = SolveOptions {
                selection,
                time_limit: time_limit.map(seconds).transpose()?,
                max_iter,
                tie_break: match tie_break {
                    Tie::Opt => TieBreak::Optimistic,
                    Tie::Pess => TieBreak::Pessimistic,
                },
            };
            let record = solve(&inst, algo, &opts)?;
            println!("{}", record.to_json(false));
            if pretty {
                eprint!("{}", record.table());
            }
        }
        Command::GenCng {
            size,
            count,
            seed,
            out,
        } => {
            for path in gen_cng(size, count, seed, &out)? {
                println!("{}", path.display());
            }
        }
        Command::Bench {
            dir,
            algos,
            time_limit,
            out,
        } => {
            let report = bench(&dir, &algos, seconds(time_limit)?, &out)?;
            eprintln!(
                "{} rows to {}, summary to {}",
                report.rows.len(),
                out.display(),
                report.summary_path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
