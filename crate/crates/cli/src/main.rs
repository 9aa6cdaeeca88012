use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mtorus::ExactScalar;
use mtorus_cli::{apply_overrides, cmd_analyze, cmd_solve, cmd_verify, exit, load_problem, CommandOutput, SolveOverrides};

/// Fixed points and periodic points of fiber-preserving maps on torus bundles.
#[derive(Parser)]
#[command(name = "mtorus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the map and report which iterates can be deformed away from fixed points.
    Analyze {
        #[command(flatten)]
        common: ProblemArgs,
    },
    /// Build a concrete map in the homotopy class and search for periodic points exactly.
    Solve {
        #[command(flatten)]
        common: ProblemArgs,
        /// Translation along the first fiber coordinate (e.g. "sqrt2", "1/3", "1+2*sqrt2").
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        /// Translation along the second fiber coordinate.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        /// Half-width of the brute-force lift window used as a cross-check.
        #[arg(long)]
        search_bound: Option<u64>,
    },
    /// Cross-check the algorithms against independent oracles on random inputs.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem file in JSON or TOML.
    #[arg(long, short)]
    input: PathBuf,
    /// Iterate to study, overriding the file.
    #[arg(long)]
    n: Option<u64>,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

fn scalar(flag: &str, v: Option<String>) -> Result<Option<ExactScalar>> {
    v.map(|s| s.parse().with_context(|| format!("--{flag}: cannot parse {s:?} as an exact scalar"))).transpose()
}

fn run(cli: Cli) -> Result<(CommandOutput, bool)> {
    match cli.command {
        Command::Analyze { common } => {
            let p = apply_overrides(load_problem(&common.input)?, &SolveOverrides { n: common.n, ..Default::default() })?;
            Ok((cmd_analyze(&p)?, common.json))
        }
        Command::Solve { common, eps, delta, search_bound } => {
            let overrides = SolveOverrides { n: common.n, eps: scalar("eps", eps)?, delta: scalar("delta", delta)?, search_bound };
            let p = apply_overrides(load_problem(&common.input)?, &overrides)?;
            Ok((cmd_solve(&p)?, common.json))
        }
        Command::Verify { seed, trials, json } => Ok((cmd_verify(seed, trials)?, json)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, json)) => {
            if json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::INVALID_INPUT as u8)
        }
    }
}
