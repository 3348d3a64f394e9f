mod commands;
mod config;
mod error;
mod store;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use biorth_core::asymptotics::TableKind;
use biorth_core::Exec;
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};

use crate::config::{read_config, setup, SUITES};
use crate::error::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "biorth", version, about = "Mixed type Hermite–Padé polynomials of Nikishin systems")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Recompute results that already exist on disk.
    #[arg(long, global = true)]
    force: bool,
    /// Restrict verification to these suites (repeatable).
    #[arg(long = "suite", global = true, value_name = "NAME", value_parser = PossibleValuesParser::new(SUITES))]
    suites: Vec<String>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the forward and reversed systems for every degree up to n_max.
    SolveHp,
    /// Solve the vector equilibrium problem.
    SolveEq,
    /// Run the verification suites and write report.json.
    Verify,
    /// Write measured against predicted tables (all applicable ones by default).
    Tables {
        #[arg(value_name = "TABLE", value_parser = parse_kind)]
        names: Vec<TableKind>,
    },
}

fn parse_kind(s: &str) -> Result<TableKind, String> {
    s.parse().map_err(|e: biorth_core::Error| e.to_string())
}

fn run(cli: Cli) -> Outcome<()> {
    let path = cli.config.ok_or_else(|| Failure::Validation("--config is required".into()))?;
    let jobs = cli.jobs.unwrap_or(0);
    let exec = if jobs == 1 { Exec::Sequential } else { Exec::Parallel };
    if jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Solver(e.to_string()))?;
    }
    let setup = setup(read_config(&path)?, cli.out, exec)?;
    let suites = if cli.suites.is_empty() { setup.config.suites.clone() } else { cli.suites };
    match cli.command {
        Command::SolveHp => commands::solve_hp(&setup, cli.force),
        Command::SolveEq => {
            let reversed = suites.iter().any(|s| s == "reversal-symmetry");
            commands::solve_eq(&setup, cli.force, reversed)
        }
        Command::Tables { names } => commands::tables(&setup, &names, cli.force),
        Command::Verify => {
            let report = verify::verify(&setup, &suites, cli.force)?;
            for r in &report.suites {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!(
                    "{status} {:<18} {}/{} worst {:.3e} threshold {:.1e}",
                    r.suite, r.passes, r.checks, r.worst_gap, r.threshold
                );
            }
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report.suites.iter().filter(|r| !r.passed).map(|r| r.suite.as_str()).collect();
                Err(Failure::Verification(failed.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("biorth: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
