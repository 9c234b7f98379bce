//! `lyapga` — search, verify and analyse polynomial Lyapunov candidates.
//!
//! Exit codes: 0 success (candidate found / verified), 3 no certificate,
//! 2 bad input (config, candidate or parameters), 4 the vector field could
//! not be evaluated on the grid, 1 anything else (e.g. output I/O).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "lyapga",
    version,
    about = "Genetic search for polynomial Lyapunov functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the genetic search described by a JSON config.
    Search {
        config: PathBuf,
        /// Write the JSON report here instead of stdout (overrides output.report).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the per-generation CSV trace here (overrides output.trace).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Worker threads for scoring; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a given candidate on the config's system and grid.
    Verify {
        config: PathBuf,
        #[command(flatten)]
        candidate: CandidateArg,
        /// Maximum number of violating points listed.
        #[arg(long, default_value_t = lyapga::verifier::DEFAULT_VIOLATION_CAP)]
        max_violations: usize,
    },
    /// Iterations after which an optimal genome exists with probability p.
    Bound {
        #[arg(long)]
        pconv: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        gamma: u32,
        #[arg(long = "K")]
        k: u32,
        #[arg(long)]
        n: u64,
    },
    /// Run a batch of searches and write CSV summaries.
    Sweep {
        plan: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct CandidateArg {
    /// Polynomial text, e.g. "x1^2 + x1*x2 + 2*x2^2".
    #[arg(long, allow_hyphen_values = true)]
    candidate: Option<String>,
    /// Comma-separated coefficients in basis order.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Search {
            config,
            report,
            trace,
            threads,
        } => commands::search(&config, report, trace, threads),
        Command::Verify {
            config,
            candidate,
            max_violations,
        } => {
            let input = match (candidate.candidate, candidate.coeffs) {
                (Some(text), _) => commands::CandidateInput::Text(text),
                (None, Some(csv)) => commands::CandidateInput::Coeffs(csv),
                (None, None) => unreachable!("clap enforces the group"),
            };
            commands::verify(&config, input, max_violations)
        }
        Command::Bound {
            pconv,
            mu,
            gamma,
            k,
            n,
        } => commands::bound(pconv, mu, gamma, k, n),
        Command::Sweep { plan, out_dir } => commands::sweep(&plan, &out_dir),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
