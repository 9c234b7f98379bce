use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use lyapga::analysis::{self, ConvergenceParams, SweepPlan};
use lyapga::config::SearchConfig;
use lyapga::evolver::{run_with, RunOptions};
use lyapga::verifier::{cost, DEFAULT_VIOLATION_CAP};
use lyapga::{CandidatePolynomial, CostReport, Error};
use serde::Serialize;

use crate::output::write_atomic;

/// Non-error outcomes; the discriminant is the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Success = 0,
    NoCertificate = 3,
}

/// Malformed command-line input that the library never sees.
#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::FieldDomain { .. } => 4,
                _ => 2,
            };
        }
    }
    1
}

fn load_config(path: &Path) -> Result<SearchConfig> {
    SearchConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Outcome {
    Found,
    NotFound,
}

#[derive(Serialize)]
struct CandidateOut {
    degree: u32,
    basis: Vec<Vec<u32>>,
    coefficients: Vec<f64>,
    polynomial: String,
}

impl From<&CandidatePolynomial> for CandidateOut {
    fn from(c: &CandidatePolynomial) -> Self {
        CandidateOut {
            degree: c.max_degree(),
            basis: c.basis().iter().map(|m| m.exponents().to_vec()).collect(),
            coefficients: c.coefficients().to_vec(),
            polynomial: c.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    outcome: Outcome,
    candidate: CandidateOut,
    cost_report: CostReport,
    generations: usize,
    first_success: Option<usize>,
    trace: Option<String>,
    elapsed_ms: f64,
    config: &'a SearchConfig,
}

pub fn search(
    config_path: &Path,
    report_path: Option<PathBuf>,
    trace_path: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<Status> {
    let config = load_config(config_path)?;
    let output = config.output.clone().unwrap_or_default();
    let report_path = report_path.or(output.report.map(PathBuf::from));
    let trace_path = trace_path.or(output.trace.map(PathBuf::from));

    let vf = config.vector_field()?;
    let spec = config.grid_spec(&vf)?;
    let ga = config.ga_config();
    let start = Instant::now();
    let opts = RunOptions {
        threads,
        ..Default::default()
    };
    let result = run_with(&vf, config.degree, &spec, &ga, &opts)?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let check = cost(&result.best, &vf, &spec)?;
    debug_assert_eq!(check.cost, result.best_cost);

    if let Some(path) = &trace_path {
        write_atomic(path, &result.trace.to_csv())?;
    }
    let found = result.success();
    let report = Report {
        tool: "lyapga",
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        outcome: if found {
            Outcome::Found
        } else {
            Outcome::NotFound
        },
        candidate: CandidateOut::from(&result.best),
        cost_report: check.truncated(DEFAULT_VIOLATION_CAP),
        generations: result.generations,
        first_success: result.first_success,
        trace: trace_path.map(|p| p.display().to_string()),
        elapsed_ms,
        config: &config,
    };
    let json = serde_json::to_string_pretty(&report)? + "\n";
    match &report_path {
        Some(path) => {
            write_atomic(path, &json)?;
            eprintln!(
                "{}: J = {} after {} generations; report in {}",
                if found { "found" } else { "not found" },
                result.best_cost,
                result.generations,
                path.display()
            );
        }
        None => print!("{json}"),
    }
    Ok(if found {
        Status::Success
    } else {
        Status::NoCertificate
    })
}

pub enum CandidateInput {
    Text(String),
    Coeffs(String),
}

#[derive(Serialize)]
struct VerifyOut {
    polynomial: String,
    coefficients: Vec<f64>,
    certified: bool,
    #[serde(flatten)]
    report: CostReport,
}

pub fn verify(config_path: &Path, input: CandidateInput, max_violations: usize) -> Result<Status> {
    let config = load_config(config_path)?;
    let vf = config.vector_field()?;
    let spec = config.grid_spec(&vf)?;
    let eq = vf.equilibrium().to_vec();
    let candidate = match input {
        CandidateInput::Text(text) => CandidatePolynomial::parse(&text, config.degree, eq)
            .with_context(|| format!("candidate `{text}`"))?,
        CandidateInput::Coeffs(csv) => {
            let coeffs = csv
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        UsageError(format!("bad coefficient `{}` in --coeffs", s.trim()))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            CandidatePolynomial::new(config.degree, coeffs, eq).context("--coeffs")?
        }
    };
    let report = cost(&candidate, &vf, &spec)?;
    let certified = report.is_certified();
    let out = VerifyOut {
        polynomial: candidate.to_string(),
        coefficients: candidate.coefficients().to_vec(),
        certified,
        report: report.truncated(max_violations),
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if certified {
        Status::Success
    } else {
        Status::NoCertificate
    })
}

pub fn bound(p_conv: f64, mu: f64, gamma: u32, k: u32, n: u64) -> Result<Status> {
    let params = ConvergenceParams {
        p_conv,
        mutation_prob: mu,
        genome_len: gamma,
        alphabet_size: k,
        population_size: n,
    };
    let tau = analysis::convergence_iterations(&params)?;
    println!("tau = {tau}");
    println!("min_term = {:e}", params.min_term());
    Ok(Status::Success)
}

pub fn sweep(plan_path: &Path, out_dir: &Path) -> Result<Status> {
    let text = std::fs::read_to_string(plan_path)
        .map_err(Error::from)
        .with_context(|| format!("reading {}", plan_path.display()))?;
    let plan =
        SweepPlan::from_json(&text).with_context(|| format!("plan {}", plan_path.display()))?;
    let outcome = analysis::sweep(&plan)?;

    write_atomic(&out_dir.join("runs.csv"), &outcome.runs_csv())?;
    write_atomic(&out_dir.join("bins.csv"), &outcome.bins_csv())?;
    for (cell, seed, trace) in &outcome.traces {
        let name = format!("cell{cell:03}_seed{seed}.csv");
        write_atomic(&out_dir.join("traces").join(name), &trace.to_csv())?;
    }
    let successes = outcome.rows.iter().filter(|r| r.success).count();
    println!(
        "{} runs, {} reached J = 0; bins D1..D5 = {:?}; {} trace files in {}",
        outcome.rows.len(),
        successes,
        outcome.bins(),
        outcome.traces.len(),
        out_dir.display()
    );
    Ok(Status::Success)
}
