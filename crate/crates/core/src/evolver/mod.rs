//! Genetic search over candidate coefficients.
//!
//! Each generation is scored, recorded, and replaced by its elites plus
//! offspring of tournament-selected parents (single-point crossover on
//! consecutive pairs, then per-gene mutation). The loop stops after
//! `max_generations` or, with `early_exit_on_zero`, as soon as some genome
//! reaches `J = 0`.
//!
//! Only the sequential loop touches the RNG; scoring fans out over a rayon
//! pool, so results do not depend on the worker count.

mod config;
mod operators;

use std::fmt::Write as _;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Alphabet, ClampMode, GaConfig};
pub use operators::{
    crossover, crossover_at, mutate, random_population, ranking, select, tournament, Genome,
    Selection,
};

use crate::dynsys::VectorField;
use crate::error::{Error, Result};
use crate::polyform::{enumerate_basis, CandidatePolynomial};
use crate::verifier::{GridEvaluator, GridSpec};

/// Scores a genome; lower is better and `0.0` is a solution.
pub trait CostModel: Sync {
    fn genome_len(&self) -> usize;
    fn cost(&self, genome: &[f64]) -> f64;
}

impl CostModel for GridEvaluator {
    fn genome_len(&self) -> usize {
        self.basis().len()
    }

    fn cost(&self, genome: &[f64]) -> f64 {
        self.cost_of(genome)
    }
}

/// The starting population for `cfg.rng_seed`.
pub fn init_population(cfg: &GaConfig, genome_len: usize) -> Result<Vec<Genome>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    Ok(random_population(
        &cfg.alphabet,
        cfg.population_size,
        genome_len,
        &mut rng,
    ))
}

/// Knobs that affect what is recorded or how work is scheduled, never the
/// search itself.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads for scoring; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Store the best genome every `k` generations (0 disables).
    pub best_genome_every: usize,
    /// Store every generation's full population and costs.
    pub population_snapshots: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    /// 1-based; generation 1 is the initial population.
    pub generation: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
    /// Wall time since the run started, at the end of this generation's scoring.
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_genome: Option<Genome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationSnapshot {
    pub generation: usize,
    pub genomes: Vec<Genome>,
    pub costs: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<GenerationRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<PopulationSnapshot>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn best_costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_cost).collect()
    }

    /// `generation,best_J,mean_J,elapsed_ms`, one row per generation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best_J,mean_J,elapsed_ms\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{:.3}",
                r.generation, r.best_cost, r.mean_cost, r.elapsed_ms
            );
        }
        out
    }
}

/// Outcome of a genome-level search.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub best: Genome,
    pub best_cost: f64,
    pub generations: usize,
    /// First generation whose best genome had `J = 0`.
    pub first_success: Option<usize>,
    pub trace: RunTrace,
}

/// Runs the GA against an arbitrary cost model.
pub fn evolve<M: CostModel>(model: &M, cfg: &GaConfig, opts: &RunOptions) -> Result<Evolution> {
    cfg.validate()?;
    match opts.threads {
        None => Ok(evolve_inner(model, cfg, opts)),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?;
            Ok(pool.install(|| evolve_inner(model, cfg, opts)))
        }
    }
}

fn evolve_inner<M: CostModel>(model: &M, cfg: &GaConfig, opts: &RunOptions) -> Evolution {
    let start = Instant::now();
    let n = cfg.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut population = random_population(&cfg.alphabet, n, model.genome_len(), &mut rng);
    // Elites keep their cost; everything else is rescored.
    let mut known: Vec<Option<f64>> = vec![None; n];

    let mut trace = RunTrace::default();
    let mut best: Option<(Genome, f64)> = None;
    let mut first_success = None;
    let mut generation = 0;

    while generation < cfg.max_generations {
        generation += 1;
        let costs: Vec<f64> = population
            .par_iter()
            .zip(known.par_iter())
            .map(|(g, k)| k.unwrap_or_else(|| model.cost(g)))
            .collect();

        let order = ranking(&costs);
        let leader = order[0];
        let best_cost = costs[leader];
        let mean_cost = costs.iter().sum::<f64>() / n as f64;
        if best.as_ref().map_or(true, |(_, c)| best_cost < *c) {
            best = Some((population[leader].clone(), best_cost));
        }
        if best_cost == 0.0 && first_success.is_none() {
            first_success = Some(generation);
        }
        let keep_genome = opts.best_genome_every > 0
            && (generation == 1 || generation % opts.best_genome_every == 0);
        trace.records.push(GenerationRecord {
            generation,
            best_cost,
            mean_cost,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            best_genome: keep_genome.then(|| population[leader].clone()),
        });
        if opts.population_snapshots {
            trace.snapshots.push(PopulationSnapshot {
                generation,
                genomes: population.clone(),
                costs: costs.clone(),
            });
        }

        if (cfg.early_exit_on_zero && best_cost == 0.0) || generation == cfg.max_generations {
            break;
        }

        let selection = select(&costs, cfg, &mut rng);
        let mut next = Vec::with_capacity(n);
        let mut next_known = Vec::with_capacity(n);
        for &e in &selection.elites {
            next.push(population[e].clone());
            next_known.push(Some(costs[e]));
        }
        for pair in selection.parents.chunks(2) {
            let children = match *pair {
                [a, b] => {
                    let (x, y) = crossover(&population[a], &population[b], cfg, &mut rng);
                    vec![x, y]
                }
                [a] => vec![population[a].clone()],
                _ => unreachable!(),
            };
            for mut child in children {
                mutate(&mut child, cfg, &mut rng);
                next.push(child);
                next_known.push(None);
            }
        }
        population = next;
        known = next_known;
    }

    let (best, best_cost) = best.expect("at least one generation is scored");
    Evolution {
        best,
        best_cost,
        generations: generation,
        first_success,
        trace,
    }
}

/// Result of a Lyapunov search.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Lowest-cost candidate seen in any generation.
    pub best: CandidatePolynomial,
    pub best_cost: f64,
    pub generations: usize,
    pub first_success: Option<usize>,
    pub trace: RunTrace,
}

impl RunResult {
    /// `J = 0` was reached.
    pub fn success(&self) -> bool {
        self.best_cost == 0.0
    }
}

/// Searches degree-`degree` candidates for `vf` on the grid of `spec`.
pub fn run(vf: &VectorField, degree: u32, spec: &GridSpec, cfg: &GaConfig) -> Result<RunResult> {
    run_with(vf, degree, spec, cfg, &RunOptions::default())
}

pub fn run_with(
    vf: &VectorField,
    degree: u32,
    spec: &GridSpec,
    cfg: &GaConfig,
    opts: &RunOptions,
) -> Result<RunResult> {
    cfg.validate()?;
    if spec.region().center() != vf.equilibrium() {
        return Err(Error::invalid(
            "region",
            "must be centered at the system's equilibrium",
        ));
    }
    let basis = enumerate_basis(vf.dimension(), degree)?;
    let evaluator = GridEvaluator::new(vf, spec, basis.into())?;
    let evo = evolve(&evaluator, cfg, opts)?;
    let best = CandidatePolynomial::with_basis(
        evaluator.basis().clone(),
        evo.best,
        vf.equilibrium().to_vec(),
    )?;
    Ok(RunResult {
        best,
        best_cost: evo.best_cost,
        generations: evo.generations,
        first_success: evo.first_success,
        trace: evo.trace,
    })
}
