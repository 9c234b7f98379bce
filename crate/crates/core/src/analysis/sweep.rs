//! Batch experiments: a base configuration, a grid of varied parameters and
//! a list of seeds. Every `(cell, seed)` pair is an independent GA run.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::evolver::{run, RunTrace};

/// Width of a generation bin: `D_k = (200(k−1), 200k]`.
pub const BIN_WIDTH: usize = 200;
pub const BIN_COUNT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Integer alphabet `[-d, d]` (keeps the base step).
    CoefficientRange,
    /// Every side of the box.
    RegionSide,
    PopulationSize,
    MutationProb,
    MaxGenerations,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::CoefficientRange => "coefficient_range",
            SweepParam::RegionSide => "region_side",
            SweepParam::PopulationSize => "population_size",
            SweepParam::MutationProb => "mutation_prob",
            SweepParam::MaxGenerations => "max_generations",
        }
    }

    fn apply(self, cfg: &mut SearchConfig, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config {
                    path: format!("axes.{}", self.name()),
                    message: format!("{v} is not a non-negative integer"),
                })
            }
        };
        match self {
            SweepParam::CoefficientRange => {
                cfg.ga.alphabet.lo = -value;
                cfg.ga.alphabet.hi = value;
            }
            SweepParam::RegionSide => {
                for side in &mut cfg.region.side_lengths {
                    *side = value;
                }
            }
            SweepParam::PopulationSize => cfg.ga.population_size = count(value)?,
            SweepParam::MutationProb => cfg.ga.mutation_prob = value,
            SweepParam::MaxGenerations => cfg.ga.max_generations = count(value)?,
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub base: SearchConfig,
    /// Cells are the Cartesian product of all axes (first axis slowest).
    #[serde(default)]
    pub axes: Vec<Axis>,
    pub seeds: Vec<u64>,
    /// Keep every run's per-generation trace.
    #[serde(default)]
    pub write_traces: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub values: Vec<f64>,
    pub config: SearchConfig,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let plan: SweepPlan = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        plan.cells()?;
        Ok(plan)
    }

    pub fn varied_params(&self) -> String {
        if self.axes.is_empty() {
            return "none".into();
        }
        let names: Vec<_> = self.axes.iter().map(|a| a.param.name()).collect();
        names.join(";")
    }

    /// Expands the axes into validated per-cell configurations.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        if self.seeds.is_empty() {
            return Err(Error::Config {
                path: "seeds".into(),
                message: "at least one seed is required".into(),
            });
        }
        if let Some(a) = self.axes.iter().find(|a| a.values.is_empty()) {
            return Err(Error::Config {
                path: format!("axes.{}", a.param.name()),
                message: "no values".into(),
            });
        }
        let mut combos: Vec<Vec<f64>> = vec![vec![]];
        for axis in &self.axes {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut c = prefix.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .enumerate()
            .map(|(id, values)| {
                let mut config = self.base.clone();
                for (axis, &v) in self.axes.iter().zip(&values) {
                    axis.param.apply(&mut config, v)?;
                }
                config.validate()?;
                Ok(Cell { id, values, config })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell_id: usize,
    pub varied_param: String,
    pub value: String,
    pub seed: u64,
    pub success: bool,
    /// First generation reaching `J = 0`, or the generations run on failure.
    pub generations: usize,
    pub best_cost: f64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// `(cell_id, seed, trace)` when the plan asks for traces.
    pub traces: Vec<(usize, u64, RunTrace)>,
}

impl SweepOutcome {
    pub fn success_generations(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.success)
            .map(|r| r.generations)
            .collect()
    }

    pub fn bins(&self) -> [usize; BIN_COUNT] {
        bin_generations(&self.success_generations())
    }

    /// `cell_id,varied_param,value,seed,success,generations,best_J,elapsed_ms`
    pub fn runs_csv(&self) -> String {
        let mut out =
            String::from("cell_id,varied_param,value,seed,success,generations,best_J,elapsed_ms\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.3}",
                r.cell_id,
                r.varied_param,
                r.value,
                r.seed,
                r.success,
                r.generations,
                r.best_cost,
                r.elapsed_ms
            );
        }
        out
    }

    /// `bin,successes` for `D1..D5`.
    pub fn bins_csv(&self) -> String {
        let mut out = String::from("bin,successes\n");
        for (i, n) in self.bins().iter().enumerate() {
            let _ = writeln!(out, "D{},{}", i + 1, n);
        }
        out
    }
}

/// Counts generations into `D_k = (200(k−1), 200k]`, `k = 1..=5`; values
/// outside `(0, 1000]` are not counted.
pub fn bin_generations(generations: &[usize]) -> [usize; BIN_COUNT] {
    let mut bins = [0; BIN_COUNT];
    for &g in generations {
        if g == 0 {
            continue;
        }
        let k = (g - 1) / BIN_WIDTH;
        if k < BIN_COUNT {
            bins[k] += 1;
        }
    }
    bins
}

fn format_value(v: f64) -> String {
    format!("{v}")
}

/// Runs every `(cell, seed)` pair. Runs are independent and execute in
/// parallel; rows come back in `(cell, seed)` order.
pub fn sweep(plan: &SweepPlan) -> Result<SweepOutcome> {
    let cells = plan.cells()?;
    let varied = plan.varied_params();
    let jobs: Vec<(&Cell, u64)> = cells
        .iter()
        .flat_map(|c| plan.seeds.iter().map(move |&s| (c, s)))
        .collect();

    let results: Vec<(SweepRow, Option<RunTrace>)> = jobs
        .par_iter()
        .map(|&(cell, seed)| {
            let vf = cell.config.vector_field()?;
            let spec = cell.config.grid_spec(&vf)?;
            let mut ga = cell.config.ga_config();
            ga.rng_seed = seed;
            let start = Instant::now();
            let result = run(&vf, cell.config.degree, &spec, &ga)?;
            let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            let value = if cell.values.is_empty() {
                String::new()
            } else {
                let parts: Vec<_> = cell.values.iter().map(|v| format_value(*v)).collect();
                parts.join(";")
            };
            let row = SweepRow {
                cell_id: cell.id,
                varied_param: varied.clone(),
                value,
                seed,
                success: result.success(),
                generations: result.first_success.unwrap_or(result.generations),
                best_cost: result.best_cost,
                elapsed_ms,
            };
            Ok((row, plan.write_traces.then_some(result.trace)))
        })
        .collect::<Result<_>>()?;

    let mut outcome = SweepOutcome {
        rows: Vec::with_capacity(results.len()),
        traces: Vec::new(),
    };
    for (row, trace) in results {
        if let Some(t) = trace {
            outcome.traces.push((row.cell_id, row.seed, t));
        }
        outcome.rows.push(row);
    }
    Ok(outcome)
}
