//! Schema counting against the classical growth bound
//!
//! ```text
//! N(h, t+1) ≥ N(h, t) · f(h, t)/f̄(t) · (1 − σ(h)/(l−1)·p_c − o(h)·p_m)
//! ```
//!
//! Fitness is `1 − J`, so larger is better. The bound holds in expectation
//! only; the trace reports how often it held in an actual run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolver::{GaConfig, RunTrace};

/// Genome template: fixed values at some positions, wildcards elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    length: usize,
    fixed: BTreeMap<usize, f64>,
}

impl Schema {
    pub fn new(length: usize, fixed: BTreeMap<usize, f64>) -> Result<Self> {
        if fixed.is_empty() {
            return Err(Error::invalid(
                "schema",
                "needs at least one fixed position",
            ));
        }
        if let Some((&pos, _)) = fixed.iter().next_back().filter(|(&p, _)| p >= length) {
            return Err(Error::invalid(
                "schema",
                format!("position {pos} outside a genome of length {length}"),
            ));
        }
        Ok(Schema { length, fixed })
    }

    pub fn from_pairs(length: usize, pairs: &[(usize, f64)]) -> Result<Self> {
        Self::new(length, pairs.iter().copied().collect())
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn fixed(&self) -> &BTreeMap<usize, f64> {
        &self.fixed
    }

    /// `o(h)`: number of fixed positions.
    pub fn order(&self) -> usize {
        self.fixed.len()
    }

    /// `σ(h)`: distance between the outermost fixed positions.
    pub fn defining_length(&self) -> usize {
        let first = self.fixed.keys().next().copied().unwrap_or(0);
        let last = self.fixed.keys().next_back().copied().unwrap_or(0);
        last - first
    }

    pub fn matches(&self, genome: &[f64]) -> bool {
        genome.len() == self.length && self.fixed.iter().all(|(&p, &v)| genome[p] == v)
    }

    /// `1 − σ(h)/(l−1)·p_c − o(h)·p_m`; the crossover term is 0 for `l = 1`.
    pub fn survival_factor(&self, crossover_prob: f64, mutation_prob: f64) -> f64 {
        let disruption = if self.length > 1 {
            self.defining_length() as f64 / (self.length - 1) as f64
        } else {
            0.0
        };
        1.0 - disruption * crossover_prob - self.order() as f64 * mutation_prob
    }
}

/// `(o(h), σ(h))`.
pub fn schema_stats(s: &Schema) -> (usize, usize) {
    (s.order(), s.defining_length())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemaRow {
    pub generation: usize,
    /// `N(h, t)`.
    pub count: usize,
    /// Mean fitness of matching genomes (0 if none match).
    pub schema_fitness: f64,
    /// Mean fitness of the population.
    pub mean_fitness: f64,
    /// Right-hand side of the bound for generation `t + 1`.
    pub predicted_next: f64,
    /// Whether `N(h, t+1) ≥ predicted_next`; `None` for the last generation.
    pub held: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemaTrace {
    pub rows: Vec<SchemaRow>,
    /// Share of generations (with a successor) where the bound held.
    pub hold_fraction: f64,
}

/// Evaluates the schema bound on every consecutive pair of population
/// snapshots in `trace`.
pub fn schema_trace(trace: &RunTrace, schema: &Schema, cfg: &GaConfig) -> Result<SchemaTrace> {
    let snaps = &trace.snapshots;
    if snaps.is_empty() || snaps.len() != trace.records.len() {
        return Err(Error::invalid(
            "trace",
            "schema tracing needs a population snapshot for every generation",
        ));
    }
    if snaps
        .windows(2)
        .any(|w| w[1].generation != w[0].generation + 1)
    {
        return Err(Error::invalid("trace", "snapshots are not consecutive"));
    }
    let factor = schema.survival_factor(cfg.crossover_prob, cfg.mutation_prob);

    let mut rows: Vec<SchemaRow> = snaps
        .iter()
        .map(|snap| {
            let fitness: Vec<f64> = snap.costs.iter().map(|j| 1.0 - j).collect();
            let mean_fitness = fitness.iter().sum::<f64>() / fitness.len() as f64;
            let (count, sum) = snap
                .genomes
                .iter()
                .zip(&fitness)
                .filter(|(g, _)| schema.matches(g))
                .fold((0usize, 0.0), |(c, s), (_, f)| (c + 1, s + f));
            let schema_fitness = if count > 0 { sum / count as f64 } else { 0.0 };
            // all-zero fitness: every genome is equally (un)fit
            let ratio = if mean_fitness > 0.0 {
                schema_fitness / mean_fitness
            } else {
                1.0
            };
            SchemaRow {
                generation: snap.generation,
                count,
                schema_fitness,
                mean_fitness,
                predicted_next: count as f64 * ratio * factor,
                held: None,
            }
        })
        .collect();

    for t in 0..rows.len().saturating_sub(1) {
        let next = rows[t + 1].count as f64;
        rows[t].held = Some(next >= rows[t].predicted_next);
    }
    let checked: Vec<bool> = rows.iter().filter_map(|r| r.held).collect();
    let hold_fraction = if checked.is_empty() {
        1.0
    } else {
        checked.iter().filter(|h| **h).count() as f64 / checked.len() as f64
    };
    Ok(SchemaTrace {
        rows,
        hold_fraction,
    })
}
