use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discrete coefficient set `{lo, lo + step, ..., hi}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabet {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    1.0
}

impl Alphabet {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let a = Alphabet { lo, hi, step };
        a.validate()?;
        Ok(a)
    }

    /// Integers in `[-d, d]`.
    pub fn symmetric(d: f64) -> Result<Self> {
        Self::new(-d, d, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return Err(Error::invalid("alphabet", "bounds and step must be finite"));
        }
        if !(self.step > 0.0) {
            return Err(Error::invalid("alphabet", "step must be positive"));
        }
        if !(self.hi > self.lo) {
            return Err(Error::invalid(
                "alphabet",
                format!(
                    "need hi > lo (at least two values), got [{}, {}]",
                    self.lo, self.hi
                ),
            ));
        }
        let span = (self.hi - self.lo) / self.step;
        if (span - span.round()).abs() > 1e-9 {
            return Err(Error::invalid(
                "alphabet",
                format!("(hi - lo) / step = {span} is not an integer"),
            ));
        }
        Ok(())
    }

    /// Number of values `K`.
    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value at integer position `idx`; positions outside `0..K` extrapolate
    /// on the same lattice.
    pub fn value(&self, idx: i64) -> f64 {
        self.lo + idx as f64 * self.step
    }

    /// Nearest lattice position of `v`.
    pub fn index_of(&self, v: f64) -> i64 {
        ((v - self.lo) / self.step).round() as i64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len() as i64).map(|i| self.value(i)).collect()
    }

    pub fn contains(&self, v: f64) -> bool {
        let idx = self.index_of(v);
        (0..self.len() as i64).contains(&idx) && self.value(idx) == v
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClampMode {
    /// Mutation only moves genes between alphabet values.
    #[default]
    #[serde(rename = "clamped")]
    Clamped,
    /// The alphabet bounds only the initial population; mutation may also
    /// step a gene by `±step`, beyond `[lo, hi]`.
    #[serde(rename = "init-only")]
    InitOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    /// Per-pair crossover probability.
    pub crossover_prob: f64,
    pub elite_fraction: f64,
    pub max_generations: usize,
    pub alphabet: Alphabet,
    pub rng_seed: u64,
    pub early_exit_on_zero: bool,
    pub clamp_mode: ClampMode,
}

impl GaConfig {
    /// Population 1000, mutation 20%, crossover 40%, 1% elites, integer
    /// coefficients in `[-2, 2]`, 200 generations.
    pub fn standard(rng_seed: u64) -> Self {
        GaConfig {
            population_size: 1000,
            mutation_prob: 0.2,
            crossover_prob: 0.4,
            elite_fraction: 0.01,
            max_generations: 200,
            alphabet: Alphabet {
                lo: -2.0,
                hi: 2.0,
                step: 1.0,
            },
            rng_seed,
            early_exit_on_zero: true,
            clamp_mode: ClampMode::Clamped,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alphabet.validate()?;
        if self.population_size < 2 {
            return Err(Error::invalid("ga.population_size", "must be at least 2"));
        }
        for (name, p) in [
            ("ga.mutation_prob", self.mutation_prob),
            ("ga.crossover_prob", self.crossover_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(name, format!("{p} is not in [0, 1]")));
            }
        }
        if !(0.0..1.0).contains(&self.elite_fraction) {
            return Err(Error::invalid(
                "ga.elite_fraction",
                format!("{} is not in [0, 1)", self.elite_fraction),
            ));
        }
        if self.max_generations == 0 {
            return Err(Error::invalid("ga.max_generations", "must be at least 1"));
        }
        Ok(())
    }

    /// `⌈elite_fraction · n⌉`.
    pub fn elite_count(&self) -> usize {
        let e = (self.elite_fraction * self.population_size as f64).ceil() as usize;
        e.min(self.population_size)
    }
}
