use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the iteration bound: with mutation probability `mutation_prob`
/// per gene, `genome_len` genes over `alphabet_size` values and a population
/// of `population_size`, how many generations guarantee at least one optimal
/// genome with probability `p_conv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceParams {
    pub p_conv: f64,
    pub mutation_prob: f64,
    pub genome_len: u32,
    pub alphabet_size: u32,
    pub population_size: u64,
}

impl ConvergenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_conv > 0.0 && self.p_conv < 1.0) {
            return Err(Error::invalid(
                "p_conv",
                format!("{} not in (0, 1)", self.p_conv),
            ));
        }
        if !(self.mutation_prob > 0.0 && self.mutation_prob < 1.0) {
            return Err(Error::invalid(
                "mu",
                format!("{} not in (0, 1)", self.mutation_prob),
            ));
        }
        if self.genome_len < 1 {
            return Err(Error::invalid("gamma", "must be at least 1"));
        }
        if self.alphabet_size < 2 {
            return Err(Error::invalid("K", "must be at least 2"));
        }
        if self.population_size < 1 {
            return Err(Error::invalid("n", "must be at least 1"));
        }
        Ok(())
    }

    /// Smallest probability that one mutation step turns a genome into the
    /// optimum: `min[(1−μ)^{γ−1} μ/(K−1), (μ/(K−1))^γ]`.
    pub fn min_term(&self) -> f64 {
        let per_gene = self.mutation_prob / (self.alphabet_size - 1) as f64;
        let one_wrong = (1.0 - self.mutation_prob).powi(self.genome_len as i32 - 1) * per_gene;
        let all_wrong = per_gene.powi(self.genome_len as i32);
        one_wrong.min(all_wrong)
    }
}

/// `τ = trunc( ln(1 − p_conv) / (n · ln(1 − m)) )` with `m` from
/// [`ConvergenceParams::min_term`].
pub fn convergence_iterations(p: &ConvergenceParams) -> Result<u64> {
    p.validate()?;
    let m = p.min_term();
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::invalid(
            "parameters",
            format!("min term {m:e} is outside (0, 1)"),
        ));
    }
    let denominator = p.population_size as f64 * (-m).ln_1p();
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(Error::invalid(
            "parameters",
            "degenerate denominator (min term underflows)",
        ));
    }
    let tau = (-p.p_conv).ln_1p() / denominator;
    Ok(tau.trunc() as u64)
}
