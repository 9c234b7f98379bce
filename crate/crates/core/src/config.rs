//! JSON search configuration.
//!
//! ```json
//! {
//!   "system": { "name": "pendulum" },
//!   "degree": 3,
//!   "region": { "side_lengths": [1.0, 1.0] },
//!   "grid": { "points_per_axis": 51 },
//!   "ga": {
//!     "population_size": 1000, "mutation_prob": 0.2, "crossover_prob": 0.4,
//!     "elite_fraction": 0.01, "max_generations": 200,
//!     "alphabet": { "lo": -2, "hi": 2, "step": 1 },
//!     "clamp_mode": "clamped", "early_exit": true
//!   },
//!   "seed": 1
//! }
//! ```
//!
//! Unknown keys are rejected. Inline systems use
//! `"system": { "equations": ["x2", "-sin(x1) - x2"], "equilibrium": [0, 0] }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynsys::VectorField;
use crate::error::{Error, Result};
use crate::evolver::{Alphabet, ClampMode, GaConfig};
use crate::verifier::{GridSpec, Region, DEFAULT_POINTS_PER_AXIS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equations: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub side_lengths: Vec<f64>,
}

/// A single count for every axis, or one count per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsPerAxis {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

impl PointsPerAxis {
    pub fn resolve(&self, dimension: usize) -> Vec<usize> {
        match self {
            PointsPerAxis::Uniform(k) => vec![*k; dimension],
            PointsPerAxis::PerAxis(v) => v.clone(),
        }
    }
}

fn default_points() -> PointsPerAxis {
    PointsPerAxis::Uniform(DEFAULT_POINTS_PER_AXIS)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_points")]
    pub points_per_axis: PointsPerAxis,
    /// `None` selects half of the smallest grid step.
    #[serde(default)]
    pub exclusion_radius: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            points_per_axis: default_points(),
            exclusion_radius: None,
        }
    }
}

/// GA settings; omitted keys take the defaults of
/// [`GaConfig::standard`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaSection {
    pub population_size: usize,
    pub mutation_prob: f64,
    pub crossover_prob: f64,
    pub elite_fraction: f64,
    pub max_generations: usize,
    pub alphabet: Alphabet,
    pub clamp_mode: ClampMode,
    pub early_exit: bool,
}

impl Default for GaSection {
    fn default() -> Self {
        let t = GaConfig::standard(0);
        GaSection {
            population_size: t.population_size,
            mutation_prob: t.mutation_prob,
            crossover_prob: t.crossover_prob,
            elite_fraction: t.elite_fraction,
            max_generations: t.max_generations,
            alphabet: t.alphabet,
            clamp_mode: t.clamp_mode,
            early_exit: t.early_exit_on_zero,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub system: SystemConfig,
    pub degree: u32,
    pub region: RegionConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub ga: GaSection,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn config_err(path: &str, e: Error) -> Error {
    match e {
        Error::Invalid { what, reason } => Error::Config {
            path: what.to_string(),
            message: reason,
        },
        Error::Config { .. } => e,
        other => Error::Config {
            path: path.to_string(),
            message: other.to_string(),
        },
    }
}

impl SearchConfig {
    /// Parses and validates; errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SearchConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config {
                path,
                message: e.into_inner().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds every derived object once so that all invariants are checked.
    pub fn validate(&self) -> Result<()> {
        let vf = self.vector_field()?;
        if self.degree == 0 {
            return Err(Error::Config {
                path: "degree".into(),
                message: "must be at least 1".into(),
            });
        }
        self.grid_spec(&vf)?;
        self.ga.alphabet.validate().map_err(|e| match e {
            Error::Invalid { reason, .. } => Error::Config {
                path: "ga.alphabet".into(),
                message: reason,
            },
            other => other,
        })?;
        self.ga_config()
            .validate()
            .map_err(|e| config_err("ga", e))?;
        Ok(())
    }

    pub fn vector_field(&self) -> Result<VectorField> {
        let sys = &self.system;
        match (&sys.name, &sys.equations) {
            (Some(name), None) => {
                let vf = VectorField::builtin(name).map_err(|e| config_err("system.name", e))?;
                if let Some(eq) = &sys.equilibrium {
                    if eq.as_slice() != vf.equilibrium() {
                        return Err(Error::Config {
                            path: "system.equilibrium".into(),
                            message: format!(
                                "builtin `{name}` has its equilibrium at {:?}",
                                vf.equilibrium()
                            ),
                        });
                    }
                }
                Ok(vf)
            }
            (None, Some(equations)) => {
                let eq = sys.equilibrium.clone().ok_or_else(|| Error::Config {
                    path: "system.equilibrium".into(),
                    message: "required with system.equations".into(),
                })?;
                VectorField::parse(equations, eq).map_err(|e| config_err("system.equations", e))
            }
            _ => Err(Error::Config {
                path: "system".into(),
                message: "give exactly one of `name` or `equations`".into(),
            }),
        }
    }

    /// Grid over the box centered at the system's equilibrium.
    pub fn grid_spec(&self, vf: &VectorField) -> Result<GridSpec> {
        let region = Region::new(vf.equilibrium().to_vec(), self.region.side_lengths.clone())
            .map_err(|e| config_err("region.side_lengths", e))?;
        let points = self.grid.points_per_axis.resolve(vf.dimension());
        GridSpec::new(region, points, self.grid.exclusion_radius).map_err(|e| config_err("grid", e))
    }

    pub fn ga_config(&self) -> GaConfig {
        let g = &self.ga;
        GaConfig {
            population_size: g.population_size,
            mutation_prob: g.mutation_prob,
            crossover_prob: g.crossover_prob,
            elite_fraction: g.elite_fraction,
            max_generations: g.max_generations,
            alphabet: g.alphabet,
            rng_seed: self.seed,
            early_exit_on_zero: g.early_exit,
            clamp_mode: g.clamp_mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PENDULUM: &str = r#"{
        "system": {"name": "pendulum"},
        "degree": 3,
        "region": {"side_lengths": [1.0, 1.0]},
        "seed": 7
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = SearchConfig::from_json(PENDULUM).unwrap();
        let ga = cfg.ga_config();
        assert_eq!(ga, GaConfig::standard(7));
        let vf = cfg.vector_field().unwrap();
        let spec = cfg.grid_spec(&vf).unwrap();
        assert_eq!(spec.points_per_axis(), &[51, 51]);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = SearchConfig::from_json(PENDULUM).unwrap();
        assert_eq!(SearchConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let text = PENDULUM.replace(
            "\"seed\": 7",
            "\"seed\": 7, \"ga\": {\"mutaton_prob\": 0.1}",
        );
        match SearchConfig::from_json(&text) {
            Err(Error::Config { path, message }) => {
                assert_eq!(path, "ga.mutaton_prob");
                assert!(message.contains("mutaton_prob"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seed_is_mandatory() {
        let text = PENDULUM.replace(",\n        \"seed\": 7", "");
        assert!(matches!(
            SearchConfig::from_json(&text),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn semantic_errors_name_keys() {
        let cases = [
            (
                PENDULUM.replace("\"seed\": 7", "\"seed\": 7, \"ga\": {\"mutation_prob\": 2}"),
                "ga.mutation_prob",
            ),
            (PENDULUM.replace("pendulum", "duffing"), "system.name"),
            (PENDULUM.replace("[1.0, 1.0]", "[1.0, -1.0]"), "region"),
            (
                PENDULUM.replace(
                    "\"seed\": 7",
                    "\"seed\": 7, \"grid\": {\"points_per_axis\": 2}",
                ),
                "grid",
            ),
            (PENDULUM.replace("\"degree\": 3", "\"degree\": 0"), "degree"),
        ];
        for (text, expected) in cases {
            match SearchConfig::from_json(&text) {
                Err(Error::Config { path, .. }) => assert_eq!(path, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn inline_system() {
        let text = r#"{
            "system": {"equations": ["-x1 + x1*x2", "-x2"], "equilibrium": [0, 0]},
            "degree": 2,
            "region": {"side_lengths": [2.0, 1.8]},
            "grid": {"points_per_axis": [41, 37], "exclusion_radius": 0.01},
            "ga": {"clamp_mode": "init-only", "alphabet": {"lo": -3, "hi": 3}},
            "seed": 1
        }"#;
        let cfg = SearchConfig::from_json(text).unwrap();
        let vf = cfg.vector_field().unwrap();
        assert_eq!(vf.eval(&[1.0, 0.5]).unwrap(), vec![-0.5, -0.5]);
        let spec = cfg.grid_spec(&vf).unwrap();
        assert_eq!(spec.points_per_axis(), &[41, 37]);
        assert_eq!(cfg.ga_config().clamp_mode, ClampMode::InitOnly);
        assert_eq!(cfg.ga_config().alphabet.len(), 7);

        let missing_eq = text.replace(", \"equilibrium\": [0, 0]", "");
        assert!(SearchConfig::from_json(&missing_eq).is_err());
    }
}
