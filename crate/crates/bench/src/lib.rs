//! Shared fixtures for the criterion benchmarks in `benches/`.

use lyapga::{GridSpec, Region, VectorField};

/// Damped pendulum on the unit box with `k` nodes per axis.
pub fn pendulum_setup(k: usize) -> (VectorField, GridSpec) {
    let vf = VectorField::builtin("pendulum").expect("builtin system");
    let region = Region::new(vec![0.0, 0.0], vec![1.0, 1.0]).expect("valid region");
    let spec = GridSpec::uniform(region, k).expect("valid grid");
    (vf, spec)
}

/// Degree-3 pendulum certificate used as a fixed workload.
pub const PENDULUM_L: &str = "8*x1^2 + 8*x1*x2 + 9*x2^2 - x1^3 + 3*x1^2*x2 - x2^3";
