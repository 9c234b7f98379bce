//! Convergence estimates, schema diagnostics and experiment sweeps.

mod bound;
mod schema;
mod sweep;

pub use bound::{convergence_iterations, ConvergenceParams};
pub use schema::{schema_stats, schema_trace, Schema, SchemaRow, SchemaTrace};
pub use sweep::{
    bin_generations, sweep, Axis, SweepOutcome, SweepParam, SweepPlan, SweepRow, BIN_COUNT,
    BIN_WIDTH,
};
