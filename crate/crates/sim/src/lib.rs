//! Experiment harness for the `misfit-core` models: configuration files,
//! parameter sweeps over a worker pool, cross-run aggregation and CSV output.

pub mod config;
pub mod error;
pub mod format;
pub mod output;
pub mod plan;
pub mod presets;
pub mod sweep;

pub use config::parse_config;
pub use error::{ConfigError, HarnessError};
pub use output::{read_csv, write_csv};
pub use plan::{Axis, AxisValue, ExperimentPlan, GridPoint, SweepAxis};
pub use sweep::{run_grid_point, run_sweep, RunRecord, SweepOptions, SweepOutput};

pub use misfit_core;

/// Environment variable consulted when `--workers` is not given.
pub const WORKERS_ENV: &str = "MISFIT_SIM_WORKERS";
