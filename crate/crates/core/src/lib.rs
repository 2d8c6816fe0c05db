//! Simulation kernel for two agent-based market models.
//!
//! The first model ([`econ`]) is a population of firms whose valuations
//! compound under stochastic growth. Firms are either traditional (modest,
//! Gaussian growth) or digital (high initial growth that depreciates with age),
//! pay tax on their gains ([`tax`]) and are replaced when they fall under a
//! bankruptcy floor.
//!
//! The second model ([`adoption`]) places the same firms on a
//! Newman-Watts-Strogatz small-world graph ([`network`]) and lets traditional
//! firms turn digital once enough of their better-off neighbours have.
//!
//! [`metrics`] holds the inequality and aggregation functions, [`experiment`]
//! drives a complete trajectory from a single 64-bit seed, and [`seed`]
//! derives per-run seeds for parallel sweeps.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod adoption;
pub mod econ;
mod error;
pub mod experiment;
pub mod metrics;
pub mod network;
pub mod seed;
pub mod tax;

pub use adoption::{AdoptionSpec, DynamicModelConfig};
pub use econ::{
    Agent, AgentFactory, DepreciationSchedule, Economy, FirmKind, GrowthSpec, PopulationState,
    SigmaMode, StaticModelConfig, TraditionalReference,
};
pub use error::{Error, Result};
pub use experiment::{run_experiment, simulate, ModelConfig, Scenario, Trajectory};
pub use metrics::{PeriodStats, Statistic};
pub use network::{Graph, NetworkSpec};
pub use tax::{BracketBounds, TaxPolicy};

/// Random number generator used for every simulation run.
pub type SimRng = rand_chacha::ChaCha8Rng;
