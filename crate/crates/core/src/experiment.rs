//! One complete simulation trajectory from a configuration and a seed.

use alloc::vec::Vec;

use rand::SeedableRng;

use crate::adoption::{run_dynamic_period, DynamicModelConfig};
use crate::econ::{run_static_period, StaticModelConfig};
use crate::error::Result;
use crate::metrics::PeriodStats;
use crate::network::generate_nws;
use crate::tax::TaxPolicy;
use crate::SimRng;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Static(StaticModelConfig),
    Dynamic(DynamicModelConfig),
}

impl ModelConfig {
    pub fn n_periods(&self) -> u32 {
        match self {
            ModelConfig::Static(c) => c.n_periods,
            ModelConfig::Dynamic(c) => c.n_periods,
        }
    }

    pub fn n_agents(&self) -> usize {
        match self {
            ModelConfig::Static(c) => c.n_agents,
            ModelConfig::Dynamic(c) => c.n_agents,
        }
    }
}

/// A model configuration together with the tax policy it runs under.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: ModelConfig,
    pub tax: TaxPolicy,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match &self.model {
            ModelConfig::Static(c) => c.validate(),
            ModelConfig::Dynamic(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// One entry per period, periods `1..=n_periods`.
    pub stats: Vec<PeriodStats>,
    pub final_valuations: Vec<f64>,
}

/// Runs `scenario` to completion. Every random draw comes from a generator
/// seeded with `seed` alone; the networked model draws its graph first.
pub fn simulate(scenario: &Scenario, seed: u64) -> Result<Trajectory> {
    scenario.validate()?;
    let mut rng = SimRng::seed_from_u64(seed);
    let tax = &scenario.tax;
    let mut stats = Vec::with_capacity(scenario.model.n_periods() as usize);
    let final_pop = match &scenario.model {
        ModelConfig::Static(config) => {
            let mut pop = config.factory().populate(config.n_agents, &mut rng);
            for _ in 0..config.n_periods {
                stats.push(run_static_period(&mut pop, config, tax, &mut rng));
            }
            pop
        }
        ModelConfig::Dynamic(config) => {
            let graph = generate_nws(&config.network_spec(), &mut rng)?;
            let mut pop = config.factory().populate(config.n_agents, &mut rng);
            for _ in 0..config.n_periods {
                stats.push(run_dynamic_period(&mut pop, &graph, config, tax, &mut rng));
            }
            pop
        }
    };
    Ok(Trajectory {
        stats,
        final_valuations: final_pop.valuations(),
    })
}

pub fn run_experiment(scenario: &Scenario, seed: u64) -> Result<Vec<PeriodStats>> {
    simulate(scenario, seed).map(|t| t.stats)
}
