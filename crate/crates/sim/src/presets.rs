//! Built-in experiment plans, each at full scale and at desk scale.
//!
//! Full scale uses the reference parameters (10,000 firms and 1,000
//! runs for the static model; 1,000 firms with 100 neighbours for the
//! networked one). Desk scale keeps every other parameter but shrinks the
//! population and run count so a plan finishes in seconds to minutes.

use crate::config::parse_config;
use crate::error::ConfigError;
use crate::plan::ExperimentPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Desk,
}

pub struct Preset {
    pub name: String,
    pub description: &'static str,
    pub config: String,
}

impl Preset {
    pub fn plan(&self) -> Result<ExperimentPlan, ConfigError> {
        parse_config(&self.config)
    }
}

const MASTER_SEED: u64 = 20_231_101;

struct Spec {
    name: &'static str,
    description: &'static str,
    dynamic: bool,
    body: &'static str,
}

const SPECS: &[Spec] = &[
    Spec {
        name: "baseline",
        description: "traditional firms only, growth sigma 0.1 / 0.5 / 1 (gain distributions and Gini growth)",
        dynamic: false,
        body: "sweep.sigma = 0.1, 0.5, 1\n",
    },
    Spec {
        name: "digital-mix",
        description: "digital share 1% / 30% / 100% with fixed traditional sigma",
        dynamic: false,
        body: "sweep.p_digital = 0.01, 0.3, 1\n",
    },
    Spec {
        name: "infiltration",
        description: "per-firm half-normal sigma scale x digital share (inverted U)",
        dynamic: false,
        body: "sigma_mode = half_normal\nsweep.sigma_scale = 0.1, 0.5, 1\nsweep.p_digital = 0, 0.01, 0.1, 0.2, 0.3, 0.5, 0.7, 1\n",
    },
    Spec {
        name: "tax-traditional",
        description: "growth sigma x moderate / high progressive tax, traditional firms only",
        dynamic: false,
        body: "sweep.sigma = 0.1, 0.25, 0.5, 0.75, 1\nsweep.tax = moderate, high\n",
    },
    Spec {
        name: "tax-mix",
        description: "digital share x moderate / high / extra-high progressive tax",
        dynamic: false,
        body: "sweep.p_digital = 0.01, 0.1, 0.3, 0.5, 0.7, 1\nsweep.tax = moderate, high, extra_high\n",
    },
    Spec {
        name: "tax-infiltration",
        description: "digital share x half-normal sigma scale x progressive tax",
        dynamic: false,
        body: "sigma_mode = half_normal\nsweep.sigma_scale = 0.1, 0.5, 1\nsweep.p_digital = 0.01, 0.1, 0.3, 0.5, 0.7, 1\nsweep.tax = moderate, high, extra_high\n",
    },
    Spec {
        name: "topology",
        description: "networked adoption across the small-world beta continuum",
        dynamic: true,
        body: "sweep.beta = 0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 1\n",
    },
    Spec {
        name: "topology-tax",
        description: "networked adoption, beta x flat / moderate / high tax",
        dynamic: true,
        body: "sweep.beta = 0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7, 1\nsweep.tax = flat15, moderate, high\n",
    },
    Spec {
        name: "misfits",
        description: "aspiration threshold mean 7 / 9 x threshold sigma 0 .. 2.5 across beta",
        dynamic: true,
        body: "sweep.threshold_mu = 7, 9\nsweep.threshold_sigma = 0, 1.5, 2, 2.5\nsweep.beta = 0.01, 0.1, 0.2, 0.5, 1\n",
    },
];

fn header(dynamic: bool, scale: Scale) -> &'static str {
    match (dynamic, scale) {
        (false, Scale::Full) => "model = static\nn_agents = 10000\nn_runs = 1000\n",
        (false, Scale::Desk) => "model = static\nn_agents = 1000\nn_runs = 200\n",
        (true, Scale::Full) => "model = dynamic\nn_agents = 1000\nk = 100\nn_runs = 1000\n",
        (true, Scale::Desk) => "model = dynamic\nn_agents = 500\nk = 50\nn_runs = 30\n",
    }
}

/// Every preset, full scale first then desk scale for each plan.
pub fn presets() -> Vec<Preset> {
    SPECS
        .iter()
        .flat_map(|spec| {
            [(Scale::Full, "full"), (Scale::Desk, "desk")].map(|(scale, suffix)| Preset {
                name: format!("{}-{suffix}", spec.name),
                description: spec.description,
                config: format!(
                    "# {}\n{}master_seed = {MASTER_SEED}\n{}",
                    spec.description,
                    header(spec.dynamic, scale),
                    spec.body
                ),
            })
        })
        .collect()
}

pub fn find(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        let all = presets();
        assert_eq!(all.len(), 2 * SPECS.len());
        for p in &all {
            let plan = p.plan().unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert!(plan.n_runs >= 1);
        }
    }

    #[test]
    fn topology_has_eleven_points() {
        let plan = find("topology-full").unwrap().plan().unwrap();
        assert_eq!(plan.grid_points().len(), 11);
        assert_eq!(plan.n_runs, 1000);
        assert!(find("topology-huge").is_none());
    }
}
