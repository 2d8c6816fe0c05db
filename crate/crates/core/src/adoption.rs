//! Socially validated digital adoption on a small-world graph.
//!
//! Each period runs the same economic update as the static model, agent by
//! agent in random order. Right after its own update, a traditional agent
//! whose valuation is below its neighbourhood mean counts the digital
//! neighbours that are worth strictly more than itself; if that count reaches
//! its aspiration threshold it turns digital and keeps its age. Updates are
//! sequential, so later agents see the adoptions of earlier ones.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::econ::{
    activation_order, close_period, economic_step, Agent, AgentFactory, Economy, FirmKind,
    PeriodLedger, PopulationState,
};
use crate::error::{invalid, Result};
use crate::metrics::PeriodStats;
use crate::network::{Graph, NetworkSpec};
use crate::tax::TaxPolicy;

/// Distribution of the per-agent aspiration threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdoptionSpec {
    pub threshold_mu: f64,
    pub threshold_sigma: f64,
}

impl Default for AdoptionSpec {
    fn default() -> Self {
        AdoptionSpec {
            threshold_mu: 5.0,
            threshold_sigma: 0.1,
        }
    }
}

impl AdoptionSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold_mu.is_finite() {
            return Err(invalid("threshold_mu", "must be finite"));
        }
        if !(self.threshold_sigma.is_finite() && self.threshold_sigma >= 0.0) {
            return Err(invalid("threshold_sigma", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Nearest integer (halves away from zero), clamped at zero.
pub fn threshold_from_sample(sample: f64) -> u32 {
    let rounded = libm::round(sample);
    if rounded <= 0.0 {
        0
    } else if rounded >= f64::from(u32::MAX) {
        u32::MAX
    } else {
        rounded as u32
    }
}

pub fn draw_threshold<R: Rng + ?Sized>(spec: &AdoptionSpec, rng: &mut R) -> u32 {
    let z: f64 = rng.sample(StandardNormal);
    threshold_from_sample(spec.threshold_mu + spec.threshold_sigma * z)
}

/// True iff `valuation` is strictly below the mean of `neighborhood`.
/// An empty neighbourhood never triggers consideration.
pub fn consider_transformation<I>(valuation: f64, neighborhood: I) -> bool
where
    I: IntoIterator<Item = f64>,
{
    let (sum, count) = neighborhood
        .into_iter()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    count > 0 && valuation < sum / count as f64
}

/// True iff at least `agent.threshold` of the given neighbours are digital
/// and worth strictly more than `agent`.
pub fn adoption_decision<'a, I>(agent: &Agent, neighbors: I) -> bool
where
    I: IntoIterator<Item = &'a Agent>,
{
    let threshold = agent.threshold as usize;
    if threshold == 0 {
        return true;
    }
    neighbors
        .into_iter()
        .filter(|n| n.kind == FirmKind::Digital && n.valuation > agent.valuation)
        .take(threshold)
        .count()
        >= threshold
}

/// Runs the consideration and decision rules for the agent at `node` and
/// flips it to digital if both pass. Returns whether it adopted.
pub fn try_adopt(agents: &mut [Agent], graph: &Graph, node: usize) -> bool {
    let agent = &agents[node];
    if agent.kind != FirmKind::Traditional {
        return false;
    }
    let neighborhood = graph.neighbors(node).expect("one agent per graph node");
    let considering = consider_transformation(
        agent.valuation,
        neighborhood.iter().map(|&j| agents[j].valuation),
    );
    if considering && adoption_decision(agent, neighborhood.iter().map(|&j| &agents[j])) {
        agents[node].kind = FirmKind::Digital;
        return true;
    }
    false
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicModelConfig {
    pub n_agents: usize,
    pub n_periods: u32,
    /// Probability that an initial or replacement firm is digital.
    pub seed_digital_fraction: f64,
    /// Lattice degree of the small-world graph.
    pub k: usize,
    pub beta: f64,
    pub adoption: AdoptionSpec,
    pub economy: Economy,
}

impl Default for DynamicModelConfig {
    fn default() -> Self {
        DynamicModelConfig {
            n_agents: 1_000,
            n_periods: 100,
            seed_digital_fraction: 0.01,
            k: 100,
            beta: 0.1,
            adoption: AdoptionSpec::default(),
            economy: Economy::with_depreciation(30).expect("30 periods is a valid schedule"),
        }
    }
}

impl DynamicModelConfig {
    pub fn network_spec(&self) -> NetworkSpec {
        NetworkSpec {
            n: self.n_agents,
            k: self.k,
            beta: self.beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_periods == 0 {
            return Err(invalid("n_periods", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.seed_digital_fraction) {
            return Err(invalid("seed_digital_fraction", "must lie in [0, 1]"));
        }
        self.network_spec().validate()?;
        self.adoption.validate()?;
        self.economy.validate()
    }

    pub fn factory(&self) -> AgentFactory<'_> {
        AgentFactory {
            economy: &self.economy,
            p_digital: self.seed_digital_fraction,
            adoption: Some(&self.adoption),
        }
    }
}

/// One period of the networked model. Agent `i` sits on node `i`.
pub fn run_dynamic_period<R: Rng + ?Sized>(
    pop: &mut PopulationState,
    graph: &Graph,
    config: &DynamicModelConfig,
    policy: &TaxPolicy,
    rng: &mut R,
) -> PeriodStats {
    debug_assert_eq!(pop.agents.len(), graph.node_count());
    let factory = config.factory();
    let bounds = policy.brackets(&pop.previous_gains);
    let mut ledger = PeriodLedger::new(pop.agents.len());
    for idx in activation_order(pop.agents.len(), rng) {
        economic_step(
            &mut pop.agents[idx],
            &factory,
            policy,
            &bounds,
            &mut ledger,
            rng,
        );
        try_adopt(&mut pop.agents, graph, idx);
    }
    close_period(pop, ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::ring_lattice;
    use crate::SimRng;
    use alloc::vec::Vec;
    use rand::SeedableRng;

    fn firm(id: usize, valuation: f64, kind: FirmKind, threshold: u32) -> Agent {
        Agent {
            id,
            valuation,
            kind,
            age: 0,
            threshold,
            trad_sigma: 0.1,
        }
    }

    #[test]
    fn threshold_rounding_and_clamp() {
        assert_eq!(threshold_from_sample(-0.4), 0);
        assert_eq!(threshold_from_sample(-7.0), 0);
        assert_eq!(threshold_from_sample(4.5), 5);
        assert_eq!(threshold_from_sample(4.49), 4);
        assert_eq!(threshold_from_sample(5.0), 5);
    }

    #[test]
    fn zero_variance_threshold() {
        let spec = AdoptionSpec {
            threshold_mu: 5.0,
            threshold_sigma: 0.0,
        };
        let mut rng = SimRng::seed_from_u64(2);
        assert!((0..1000).all(|_| draw_threshold(&spec, &mut rng) == 5));
    }

    #[test]
    fn consideration_is_strict() {
        assert!(consider_transformation(5.0, [7.0, 7.0]));
        assert!(!consider_transformation(7.0, [6.0, 8.0]));
        assert!(!consider_transformation(9.0, [1.0, 2.0, 3.0]));
        assert!(!consider_transformation(9.0, []));
    }

    #[test]
    fn decision_counts_richer_digital_neighbours() {
        let me = firm(0, 10.0, FirmKind::Traditional, 5);
        let rich: Vec<Agent> = (1..=6)
            .map(|i| firm(i, 20.0, FirmKind::Digital, 0))
            .collect();
        assert!(adoption_decision(&me, &rich));
        assert!(!adoption_decision(&me, &rich[..4]));
        // equal valuation and traditional neighbours do not count
        let mut mixed = rich[..4].to_vec();
        mixed.push(firm(7, 10.0, FirmKind::Digital, 0));
        mixed.push(firm(8, 50.0, FirmKind::Traditional, 0));
        assert!(!adoption_decision(&me, &mixed));
        let misfit = firm(0, 10.0, FirmKind::Traditional, 0);
        assert!(adoption_decision(&misfit, &[]));
    }

    #[test]
    fn adopter_keeps_its_age() {
        let graph = ring_lattice(3, 2);
        let mut agents = alloc::vec![
            firm(0, 5.0, FirmKind::Traditional, 1),
            firm(1, 50.0, FirmKind::Digital, 1),
            firm(2, 5.0, FirmKind::Traditional, 1),
        ];
        agents[0].age = 12;
        assert!(try_adopt(&mut agents, &graph, 0));
        assert_eq!(agents[0].kind, FirmKind::Digital);
        assert_eq!(agents[0].age, 12);
        assert!(!try_adopt(&mut agents, &graph, 1));
    }
}
