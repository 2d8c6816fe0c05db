//! Firms, growth draws, taxation of gains and bankruptcy replacement.
//!
//! This is the full period update of the static market model. The networked
//! model in [`crate::adoption`] reuses [`economic_step`] for its economic half.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::adoption::{draw_threshold, AdoptionSpec};
use crate::error::{invalid, Result};
use crate::metrics::PeriodStats;
use crate::tax::{tax_due, BracketBounds, TaxPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FirmKind {
    Traditional,
    Digital,
}

/// Mean and standard deviation of a per-period growth rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthSpec {
    pub mu: f64,
    pub sigma: f64,
}

impl GrowthSpec {
    pub const TRADITIONAL: GrowthSpec = GrowthSpec {
        mu: 0.15,
        sigma: 0.1,
    };
    pub const DIGITAL: GrowthSpec = GrowthSpec {
        mu: 1.5,
        sigma: 1.0,
    };

    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let spec = GrowthSpec { mu, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(invalid("mu", "growth mean must be finite"));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid("sigma", "growth sigma must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Linear amortisation of the digital growth surplus over `periods` periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepreciationSchedule {
    periods: u32,
}

impl DepreciationSchedule {
    pub fn new(periods: u32) -> Result<Self> {
        if periods == 0 {
            return Err(invalid("depreciation_periods", "must be positive"));
        }
        Ok(Self { periods })
    }

    pub fn periods(&self) -> u32 {
        self.periods
    }

    pub fn rate_per_period(&self) -> f64 {
        1.0 / f64::from(self.periods)
    }

    /// Share of the surplus already written off at `age`, in `[0, 1]`.
    pub fn written_off(&self, age: u32) -> f64 {
        f64::from(age.min(self.periods)) / f64::from(self.periods)
    }
}

/// How each traditional firm's growth sigma is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaMode {
    /// Every firm uses the traditional [`GrowthSpec`] sigma.
    Fixed,
    /// Each firm draws `|N(0, scale)|` once when it is created.
    HalfNormalPerAgent { scale: f64 },
}

/// Which traditional rate a digital firm depreciates towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraditionalReference {
    /// A fresh traditional draw every period.
    #[default]
    FreshDraw,
    /// The traditional mean.
    FixedMean,
}

/// Economic parameters shared by both models.
#[derive(Debug, Clone, PartialEq)]
pub struct Economy {
    pub traditional: GrowthSpec,
    pub digital: GrowthSpec,
    pub schedule: DepreciationSchedule,
    pub initial_valuation: f64,
    pub bankruptcy_floor: f64,
    pub sigma_mode: SigmaMode,
    pub traditional_reference: TraditionalReference,
}

impl Economy {
    /// Growth and valuation parameters with the given depreciation length.
    pub fn with_depreciation(periods: u32) -> Result<Self> {
        Ok(Economy {
            traditional: GrowthSpec::TRADITIONAL,
            digital: GrowthSpec::DIGITAL,
            schedule: DepreciationSchedule::new(periods)?,
            initial_valuation: 10.0,
            bankruptcy_floor: 1.0,
            sigma_mode: SigmaMode::Fixed,
            traditional_reference: TraditionalReference::FreshDraw,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.traditional.validate()?;
        self.digital.validate()?;
        if !(self.bankruptcy_floor.is_finite() && self.bankruptcy_floor >= 0.0) {
            return Err(invalid("bankruptcy_floor", "must be finite and >= 0"));
        }
        if !(self.initial_valuation.is_finite() && self.initial_valuation > self.bankruptcy_floor) {
            return Err(invalid(
                "initial_valuation",
                "must be finite and above the bankruptcy floor",
            ));
        }
        if let SigmaMode::HalfNormalPerAgent { scale } = self.sigma_mode {
            if !(scale.is_finite() && scale >= 0.0) {
                return Err(invalid("sigma_scale", "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    /// Slot index; survives replacement.
    pub id: usize,
    pub valuation: f64,
    pub kind: FirmKind,
    /// Periods since creation or last replacement.
    pub age: u32,
    /// Aspiration level: digital neighbours needed before adopting.
    pub threshold: u32,
    /// Standard deviation of this firm's traditional growth draws.
    pub trad_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    pub agents: Vec<Agent>,
    /// Number of completed periods.
    pub period: u32,
    /// Gross gains of the last completed period, in agent order. Empty before
    /// the first period.
    pub previous_gains: Vec<f64>,
}

impl PopulationState {
    pub fn valuations(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.valuation).collect()
    }
}

/// Creates initial and replacement firms.
#[derive(Debug, Clone, Copy)]
pub struct AgentFactory<'a> {
    pub economy: &'a Economy,
    /// Probability that a new firm is digital.
    pub p_digital: f64,
    /// Threshold distribution; `None` gives every firm threshold 0.
    pub adoption: Option<&'a AdoptionSpec>,
}

impl AgentFactory<'_> {
    pub fn spawn<R: Rng + ?Sized>(&self, id: usize, rng: &mut R) -> Agent {
        let kind = if rng.random_bool(self.p_digital) {
            FirmKind::Digital
        } else {
            FirmKind::Traditional
        };
        let trad_sigma = match self.economy.sigma_mode {
            SigmaMode::Fixed => self.economy.traditional.sigma,
            SigmaMode::HalfNormalPerAgent { scale } => {
                let z: f64 = rng.sample(StandardNormal);
                libm::fabs(scale * z)
            }
        };
        let threshold = self.adoption.map_or(0, |spec| draw_threshold(spec, rng));
        Agent {
            id,
            valuation: self.economy.initial_valuation,
            kind,
            age: 0,
            threshold,
            trad_sigma,
        }
    }

    pub fn populate<R: Rng + ?Sized>(&self, n_agents: usize, rng: &mut R) -> PopulationState {
        PopulationState {
            agents: (0..n_agents).map(|id| self.spawn(id, rng)).collect(),
            period: 0,
            previous_gains: Vec::new(),
        }
    }
}

/// A fresh raw growth draw for `kind`. Traditional draws use the agent's own
/// sigma; digital draws use the economy's digital spec.
pub fn draw_growth_rate<R: Rng + ?Sized>(
    kind: FirmKind,
    economy: &Economy,
    agent: &Agent,
    rng: &mut R,
) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    match kind {
        FirmKind::Traditional => economy.traditional.mu + agent.trad_sigma * z,
        FirmKind::Digital => economy.digital.mu + economy.digital.sigma * z,
    }
}

/// Digital rate after writing off `min(age, D)/D` of its surplus over twice
/// the traditional rate. At `age >= D` this is exactly `2 * raw_traditional`.
pub fn effective_digital_rate(
    raw_digital: f64,
    raw_traditional: f64,
    age: u32,
    schedule: &DepreciationSchedule,
) -> f64 {
    let floor_rate = 2.0 * raw_traditional;
    if age >= schedule.periods() {
        return floor_rate;
    }
    raw_digital - schedule.written_off(age) * (raw_digital - floor_rate)
}

/// The growth rate an agent realises this period.
pub fn period_growth_rate<R: Rng + ?Sized>(agent: &Agent, economy: &Economy, rng: &mut R) -> f64 {
    match agent.kind {
        FirmKind::Traditional => draw_growth_rate(FirmKind::Traditional, economy, agent, rng),
        FirmKind::Digital => {
            let raw_digital = draw_growth_rate(FirmKind::Digital, economy, agent, rng);
            let raw_traditional = match economy.traditional_reference {
                TraditionalReference::FreshDraw => {
                    draw_growth_rate(FirmKind::Traditional, economy, agent, rng)
                }
                TraditionalReference::FixedMean => economy.traditional.mu,
            };
            effective_digital_rate(raw_digital, raw_traditional, agent.age, &economy.schedule)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub gross_gain: f64,
    pub tax_paid: f64,
}

/// Applies one period of growth and tax to `agent` and ages it by one.
pub fn step_agent(
    agent: &mut Agent,
    rate: f64,
    policy: &TaxPolicy,
    bounds: &BracketBounds,
) -> StepOutcome {
    let gross_gain = agent.valuation * rate;
    let tax_paid = tax_due(gross_gain, policy, bounds);
    agent.valuation += gross_gain - tax_paid;
    agent.age += 1;
    StepOutcome {
        gross_gain,
        tax_paid,
    }
}

/// Replaces a firm that fell strictly below the bankruptcy floor with a new
/// one in the same slot. Returns whether a replacement happened.
pub fn replace_if_bankrupt<R: Rng + ?Sized>(
    agent: &mut Agent,
    factory: &AgentFactory<'_>,
    rng: &mut R,
) -> bool {
    if agent.valuation >= factory.economy.bankruptcy_floor {
        return false;
    }
    *agent = factory.spawn(agent.id, rng);
    true
}

/// Per-period bookkeeping filled in by [`economic_step`].
#[derive(Debug, Default)]
pub(crate) struct PeriodLedger {
    pub gains: Vec<f64>,
    pub bankruptcies: usize,
}

impl PeriodLedger {
    pub fn new(n: usize) -> Self {
        Self {
            gains: alloc::vec![0.0; n],
            bankruptcies: 0,
        }
    }
}

/// Growth draw, tax and bankruptcy check for the agent in slot `idx`.
pub(crate) fn economic_step<R: Rng + ?Sized>(
    agent: &mut Agent,
    factory: &AgentFactory<'_>,
    policy: &TaxPolicy,
    bounds: &BracketBounds,
    ledger: &mut PeriodLedger,
    rng: &mut R,
) {
    let rate = period_growth_rate(agent, factory.economy, rng);
    let outcome = step_agent(agent, rate, policy, bounds);
    ledger.gains[agent.id] = outcome.gross_gain;
    if replace_if_bankrupt(agent, factory, rng) {
        ledger.bankruptcies += 1;
    }
}

/// Fresh uniform activation order over `n` slots.
pub(crate) fn activation_order<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Closes a period: stores its gains for the next brackets and computes stats.
pub(crate) fn close_period(pop: &mut PopulationState, ledger: PeriodLedger) -> PeriodStats {
    pop.period += 1;
    pop.previous_gains = ledger.gains;
    PeriodStats::measure(pop, ledger.bankruptcies)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticModelConfig {
    pub n_agents: usize,
    pub n_periods: u32,
    pub p_digital: f64,
    pub economy: Economy,
}

impl Default for StaticModelConfig {
    fn default() -> Self {
        StaticModelConfig {
            n_agents: 10_000,
            n_periods: 10,
            p_digital: 0.0,
            economy: Economy::with_depreciation(10).expect("10 periods is a valid schedule"),
        }
    }
}

impl StaticModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(invalid("n_agents", "must be at least 1"));
        }
        if self.n_periods == 0 {
            return Err(invalid("n_periods", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_digital) {
            return Err(invalid("p_digital", "must lie in [0, 1]"));
        }
        self.economy.validate()
    }

    pub fn factory(&self) -> AgentFactory<'_> {
        AgentFactory {
            economy: &self.economy,
            p_digital: self.p_digital,
            adoption: None,
        }
    }
}

/// One period of the static model: every agent is visited once, in a fresh
/// random order, and grows, pays tax and is replaced if bankrupt.
pub fn run_static_period<R: Rng + ?Sized>(
    pop: &mut PopulationState,
    config: &StaticModelConfig,
    policy: &TaxPolicy,
    rng: &mut R,
) -> PeriodStats {
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
    }
    close_period(pop, ledger)
}
