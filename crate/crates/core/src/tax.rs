//! Flat and progressive taxation of per-period gains.
//!
//! Progressive schedules tax each slice of a gain at the rate of the bracket
//! the slice falls in. Bracket thresholds are the nearest-rank quantiles of
//! the gains every agent realised in the previous period; before any period
//! has run, a fixed set of initial thresholds is used instead.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Standard quartile cut points used by all built-in progressive presets.
pub const QUARTILES: [f64; 3] = [0.25, 0.5, 0.75];

/// Thresholds used for the very first period, when no gains exist yet.
pub const FIRST_PERIOD_THRESHOLDS: [f64; 3] = [10.0, 20.0, 30.0];

/// Names accepted by [`TaxPolicy::preset`].
pub const PRESET_NAMES: [&str; 4] = ["flat15", "moderate", "high", "extra_high"];

#[derive(Debug, Clone, PartialEq)]
pub enum TaxPolicy {
    Flat { rate: f64 },
    Progressive(ProgressiveSchedule),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgressiveSchedule {
    quantiles: Vec<f64>,
    rates: Vec<f64>,
    initial_thresholds: Vec<f64>,
}

/// Currency thresholds separating the brackets of a progressive schedule.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BracketBounds {
    pub thresholds: Vec<f64>,
}

impl ProgressiveSchedule {
    /// `rates` must hold one entry more than `quantiles`; `initial_thresholds`
    /// one entry per quantile.
    pub fn new(quantiles: &[f64], rates: &[f64], initial_thresholds: &[f64]) -> Result<Self> {
        if quantiles.is_empty() {
            return Err(invalid("quantiles", "at least one quantile is required"));
        }
        if quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return Err(invalid(
                "quantiles",
                "quantiles must lie strictly inside (0, 1)",
            ));
        }
        if quantiles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("quantiles", "quantiles must be strictly ascending"));
        }
        if rates.len() != quantiles.len() + 1 {
            return Err(invalid(
                "rates",
                "expected exactly one more rate than quantiles",
            ));
        }
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(invalid("rates", "rates must lie in [0, 1]"));
        }
        if initial_thresholds.len() != quantiles.len() {
            return Err(invalid(
                "initial_thresholds",
                "expected one initial threshold per quantile",
            ));
        }
        if initial_thresholds.iter().any(|t| !t.is_finite())
            || initial_thresholds.windows(2).any(|w| w[0] > w[1])
        {
            return Err(invalid(
                "initial_thresholds",
                "thresholds must be finite and non-decreasing",
            ));
        }
        Ok(Self {
            quantiles: quantiles.to_vec(),
            rates: rates.to_vec(),
            initial_thresholds: initial_thresholds.to_vec(),
        })
    }

    /// Quartile schedule with the first-period thresholds (10, 20, 30).
    pub fn quartiles(rates: [f64; 4]) -> Self {
        Self::new(&QUARTILES, &rates, &FIRST_PERIOD_THRESHOLDS)
            .expect("built-in quartile schedule is valid")
    }

    pub fn quantiles(&self) -> &[f64] {
        &self.quantiles
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn initial_thresholds(&self) -> &[f64] {
        &self.initial_thresholds
    }
}

impl TaxPolicy {
    pub fn flat(rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(invalid("rate", "flat rate must lie in [0, 1]"));
        }
        Ok(TaxPolicy::Flat { rate })
    }

    /// Built-in schedules: `flat15`, `moderate`, `high` and `extra_high`.
    pub fn preset(name: &str) -> Option<Self> {
        let policy = match name {
            "flat15" => TaxPolicy::Flat { rate: 0.15 },
            "moderate" => {
                TaxPolicy::Progressive(ProgressiveSchedule::quartiles([0.10, 0.15, 0.25, 0.30]))
            }
            "high" => {
                TaxPolicy::Progressive(ProgressiveSchedule::quartiles([0.15, 0.25, 0.50, 0.70]))
            }
            "extra_high" => {
                TaxPolicy::Progressive(ProgressiveSchedule::quartiles([0.10, 0.15, 0.30, 0.90]))
            }
            _ => return None,
        };
        Some(policy)
    }

    /// Brackets for the coming period given last period's gains.
    /// Flat policies have no brackets.
    pub fn brackets(&self, previous_gains: &[f64]) -> BracketBounds {
        match self {
            TaxPolicy::Flat { .. } => BracketBounds::default(),
            TaxPolicy::Progressive(schedule) => compute_brackets(
                previous_gains,
                &schedule.quantiles,
                &schedule.initial_thresholds,
            ),
        }
    }

    pub fn max_rate(&self) -> f64 {
        match self {
            TaxPolicy::Flat { rate } => *rate,
            TaxPolicy::Progressive(s) => s.rates.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Nearest-rank quantiles of `previous_gains`, or `initial_thresholds` when
/// there are no previous gains.
pub fn compute_brackets(
    previous_gains: &[f64],
    quantiles: &[f64],
    initial_thresholds: &[f64],
) -> BracketBounds {
    if previous_gains.is_empty() {
        return BracketBounds {
            thresholds: initial_thresholds.to_vec(),
        };
    }
    let mut sorted = previous_gains.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let thresholds = quantiles
        .iter()
        .map(|&q| sorted[nearest_rank(q, sorted.len()) - 1])
        .collect();
    BracketBounds { thresholds }
}

/// 1-based rank `ceil(q * n)`, clamped to `1..=n`. Products that land within
/// rounding noise of an integer are snapped to it so that e.g. `0.1 * 30`
/// selects rank 3.
fn nearest_rank(q: f64, n: usize) -> usize {
    let x = q * n as f64;
    let snapped = libm::round(x);
    let rank = if libm::fabs(x - snapped) <= 1e-9 * x.max(1.0) {
        snapped
    } else {
        libm::ceil(x)
    };
    (rank as usize).clamp(1, n)
}

/// Tax owed on a single gain. Non-positive gains are never taxed.
pub fn tax_due(gain: f64, policy: &TaxPolicy, bounds: &BracketBounds) -> f64 {
    if gain <= 0.0 {
        return 0.0;
    }
    match policy {
        TaxPolicy::Flat { rate } => rate * gain,
        TaxPolicy::Progressive(schedule) => marginal_tax(gain, &schedule.rates, &bounds.thresholds),
    }
}

fn marginal_tax(gain: f64, rates: &[f64], thresholds: &[f64]) -> f64 {
    // Bracket i covers [t_{i-1}, t_i) with t_{-1} = 0 and the last bracket
    // open-ended. Thresholds below zero collapse their bracket to nothing.
    let mut lower = 0.0_f64;
    let mut due = 0.0;
    for (i, &rate) in rates.iter().enumerate() {
        let upper = thresholds.get(i).map_or(f64::INFINITY, |t| t.max(lower));
        if gain <= lower {
            break;
        }
        due += rate * (gain.min(upper) - lower);
        lower = upper;
    }
    due
}
