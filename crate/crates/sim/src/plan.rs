//! Experiment plans: a base scenario, sweep axes and Monte Carlo settings.

use std::fmt;

use misfit_core::{ModelConfig, Scenario, SigmaMode, TaxPolicy};

use crate::error::ConfigError;
use crate::format::format_sig9;

/// Parameters that can be swept. Variant order is alphabetical by name, which
/// is also the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Beta,
    PDigital,
    Sigma,
    SigmaScale,
    Tax,
    ThresholdMu,
    ThresholdSigma,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Axis::Beta,
        Axis::PDigital,
        Axis::Sigma,
        Axis::SigmaScale,
        Axis::Tax,
        Axis::ThresholdMu,
        Axis::ThresholdSigma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Beta => "beta",
            Axis::PDigital => "p_digital",
            Axis::Sigma => "sigma",
            Axis::SigmaScale => "sigma_scale",
            Axis::Tax => "tax",
            Axis::ThresholdMu => "threshold_mu",
            Axis::ThresholdSigma => "threshold_sigma",
        }
    }

    pub fn from_name(name: &str) -> Option<Axis> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Whether the axis refers to a field of the given model.
    pub fn applies_to(self, model: &ModelConfig) -> bool {
        matches!(
            (self, model),
            (Axis::Sigma | Axis::Tax, _)
                | (Axis::PDigital | Axis::SigmaScale, ModelConfig::Static(_))
                | (
                    Axis::Beta | Axis::ThresholdMu | Axis::ThresholdSigma,
                    ModelConfig::Dynamic(_)
                )
        )
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValue {
    Number(f64),
    /// Tax preset name.
    Name(String),
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisValue::Number(x) => f.write_str(&format_sig9(*x)),
            AxisValue::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub axis: Axis,
    pub values: Vec<AxisValue>,
}

/// One combination of sweep-axis values, in axis order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridPoint {
    pub values: Vec<(Axis, AxisValue)>,
}

impl GridPoint {
    pub fn get(&self, axis: Axis) -> Option<&AxisValue> {
        self.values.iter().find(|(a, _)| *a == axis).map(|(_, v)| v)
    }

    pub fn number(&self, axis: Axis) -> Option<f64> {
        match self.get(axis) {
            Some(AxisValue::Number(x)) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return f.write_str("<base>");
        }
        for (i, (axis, value)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{axis}={value}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub base: Scenario,
    /// Sorted by axis, no duplicates.
    pub axes: Vec<SweepAxis>,
    pub n_runs: u32,
    pub master_seed: u64,
}

impl ExperimentPlan {
    pub fn single(base: Scenario, n_runs: u32, master_seed: u64) -> Self {
        ExperimentPlan {
            base,
            axes: Vec::new(),
            n_runs,
            master_seed,
        }
    }

    pub fn axis_names(&self) -> Vec<&'static str> {
        self.axes.iter().map(|a| a.axis.name()).collect()
    }

    /// Cartesian product of the sweep axes; the last axis varies fastest.
    /// A plan without axes has a single empty grid point.
    pub fn grid_points(&self) -> Vec<GridPoint> {
        let mut points = vec![GridPoint::default()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |v| {
                        let mut next = p.clone();
                        next.values.push((axis.axis, v.clone()));
                        next
                    })
                })
                .collect();
        }
        points
    }

    /// The base scenario with `point`'s values applied and validated.
    pub fn scenario_at(&self, point: &GridPoint) -> Result<Scenario, ConfigError> {
        let mut scenario = self.base.clone();
        for (axis, value) in &point.values {
            apply(&mut scenario, *axis, value)?;
        }
        scenario
            .validate()
            .map_err(|source| ConfigError::InvalidGridPoint {
                point: point.to_string(),
                source,
            })?;
        Ok(scenario)
    }
}

fn apply(scenario: &mut Scenario, axis: Axis, value: &AxisValue) -> Result<(), ConfigError> {
    let not_applicable = || ConfigError::NotApplicable {
        key: format!("sweep.{axis}"),
    };
    if let AxisValue::Name(name) = value {
        if axis != Axis::Tax {
            return Err(not_applicable());
        }
        scenario.tax = TaxPolicy::preset(name).ok_or_else(|| ConfigError::InvalidValue {
            key: "sweep.tax".into(),
            value: name.clone(),
            reason: "unknown tax preset".into(),
        })?;
        return Ok(());
    }
    let AxisValue::Number(x) = *value else {
        unreachable!()
    };
    match (&mut scenario.model, axis) {
        (ModelConfig::Static(c), Axis::Sigma) => c.economy.traditional.sigma = x,
        (ModelConfig::Dynamic(c), Axis::Sigma) => c.economy.traditional.sigma = x,
        (ModelConfig::Static(c), Axis::PDigital) => c.p_digital = x,
        (ModelConfig::Static(c), Axis::SigmaScale) => {
            c.economy.sigma_mode = SigmaMode::HalfNormalPerAgent { scale: x }
        }
        (ModelConfig::Dynamic(c), Axis::Beta) => c.beta = x,
        (ModelConfig::Dynamic(c), Axis::ThresholdMu) => c.adoption.threshold_mu = x,
        (ModelConfig::Dynamic(c), Axis::ThresholdSigma) => c.adoption.threshold_sigma = x,
        _ => return Err(not_applicable()),
    }
    Ok(())
}
