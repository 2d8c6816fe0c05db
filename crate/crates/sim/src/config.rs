//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # progressive tax against growth volatility
//! model = static
//! n_agents = 1000
//! n_runs = 200
//! tax = high
//! sweep.sigma = 0.1, 0.5, 1
//! sweep.tax = moderate, high
//! ```
//!
//! Blank lines and `#` comments are ignored. Only `model` is required; every
//! other key defaults to the reference value for that model. Unknown keys,
//! duplicate keys and keys that belong to the other model are errors.

use std::collections::BTreeMap;

use misfit_core::econ::TraditionalReference;
use misfit_core::tax::PRESET_NAMES;
use misfit_core::{
    DepreciationSchedule, DynamicModelConfig, ModelConfig, Scenario, SigmaMode, StaticModelConfig,
    TaxPolicy,
};

use crate::error::ConfigError;
use crate::plan::{Axis, AxisValue, ExperimentPlan, SweepAxis};

pub const DEFAULT_RUNS: u32 = 1_000;

const COMMON_KEYS: &[&str] = &[
    "model",
    "n_agents",
    "n_periods",
    "n_runs",
    "master_seed",
    "tax",
    "trad_mu",
    "sigma",
    "digital_mu",
    "digital_sigma",
    "depreciation_periods",
    "initial_valuation",
    "bankruptcy_floor",
    "traditional_reference",
];
const STATIC_KEYS: &[&str] = &["p_digital", "sigma_mode", "sigma_scale"];
const DYNAMIC_KEYS: &[&str] = &[
    "seed_digital_fraction",
    "k",
    "beta",
    "threshold_mu",
    "threshold_sigma",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn invalid(key: &str, value: &str, reason: &str) -> ConfigError {
        ConfigError::InvalidValue {
            key: key.into(),
            value: value.into(),
            reason: reason.into(),
        }
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_number(key, v),
        }
    }

    fn probability(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let x = self.number(key, default)?;
        check_probability(key, x)?;
        Ok(x)
    }

    fn non_negative(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let x = self.number(key, default)?;
        check_non_negative(key, x)?;
        Ok(x)
    }

    fn integer<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Self::invalid(key, v, "expected a non-negative integer")),
        }
    }

    fn positive<T>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T: std::str::FromStr + PartialOrd + Default,
    {
        let x = self.integer(key, default)?;
        if x <= T::default() {
            return Err(Self::invalid(
                key,
                self.raw(key).unwrap_or(""),
                "must be positive",
            ));
        }
        Ok(x)
    }
}

fn parse_number(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Entries::invalid(key, v, "expected a finite number")),
    }
}

fn check_probability(key: &str, x: f64) -> Result<(), ConfigError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Entries::invalid(key, &x.to_string(), "must lie in [0, 1]"));
    }
    Ok(())
}

fn check_non_negative(key: &str, x: f64) -> Result<(), ConfigError> {
    if x < 0.0 {
        return Err(Entries::invalid(key, &x.to_string(), "must be >= 0"));
    }
    Ok(())
}

fn tax_preset(key: &str, name: &str) -> Result<TaxPolicy, ConfigError> {
    TaxPolicy::preset(name).ok_or_else(|| {
        Entries::invalid(
            key,
            name,
            &format!("expected one of {}", PRESET_NAMES.join(", ")),
        )
    })
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: line_no,
                text: raw.trim().to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax {
                line: line_no,
                text: raw.trim().to_string(),
            });
        }
        if map
            .insert(key.to_string(), (line_no, value.to_string()))
            .is_some()
        {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                key: key.to_string(),
            });
        }
    }
    Ok(Entries { map })
}

/// Parses a configuration file's contents into a validated plan.
pub fn parse_config(text: &str) -> Result<ExperimentPlan, ConfigError> {
    let entries = tokenize(text)?;
    let model_name = entries
        .raw("model")
        .ok_or_else(|| ConfigError::MissingKey {
            key: "model".into(),
        })?;
    let is_static = match model_name {
        "static" => true,
        "dynamic" => false,
        other => {
            return Err(Entries::invalid(
                "model",
                other,
                "expected `static` or `dynamic`",
            ))
        }
    };

    for (key, (line, _)) in &entries.map {
        let own = if is_static { STATIC_KEYS } else { DYNAMIC_KEYS };
        let other = if is_static { DYNAMIC_KEYS } else { STATIC_KEYS };
        if let Some(axis) = key.strip_prefix("sweep.") {
            if Axis::from_name(axis).is_none() {
                return Err(ConfigError::UnknownKey {
                    line: *line,
                    key: key.clone(),
                });
            }
        } else if other.contains(&key.as_str()) {
            return Err(ConfigError::NotApplicable { key: key.clone() });
        } else if !COMMON_KEYS.contains(&key.as_str()) && !own.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                line: *line,
                key: key.clone(),
            });
        }
    }

    let model = if is_static {
        ModelConfig::Static(static_config(&entries)?)
    } else {
        ModelConfig::Dynamic(dynamic_config(&entries)?)
    };
    let tax = tax_preset("tax", entries.raw("tax").unwrap_or("flat15"))?;
    let base = Scenario { model, tax };

    let mut axes = Vec::new();
    for axis in Axis::ALL {
        let key = format!("sweep.{axis}");
        let Some(list) = entries.raw(&key) else {
            continue;
        };
        if !axis.applies_to(&base.model) {
            return Err(ConfigError::NotApplicable { key });
        }
        if axis == Axis::SigmaScale
            && matches!(&base.model, ModelConfig::Static(c) if c.economy.sigma_mode == SigmaMode::Fixed)
        {
            return Err(Entries::invalid(
                &key,
                list,
                "sweeping sigma_scale requires sigma_mode = half_normal",
            ));
        }
        axes.push(SweepAxis {
            axis,
            values: parse_axis_values(&key, axis, list)?,
        });
    }

    let plan = ExperimentPlan {
        base,
        axes,
        n_runs: entries.positive("n_runs", DEFAULT_RUNS)?,
        master_seed: entries.integer("master_seed", 0u64)?,
    };
    for point in plan.grid_points() {
        plan.scenario_at(&point)?;
    }
    Ok(plan)
}

fn parse_axis_values(key: &str, axis: Axis, list: &str) -> Result<Vec<AxisValue>, ConfigError> {
    let mut values = Vec::new();
    for item in list.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(Entries::invalid(key, list, "empty list element"));
        }
        let value = match axis {
            Axis::Tax => {
                tax_preset(key, item)?;
                AxisValue::Name(item.to_string())
            }
            Axis::Beta | Axis::PDigital => {
                let x = parse_number(key, item)?;
                check_probability(key, x)?;
                AxisValue::Number(x)
            }
            Axis::Sigma | Axis::SigmaScale | Axis::ThresholdSigma => {
                let x = parse_number(key, item)?;
                check_non_negative(key, x)?;
                AxisValue::Number(x)
            }
            Axis::ThresholdMu => AxisValue::Number(parse_number(key, item)?),
        };
        if values.contains(&value) {
            return Err(Entries::invalid(key, item, "duplicate sweep value"));
        }
        values.push(value);
    }
    Ok(values)
}

fn economy_overrides(
    entries: &Entries,
    economy: &mut misfit_core::Economy,
) -> Result<(), ConfigError> {
    economy.traditional.mu = entries.number("trad_mu", economy.traditional.mu)?;
    economy.traditional.sigma = entries.non_negative("sigma", economy.traditional.sigma)?;
    economy.digital.mu = entries.number("digital_mu", economy.digital.mu)?;
    economy.digital.sigma = entries.non_negative("digital_sigma", economy.digital.sigma)?;
    let periods = entries.positive("depreciation_periods", economy.schedule.periods())?;
    economy.schedule = DepreciationSchedule::new(periods).expect("positive period count");
    economy.bankruptcy_floor =
        entries.non_negative("bankruptcy_floor", economy.bankruptcy_floor)?;
    economy.initial_valuation = entries.number("initial_valuation", economy.initial_valuation)?;
    if economy.initial_valuation <= economy.bankruptcy_floor {
        return Err(Entries::invalid(
            "initial_valuation",
            &economy.initial_valuation.to_string(),
            "must exceed bankruptcy_floor",
        ));
    }
    economy.traditional_reference = match entries.raw("traditional_reference") {
        None | Some("fresh_draw") => TraditionalReference::FreshDraw,
        Some("fixed_mean") => TraditionalReference::FixedMean,
        Some(other) => {
            return Err(Entries::invalid(
                "traditional_reference",
                other,
                "expected `fresh_draw` or `fixed_mean`",
            ))
        }
    };
    Ok(())
}

fn static_config(entries: &Entries) -> Result<StaticModelConfig, ConfigError> {
    let mut c = StaticModelConfig::default();
    c.n_agents = entries.positive("n_agents", c.n_agents)?;
    c.n_periods = entries.positive("n_periods", c.n_periods)?;
    c.p_digital = entries.probability("p_digital", c.p_digital)?;
    economy_overrides(entries, &mut c.economy)?;
    let scale = entries.non_negative("sigma_scale", 0.1)?;
    c.economy.sigma_mode = match entries.raw("sigma_mode") {
        None | Some("fixed") => {
            if entries.raw("sigma_scale").is_some() {
                return Err(Entries::invalid(
                    "sigma_scale",
                    entries.raw("sigma_scale").unwrap_or(""),
                    "only used with sigma_mode = half_normal",
                ));
            }
            SigmaMode::Fixed
        }
        Some("half_normal") => SigmaMode::HalfNormalPerAgent { scale },
        Some(other) => {
            return Err(Entries::invalid(
                "sigma_mode",
                other,
                "expected `fixed` or `half_normal`",
            ))
        }
    };
    Ok(c)
}

fn dynamic_config(entries: &Entries) -> Result<DynamicModelConfig, ConfigError> {
    let mut c = DynamicModelConfig::default();
    c.n_agents = entries.positive("n_agents", c.n_agents)?;
    c.n_periods = entries.positive("n_periods", c.n_periods)?;
    c.seed_digital_fraction =
        entries.probability("seed_digital_fraction", c.seed_digital_fraction)?;
    c.k = entries.positive("k", c.k)?;
    if c.k % 2 != 0 || c.k >= c.n_agents {
        return Err(Entries::invalid(
            "k",
            &c.k.to_string(),
            "must be even and below n_agents",
        ));
    }
    c.beta = entries.probability("beta", c.beta)?;
    c.adoption.threshold_mu = entries.number("threshold_mu", c.adoption.threshold_mu)?;
    c.adoption.threshold_sigma =
        entries.non_negative("threshold_sigma", c.adoption.threshold_sigma)?;
    economy_overrides(entries, &mut c.economy)?;
    Ok(c)
}
