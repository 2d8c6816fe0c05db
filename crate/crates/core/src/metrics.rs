//! Inequality and adoption measurements, and cross-run aggregation.

use alloc::vec;
use alloc::vec::Vec;

use crate::econ::{FirmKind, PopulationState};
use crate::error::{Error, Result};

/// Snapshot taken at the end of a period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodStats {
    /// 1-based index of the completed period.
    pub period: u32,
    pub gini: f64,
    pub digital_count: usize,
    pub bankruptcies: usize,
    pub mean_valuation: f64,
}

impl PeriodStats {
    pub fn measure(pop: &PopulationState, bankruptcies: usize) -> Self {
        let valuations = pop.valuations();
        let mean_valuation = valuations.iter().sum::<f64>() / valuations.len().max(1) as f64;
        PeriodStats {
            period: pop.period,
            gini: gini(&valuations).unwrap_or(f64::NAN),
            digital_count: digital_count(pop),
            bankruptcies,
            mean_valuation,
        }
    }

    pub fn get(&self, stat: Statistic) -> f64 {
        match stat {
            Statistic::Bankruptcies => self.bankruptcies as f64,
            Statistic::DigitalCount => self.digital_count as f64,
            Statistic::Gini => self.gini,
            Statistic::MeanValuation => self.mean_valuation,
        }
    }
}

/// Statistics reported per period, in name order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statistic {
    Bankruptcies,
    DigitalCount,
    Gini,
    MeanValuation,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::Bankruptcies,
        Statistic::DigitalCount,
        Statistic::Gini,
        Statistic::MeanValuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Bankruptcies => "bankruptcies",
            Statistic::DigitalCount => "digital_count",
            Statistic::Gini => "gini",
            Statistic::MeanValuation => "mean_valuation",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Gini coefficient of non-negative values via the sorted-rank formula
/// `G = 2 Σ i·x_(i) / (n Σ x) − (n + 1)/n` with 1-based ranks.
///
/// Returns 0 when every value is zero. Empty input, negative or non-finite
/// values are rejected.
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidValue { index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let total: f64 = sorted.iter().sum();
    if total == 0.0 || sorted[0] == sorted[sorted.len() - 1] {
        return Ok(0.0);
    }
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (i + 1) as f64 * x)
        .sum();
    let g = 2.0 * weighted / (n * total) - (n + 1.0) / n;
    Ok(g.max(0.0))
}

pub fn digital_count(pop: &PopulationState) -> usize {
    pop.agents
        .iter()
        .filter(|a| a.kind == FirmKind::Digital)
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Summary::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            libm::sqrt(ss / (n - 1) as f64)
        };
        Summary { mean, std }
    }

    /// Half-width of a normal-approximation 95% confidence interval for the
    /// mean of `n` samples.
    pub fn ci95_half_width(&self, n: usize) -> f64 {
        1.96 * self.std / libm::sqrt(n.max(1) as f64)
    }
}

/// Cross-run summary of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSummary {
    pub period: u32,
    summaries: [Summary; 4],
}

impl PeriodSummary {
    pub fn get(&self, stat: Statistic) -> Summary {
        self.summaries[stat as usize]
    }
}

/// Element-wise mean and sample standard deviation of every statistic,
/// per period, across runs. All series must have the same length.
pub fn aggregate_runs(per_run: &[Vec<PeriodStats>]) -> Result<Vec<PeriodSummary>> {
    let Some(first) = per_run.first() else {
        return Err(Error::EmptyInput);
    };
    let expected = first.len();
    if let Some((index, s)) = per_run
        .iter()
        .enumerate()
        .find(|(_, s)| s.len() != expected)
    {
        return Err(Error::LengthMismatch {
            index,
            expected,
            found: s.len(),
        });
    }
    let mut column = vec![0.0; per_run.len()];
    let summaries = (0..expected)
        .map(|t| {
            let mut summaries = [Summary::default(); 4];
            for stat in Statistic::ALL {
                for (slot, series) in column.iter_mut().zip(per_run) {
                    *slot = series[t].get(stat);
                }
                summaries[stat as usize] = Summary::of(&column);
            }
            PeriodSummary {
                period: first[t].period,
                summaries,
            }
        })
        .collect();
    Ok(summaries)
}

/// Excess kurtosis `m4 / m2² − 3` using population moments. `None` for fewer
/// than two values or zero variance.
pub fn excess_kurtosis(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let (m2, m4) = values.iter().fold((0.0, 0.0), |(m2, m4), v| {
        let d2 = (v - mean) * (v - mean);
        (m2 + d2, m4 + d2 * d2)
    });
    let (m2, m4) = (m2 / n as f64, m4 / n as f64);
    if m2 == 0.0 {
        return None;
    }
    Some(m4 / (m2 * m2) - 3.0)
}

/// Histogram over logarithmically spaced bins. Values below the first edge
/// land in the first bin and values at or above the last edge in the last.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHistogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl LogHistogram {
    /// Bins from `10^min_exp` to `10^max_exp` with `per_decade` bins each decade.
    pub fn new(min_exp: i32, max_exp: i32, per_decade: u32) -> Self {
        assert!(max_exp > min_exp && per_decade > 0);
        let bins = (max_exp - min_exp) as usize * per_decade as usize;
        let edges = (0..=bins)
            .map(|i| libm::pow(10.0, f64::from(min_exp) + i as f64 / f64::from(per_decade)))
            .collect();
        LogHistogram {
            edges,
            counts: vec![0; bins],
        }
    }

    /// Valuation bins used for exported histograms: 1 to 10^16, four per decade.
    pub fn valuations() -> Self {
        Self::new(0, 16, 4)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn add(&mut self, value: f64) {
        let inner = &self.edges[1..self.edges.len() - 1];
        let bin = inner.partition_point(|&e| e <= value);
        self.counts[bin] += 1;
    }

    pub fn extend(&mut self, values: &[f64]) {
        for &v in values {
            self.add(v);
        }
    }

    pub fn merge(&mut self, other: &LogHistogram) {
        assert_eq!(self.edges, other.edges, "histograms must share bin edges");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}
