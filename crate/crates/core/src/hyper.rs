//! Learner hyperparameters.

use alloc::collections::BTreeMap;

use crate::error::ConfigError;
use crate::stats;

/// Confidence level used to fill `wilson_lb` when the significance gate is off.
pub const REPORTING_LEVEL: f64 = 0.95;

pub const DEFAULT_NODE_CAP: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperparameters {
    /// Base enumeration depth: every rule with at most `d` premise
    /// predicates is enumerated.
    pub d: usize,
    /// Largest premise size considered (`MaxSize`).
    pub max_size: usize,
    /// Confidence level of the Wilson gate; `None` disables the gate and
    /// leaves `min_support` as the only statistical filter.
    pub significance: Option<f64>,
    /// Minimum number of objects satisfying the premise.
    pub min_support: usize,
    pub prob_threshold: f64,
    pub gain_threshold: f64,
    /// Per-level overrides of `gain_threshold`.
    pub per_level_gain: BTreeMap<usize, f64>,
    /// Maximum number of graph nodes per conclusion.
    pub node_cap: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            d: 2,
            max_size: 4,
            significance: None,
            min_support: 1,
            prob_threshold: 0.0,
            gain_threshold: 0.0,
            per_level_gain: BTreeMap::new(),
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            name,
            value,
            min,
            max,
        })
    }
}

impl Hyperparameters {
    /// Exhaustive search to depth `size` with every filter disabled.
    pub fn exhaustive(size: usize) -> Self {
        Hyperparameters {
            d: size.max(1),
            max_size: size.max(1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 {
            return Err(ConfigError::ZeroDepth);
        }
        if self.d > self.max_size {
            return Err(ConfigError::DepthExceedsMaxSize {
                d: self.d,
                max_size: self.max_size,
            });
        }
        if let Some(a) = self.significance {
            stats::critical_value(a)?;
        }
        if self.node_cap == 0 {
            return Err(ConfigError::ZeroNodeCap);
        }
        check_range("prob_threshold", self.prob_threshold, 0.0, 1.0)?;
        check_range("gain_threshold", self.gain_threshold, 0.0, 1.0)?;
        for &g in self.per_level_gain.values() {
            check_range("per_level_gain", g, 0.0, 1.0)?;
        }
        Ok(())
    }

    /// Gain threshold in force at `level`.
    pub fn gain_at(&self, level: usize) -> f64 {
        self.per_level_gain
            .get(&level)
            .copied()
            .unwrap_or(self.gain_threshold)
    }

    pub fn confidence_level(&self) -> f64 {
        self.significance.unwrap_or(REPORTING_LEVEL)
    }
}
