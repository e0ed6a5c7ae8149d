//! Learned law sets.

use alloc::vec::Vec;

use crate::hyper::Hyperparameters;
use crate::language::{PredicateId, PredicateLanguage};
use crate::rule::{Rule, RuleStats};

#[derive(Clone, Debug, PartialEq)]
pub struct Law {
    pub rule: Rule,
    pub stats: RuleStats,
    /// Graph level the law was found at (its premise size).
    pub level: usize,
}

impl Law {
    pub fn probability(&self) -> f64 {
        self.stats.probability
    }
}

/// Laws for one conclusion. The first entry is always the baseline `∅ -> R`,
/// kept even when its probability is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetLaws {
    pub conclusion: PredicateId,
    pub laws: Vec<Law>,
}

impl TargetLaws {
    pub fn baseline(&self) -> &Law {
        &self.laws[0]
    }

    /// Laws with a non-empty premise.
    pub fn refined(&self) -> &[Law] {
        &self.laws[1..]
    }

    /// Rules satisfying the law definition: the refined laws plus the
    /// baseline when its probability is non-zero.
    pub fn law_set(&self) -> impl Iterator<Item = &Law> {
        self.laws
            .iter()
            .filter(|l| !l.rule.is_baseline() || l.probability() > 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub language: PredicateLanguage,
    pub hyperparameters: Hyperparameters,
    pub targets: Vec<TargetLaws>,
}

impl Model {
    pub fn targets(&self) -> impl Iterator<Item = PredicateId> + '_ {
        self.targets.iter().map(|t| t.conclusion)
    }

    pub fn target(&self, conclusion: PredicateId) -> Option<&TargetLaws> {
        self.targets.iter().find(|t| t.conclusion == conclusion)
    }

    /// Every stored law, baselines included, in target order.
    pub fn laws(&self) -> impl Iterator<Item = &Law> {
        self.targets.iter().flat_map(|t| t.laws.iter())
    }

    pub fn baseline(&self, conclusion: PredicateId) -> Option<&Law> {
        self.target(conclusion).map(TargetLaws::baseline)
    }

    pub fn n_laws(&self) -> usize {
        self.targets.iter().map(|t| t.laws.len()).sum()
    }
}
