//! Rules, their frequency statistics, and the law and significance tests.

use alloc::vec::Vec;

use crate::bitset::BitColumn;
use crate::dataset::Dataset;
use crate::error::{ConfigError, RuleError};
use crate::hyper::Hyperparameters;
use crate::language::PredicateId;
use crate::stats;

/// `premise -> conclusion`, with the premise kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    premise: Vec<PredicateId>,
    conclusion: PredicateId,
}

impl Rule {
    pub fn new(
        premise: impl IntoIterator<Item = PredicateId>,
        conclusion: PredicateId,
    ) -> Result<Self, RuleError> {
        let mut premise: Vec<PredicateId> = premise.into_iter().collect();
        premise.sort_unstable();
        premise.dedup();
        if premise.binary_search(&conclusion).is_ok() {
            return Err(RuleError::ConclusionInPremise(conclusion));
        }
        Ok(Rule {
            premise,
            conclusion,
        })
    }

    /// The empty-premise rule `∅ -> conclusion`.
    pub fn baseline(conclusion: PredicateId) -> Self {
        Rule {
            premise: Vec::new(),
            conclusion,
        }
    }

    pub fn premise(&self) -> &[PredicateId] {
        &self.premise
    }

    pub fn conclusion(&self) -> PredicateId {
        self.conclusion
    }

    pub fn size(&self) -> usize {
        self.premise.len()
    }

    pub fn is_baseline(&self) -> bool {
        self.premise.is_empty()
    }

    /// Adds `p` to the premise.
    pub fn refine(&self, p: PredicateId) -> Result<Rule, RuleError> {
        if p == self.conclusion {
            return Err(RuleError::ConclusionInPremise(p));
        }
        match self.premise.binary_search(&p) {
            Ok(_) => Err(RuleError::AlreadyInPremise(p)),
            Err(pos) => {
                let mut premise = self.premise.clone();
                premise.insert(pos, p);
                Ok(Rule {
                    premise,
                    conclusion: self.conclusion,
                })
            }
        }
    }

    /// The subrule obtained by dropping the `i`-th premise predicate.
    pub fn without(&self, i: usize) -> Rule {
        let mut premise = self.premise.clone();
        premise.remove(i);
        Rule {
            premise,
            conclusion: self.conclusion,
        }
    }

    /// Same conclusion and premise a subset of `other`'s premise.
    pub fn is_subrule_of(&self, other: &Rule) -> bool {
        self.conclusion == other.conclusion && is_subset(&self.premise, &other.premise)
    }
}

/// Subset test over sorted slices.
pub fn is_subset(small: &[PredicateId], large: &[PredicateId]) -> bool {
    let mut it = large.iter();
    small.iter().all(|s| it.any(|l| l == s))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleStats {
    /// Objects satisfying the premise.
    pub support: usize,
    /// Objects satisfying premise and conclusion.
    pub co_support: usize,
    /// `co_support / support`, or 0 when `support == 0`.
    pub probability: f64,
    pub wilson_lb: f64,
}

/// A confidence level with its critical value computed once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Confidence {
    level: f64,
    z: f64,
}

impl Confidence {
    pub fn new(level: f64) -> Result<Self, ConfigError> {
        Ok(Confidence {
            level,
            z: stats::critical_value(level)?,
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }
}

impl RuleStats {
    pub fn from_counts(support: usize, co_support: usize, conf: &Confidence) -> Self {
        debug_assert!(co_support <= support);
        let probability = if support == 0 {
            0.0
        } else {
            co_support as f64 / support as f64
        };
        RuleStats {
            support,
            co_support,
            probability,
            wilson_lb: stats::wilson_with_z(co_support, support, conf.z),
        }
    }
}

/// Counts `rule` over the dataset, or over `scope` when given.
///
/// `scope` must list exactly the objects satisfying some sub-premise of the
/// rule; the result is then identical to the full-dataset count.
pub fn rule_stats(
    ds: &Dataset,
    rule: &Rule,
    scope: Option<&[u32]>,
    conf: &Confidence,
) -> RuleStats {
    let conclusion = rule.conclusion();
    let (support, co_support) = match scope {
        Some(objects) => {
            let mut support = 0;
            let mut co = 0;
            for &o in objects {
                let o = o as usize;
                if rule.premise().iter().all(|&p| ds.holds(p, o)) {
                    support += 1;
                    if ds.holds(conclusion, o) {
                        co += 1;
                    }
                }
            }
            (support, co)
        }
        None => match rule.premise() {
            [] => (ds.n_objects(), ds.column(conclusion).count_ones()),
            [only] => {
                let col = ds.column(*only);
                (col.count_ones(), col.and_count(ds.column(conclusion)))
            }
            premise => {
                let cover = premise_cover(ds, premise);
                (cover.count_ones(), cover.and_count(ds.column(conclusion)))
            }
        },
    };
    RuleStats::from_counts(support, co_support, conf)
}

/// Objects satisfying every predicate of `premise`.
pub fn premise_cover(ds: &Dataset, premise: &[PredicateId]) -> BitColumn {
    let mut cover = BitColumn::ones(ds.n_objects());
    for &p in premise {
        cover.and_assign(ds.column(p));
    }
    cover
}

/// Law test: `rule_prob` is non-zero and strictly above every subrule probability.
///
/// The caller supplies values covering all proper subrules with the same
/// conclusion; any list whose maximum equals the maximum subrule probability
/// gives the same verdict.
pub fn law_condition(rule_prob: f64, proper_subrule_probs: impl IntoIterator<Item = f64>) -> bool {
    rule_prob > 0.0 && proper_subrule_probs.into_iter().all(|q| q < rule_prob)
}

/// Statistical gate: enough premise support and, when enabled, a Wilson
/// lower bound above the baseline probability. Baseline rules always pass.
pub fn significance_check(
    rule: &Rule,
    stats: &RuleStats,
    hp: &Hyperparameters,
    baseline_probability: f64,
) -> bool {
    if rule.is_baseline() {
        return true;
    }
    stats.support >= hp.min_support
        && hp
            .significance
            .is_none_or(|_| stats.wilson_lb > baseline_probability)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::desk_d1;
    use alloc::vec;
    use proptest::prelude::*;

    const A: PredicateId = PredicateId(0);
    const B: PredicateId = PredicateId(1);
    const R: PredicateId = PredicateId(2);

    fn conf() -> Confidence {
        Confidence::new(0.95).unwrap()
    }

    fn counts(ds: &Dataset, premise: &[PredicateId]) -> (usize, usize, f64) {
        let s = rule_stats(
            ds,
            &Rule::new(premise.iter().copied(), R).unwrap(),
            None,
            &conf(),
        );
        (s.support, s.co_support, s.probability)
    }

    #[test]
    fn desk_rule_stats() {
        let ds = desk_d1();
        assert_eq!(counts(&ds, &[]), (8, 4, 0.5));
        assert_eq!(counts(&ds, &[A]), (4, 3, 0.75));
        assert_eq!(counts(&ds, &[B]), (4, 3, 0.75));
        assert_eq!(counts(&ds, &[A, B]), (2, 2, 1.0));
    }

    #[test]
    fn zero_support_has_zero_probability() {
        let ds = Dataset::from_rows(&["A", "R"], &[vec![false, true]]).unwrap();
        let s = rule_stats(
            &ds,
            &Rule::new([PredicateId(0)], PredicateId(1)).unwrap(),
            None,
            &conf(),
        );
        assert_eq!((s.support, s.probability, s.wilson_lb), (0, 0.0, 0.0));
    }

    #[test]
    fn rule_construction() {
        assert_eq!(Rule::new([R, A], R), Err(RuleError::ConclusionInPremise(R)));
        let r = Rule::new([B, A, B], R).unwrap();
        assert_eq!(r.premise(), &[A, B]);
        assert_eq!(r.size(), 2);
    }

    #[test]
    fn refine_examples() {
        let a = Rule::new([A], R).unwrap();
        assert_eq!(a.refine(B).unwrap(), Rule::new([A, B], R).unwrap());
        assert_eq!(a.refine(A), Err(RuleError::AlreadyInPremise(A)));
        assert_eq!(a.refine(R), Err(RuleError::ConclusionInPremise(R)));
        assert_eq!(Rule::baseline(R).refine(A).unwrap(), a);
    }

    #[test]
    fn law_condition_examples() {
        assert!(law_condition(0.75, [0.5]));
        assert!(law_condition(1.0, [0.5, 0.75, 0.75]));
        assert!(!law_condition(0.5, [0.5]));
        assert!(!law_condition(0.0, []));
        assert!(law_condition(0.1, []));
    }

    #[test]
    fn significance_examples() {
        let hp = Hyperparameters {
            min_support: 2,
            ..Default::default()
        };
        let single = RuleStats::from_counts(1, 1, &conf());
        let rule = Rule::new([A], R).unwrap();
        assert!(!significance_check(&rule, &single, &hp, 0.1));

        let ds = desk_d1();
        let ab = Rule::new([A, B], R).unwrap();
        let stats = rule_stats(&ds, &ab, None, &conf());
        assert!((stats.wilson_lb - 0.342).abs() < 5e-4);
        let gated = Hyperparameters {
            significance: Some(0.95),
            ..Default::default()
        };
        assert!(!significance_check(&ab, &stats, &gated, 0.5));
        assert!(significance_check(
            &ab,
            &stats,
            &Hyperparameters::default(),
            0.5
        ));
        assert!(significance_check(&Rule::baseline(R), &stats, &gated, 0.9));

        let big = RuleStats::from_counts(10_000, 9_000, &conf());
        assert!(significance_check(&rule, &big, &gated, 0.5));
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        (2usize..6, 1usize..30).prop_flat_map(|(np, no)| {
            prop::collection::vec(prop::collection::vec(any::<bool>(), np), no).prop_map(
                move |rows| {
                    let names = ["p0", "p1", "p2", "p3", "p4", "p5"];
                    Dataset::from_rows(&names[..np], &rows).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn scoped_stats_match_full(ds in arb_dataset(), mask in 0u32..64, submask in 0u32..64) {
            let n = ds.n_predicates() as u32;
            let conclusion = PredicateId(n - 1);
            let premise: Vec<PredicateId> = (0..n - 1).filter(|i| mask >> i & 1 == 1).map(PredicateId).collect();
            let sub: Vec<PredicateId> = premise.iter().copied().filter(|p| submask >> p.0 & 1 == 1).collect();
            let scope: Vec<u32> = premise_cover(&ds, &sub).ones_iter().map(|o| o as u32).collect();
            let rule = Rule::new(premise, conclusion).unwrap();
            let full = rule_stats(&ds, &rule, None, &conf());
            prop_assert_eq!(full, rule_stats(&ds, &rule, Some(&scope), &conf()));
            prop_assert!(full.co_support <= full.support && full.support <= ds.n_objects());
            prop_assert!(full.wilson_lb >= 0.0 && full.wilson_lb <= full.probability);
            // monotone support along premise inclusion
            let sub_stats = rule_stats(&ds, &Rule::new(sub, conclusion).unwrap(), None, &conf());
            prop_assert!(full.support <= sub_stats.support);
            prop_assert!(full.co_support <= sub_stats.co_support);
        }

        #[test]
        fn law_condition_antitone(p in 0.0f64..1.0, subs in prop::collection::vec(0.0f64..1.0, 0..5), i in 0usize..5, bump in 0.0f64..0.5) {
            let before = law_condition(p, subs.iter().copied());
            let mut raised = subs.clone();
            if let Some(s) = raised.get_mut(i) {
                *s += bump;
            }
            let after = law_condition(p, raised.iter().copied());
            prop_assert!(!after || before);
        }
    }
}
