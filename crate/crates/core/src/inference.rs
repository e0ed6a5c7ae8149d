//! Applying a learned model to objects: classification, averaging
//! regression and anomaly scoring.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{ConfigError, InferenceError};
use crate::language::{PredicateId, PredicateLanguage};
use crate::model::{Law, Model};
use crate::rule::is_subset;

/// The predicates true on one object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectFeatures {
    predicates: Vec<PredicateId>,
}

impl ObjectFeatures {
    pub fn new(
        predicates: impl IntoIterator<Item = PredicateId>,
        language: &PredicateLanguage,
    ) -> Result<Self, InferenceError> {
        let mut predicates: Vec<PredicateId> = predicates.into_iter().collect();
        predicates.sort_unstable();
        predicates.dedup();
        if let Some(&p) = predicates.iter().find(|&&p| !language.contains(p)) {
            return Err(InferenceError::UnknownPredicate(p));
        }
        Ok(ObjectFeatures { predicates })
    }

    /// Features of object `o`, optionally leaving out some predicates (for
    /// example the class predictors being predicted).
    pub fn from_dataset(ds: &Dataset, o: usize, exclude: &[PredicateId]) -> Self {
        ObjectFeatures {
            predicates: ds
                .object_predicates(o)
                .into_iter()
                .filter(|p| !exclude.contains(p))
                .collect(),
        }
    }

    pub fn predicates(&self) -> &[PredicateId] {
        &self.predicates
    }

    pub fn holds(&self, p: PredicateId) -> bool {
        self.predicates.binary_search(&p).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: PredicateId,
    pub probability: f64,
    /// The maximal-probability laws concluding `label`.
    pub support_laws: Vec<Law>,
    /// Number of laws that took part in the decision.
    pub fired: usize,
}

/// Tied maximal laws that disagree (or, under strict ties, any tie).
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionFailure {
    pub tied: Vec<Law>,
    pub fired: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Label(Prediction),
    Conflict(PredictionFailure),
}

/// Laws whose premise holds on `obj`, optionally restricted to the given
/// conclusions. Baselines are always applicable.
pub fn applicable_laws<'m>(
    m: &'m Model,
    obj: &ObjectFeatures,
    conclusions: Option<&[PredicateId]>,
) -> Vec<&'m Law> {
    m.targets
        .iter()
        .filter(|t| conclusions.is_none_or(|c| c.contains(&t.conclusion)))
        .flat_map(|t| t.laws.iter())
        .filter(|l| is_subset(l.rule.premise(), obj.predicates()))
        .collect()
}

/// Picks the label of the maximal-probability applicable laws.
///
/// Baselines only decide when no other law applies. Ties between laws with
/// the same conclusion agree unless `strict_ties` is set, in which case any
/// tie fails.
pub fn classify(
    m: &Model,
    obj: &ObjectFeatures,
    class_predictors: &[PredicateId],
    strict_ties: bool,
) -> Result<Classification, InferenceError> {
    let mut baselines = Vec::with_capacity(class_predictors.len());
    for &c in class_predictors {
        baselines.push(m.baseline(c).ok_or(InferenceError::MissingBaseline(c))?);
    }
    let mut pool: Vec<&Law> = applicable_laws(m, obj, Some(class_predictors))
        .into_iter()
        .filter(|l| !l.rule.is_baseline())
        .collect();
    if pool.is_empty() {
        pool = baselines;
    }
    let fired = pool.len();
    let best = pool
        .iter()
        .map(|l| l.probability())
        .fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<Law> = pool
        .into_iter()
        .filter(|l| l.probability() == best)
        .cloned()
        .collect();
    let label = tied[0].rule.conclusion();
    let agree = if strict_ties {
        tied.len() == 1
    } else {
        tied.iter().all(|l| l.rule.conclusion() == label)
    };
    Ok(if agree {
        Classification::Label(Prediction {
            label,
            probability: best,
            support_laws: tied,
            fired,
        })
    } else {
        Classification::Conflict(PredictionFailure { tied, fired })
    })
}

/// A range predicate and the numeric interval it covers.
pub type RangePredictor = (PredicateId, (f64, f64));

/// Range predictors of a model together with their numeric intervals.
pub fn range_predictors(
    m: &Model,
    ids: &[PredicateId],
) -> Result<Vec<RangePredictor>, InferenceError> {
    ids.iter()
        .map(|&id| {
            if !m.language.contains(id) {
                return Err(InferenceError::UnknownPredicate(id));
            }
            m.language
                .get(id)
                .transform
                .interval()
                .map(|r| (id, r))
                .ok_or(InferenceError::NoRange(id))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionValue {
    pub value: f64,
    pub fired: usize,
}

/// Mean of the range midpoints of all applicable non-baseline laws that
/// conclude a range predictor, weighted by law probability unless
/// `unweighted`. Fails when no such law applies.
pub fn regress_average(
    m: &Model,
    obj: &ObjectFeatures,
    predictors: &[RangePredictor],
    unweighted: bool,
) -> Result<RegressionValue, PredictionFailure> {
    let ids: Vec<PredicateId> = predictors.iter().map(|p| p.0).collect();
    let terms: Vec<(f64, f64)> = applicable_laws(m, obj, Some(&ids))
        .into_iter()
        .filter(|l| !l.rule.is_baseline())
        .map(|law| {
            let (_, (lo, hi)) = predictors
                .iter()
                .find(|p| p.0 == law.rule.conclusion())
                .expect("filtered by conclusion");
            let w = if unweighted { 1.0 } else { law.probability() };
            (w, (lo + hi) / 2.0)
        })
        .collect();
    let Some(&(_, anchor)) = terms.first() else {
        return Err(PredictionFailure {
            tied: Vec::new(),
            fired: 0,
        });
    };
    // Offsets from the first midpoint keep a single-law answer exact.
    let den: f64 = terms.iter().map(|t| t.0).sum();
    let shift: f64 = terms.iter().map(|(w, mid)| w * (mid - anchor)).sum();
    Ok(RegressionValue {
        value: anchor + shift / den,
        fired: terms.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnomalyScore {
    /// Violated share of the applicable high-probability laws.
    pub score: f64,
    pub applicable: usize,
    pub violated: usize,
}

/// Share of applicable laws with probability at least `p_min` whose
/// conclusion is false on the record. Zero when none apply.
pub fn anomaly_score(
    m: &Model,
    record: &ObjectFeatures,
    p_min: f64,
) -> Result<AnomalyScore, InferenceError> {
    if !(0.0..=1.0).contains(&p_min) {
        return Err(ConfigError::OutOfRange {
            name: "p_min",
            value: p_min,
            min: 0.0,
            max: 1.0,
        }
        .into());
    }
    let (mut applicable, mut violated) = (0, 0);
    for t in &m.targets {
        for law in t.law_set() {
            if law.probability() >= p_min && is_subset(law.rule.premise(), record.predicates()) {
                applicable += 1;
                violated += usize::from(!record.holds(law.rule.conclusion()));
            }
        }
    }
    let score = if applicable == 0 {
        0.0
    } else {
        violated as f64 / applicable as f64
    };
    Ok(AnomalyScore {
        score,
        applicable,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::Hyperparameters;
    use crate::learner::learn;
    use crate::model::TargetLaws;
    use crate::rule::{Confidence, Rule, RuleStats};
    use crate::testutil::desk_d1;
    use alloc::vec;

    const A: PredicateId = PredicateId(0);
    const B: PredicateId = PredicateId(1);
    const R: PredicateId = PredicateId(2);

    fn desk_model() -> Model {
        learn(&desk_d1(), &[R], &Hyperparameters::default()).unwrap()
    }

    fn obj(m: &Model, ps: &[PredicateId]) -> ObjectFeatures {
        ObjectFeatures::new(ps.iter().copied(), &m.language).unwrap()
    }

    #[test]
    fn applicability() {
        let m = desk_model();
        assert_eq!(applicable_laws(&m, &obj(&m, &[A, B]), None).len(), 4);
        let empty = applicable_laws(&m, &obj(&m, &[]), None);
        assert_eq!(empty.len(), 1);
        assert!(empty[0].rule.is_baseline());
        let b: Vec<Vec<PredicateId>> = applicable_laws(&m, &obj(&m, &[B]), None)
            .iter()
            .map(|l| l.rule.premise().to_vec())
            .collect();
        assert_eq!(b, vec![vec![], vec![B]]);
        assert!(ObjectFeatures::new([PredicateId(7)], &m.language).is_err());
    }

    /// D1 extended with the complementary class column notR.
    fn two_class_model() -> Model {
        let rows = crate::testutil::rows(&[
            "1110", "1110", "1010", "1001", "0101", "0110", "0001", "0001",
        ]);
        let ds = Dataset::from_rows(&["A", "B", "R", "notR"], &rows).unwrap();
        learn(
            &ds,
            &[PredicateId(2), PredicateId(3)],
            &Hyperparameters::default(),
        )
        .unwrap()
    }

    #[test]
    fn classify_examples() {
        let m = two_class_model();
        let classes = [PredicateId(2), PredicateId(3)];
        match classify(&m, &obj(&m, &[A, B]), &classes, false).unwrap() {
            Classification::Label(p) => {
                assert_eq!(p.label, PredicateId(2));
                assert_eq!(p.probability, 1.0);
            }
            c => panic!("unexpected {:?}", c),
        }
        match classify(&m, &obj(&m, &[]), &classes, false).unwrap() {
            Classification::Conflict(f) => assert_eq!(f.tied.len(), 2),
            c => panic!("unexpected {:?}", c),
        }
        assert_eq!(
            classify(&m, &obj(&m, &[]), &[PredicateId(0)], false),
            Err(InferenceError::MissingBaseline(PredicateId(0)))
        );
    }

    fn law(premise: &[PredicateId], conclusion: PredicateId, support: usize, co: usize) -> Law {
        let conf = Confidence::new(0.95).unwrap();
        Law {
            rule: Rule::new(premise.iter().copied(), conclusion).unwrap(),
            stats: RuleStats::from_counts(support, co, &conf),
            level: premise.len(),
        }
    }

    #[test]
    fn same_conclusion_ties_agree_unless_strict() {
        let mut m = desk_model();
        m.targets[0].laws = vec![law(&[], R, 8, 4), law(&[A], R, 4, 3), law(&[B], R, 4, 3)];
        let o = obj(&m, &[A, B]);
        assert!(
            matches!(classify(&m, &o, &[R], false).unwrap(), Classification::Label(p) if p.support_laws.len() == 2)
        );
        assert!(matches!(
            classify(&m, &o, &[R], true).unwrap(),
            Classification::Conflict(_)
        ));
    }

    fn regression_model() -> Model {
        let mut lang = PredicateLanguage::new();
        lang.push_boolean("x").unwrap();
        let lo = lang
            .push(
                "y in [0,2]".into(),
                "y".into(),
                false,
                crate::language::Transform::Range {
                    lo: 0.0,
                    hi: 2.0,
                    closed_low: true,
                },
            )
            .unwrap();
        let hi = lang
            .push(
                "y in (2,4]".into(),
                "y".into(),
                false,
                crate::language::Transform::Range {
                    lo: 2.0,
                    hi: 4.0,
                    closed_low: false,
                },
            )
            .unwrap();
        let x = PredicateId(0);
        Model {
            language: lang,
            hyperparameters: Hyperparameters::default(),
            targets: vec![
                TargetLaws {
                    conclusion: lo,
                    laws: vec![law(&[], lo, 10, 5), law(&[x], lo, 5, 4)],
                },
                TargetLaws {
                    conclusion: hi,
                    laws: vec![law(&[], hi, 10, 1), law(&[x], hi, 5, 1)],
                },
            ],
        }
    }

    #[test]
    fn regression_examples() {
        let m = regression_model();
        let preds = range_predictors(&m, &[PredicateId(1), PredicateId(2)]).unwrap();
        let x = obj(&m, &[PredicateId(0)]);
        let v = regress_average(&m, &x, &preds, false).unwrap();
        assert!((v.value - 1.4).abs() < 1e-12);
        assert_eq!(v.fired, 2);
        let single = regress_average(&m, &x, &preds[1..], false).unwrap();
        assert_eq!(single.value, 3.0);
        assert!(regress_average(&m, &obj(&m, &[]), &preds, false).is_err());
        assert_eq!(
            range_predictors(&m, &[PredicateId(0)]),
            Err(InferenceError::NoRange(PredicateId(0)))
        );
        let unweighted = regress_average(&m, &x, &preds, true).unwrap();
        assert_eq!(unweighted.value, 2.0);
    }

    #[test]
    fn anomaly_examples() {
        let m = desk_model();
        let s = anomaly_score(&m, &obj(&m, &[A, B]), 0.9).unwrap();
        assert_eq!((s.score, s.applicable, s.violated), (1.0, 1, 1));
        assert_eq!(
            anomaly_score(&m, &obj(&m, &[A, B, R]), 0.9).unwrap().score,
            0.0
        );
        assert_eq!(anomaly_score(&m, &obj(&m, &[]), 0.9).unwrap().score, 0.0);
        assert!(anomaly_score(&m, &obj(&m, &[]), 1.5).is_err());
    }
}
