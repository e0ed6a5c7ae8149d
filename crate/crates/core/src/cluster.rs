//! Feature clusters as local maxima of the law agreement measure, and the
//! assignment of objects to them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::language::{PredicateId, PredicateLanguage};
use crate::model::Law;
use crate::rule::is_subset;

/// Agreement differences below this are treated as ties.
pub const AGREEMENT_TOLERANCE: f64 = 1e-12;

/// Sum of the probabilities of laws lying entirely inside `features`, minus
/// the sum for laws whose premise lies inside but whose conclusion does not.
///
/// `features` must be sorted ascending.
pub fn agreement<'a>(laws: impl IntoIterator<Item = &'a Law>, features: &[PredicateId]) -> f64 {
    laws.into_iter()
        .filter(|l| is_subset(l.rule.premise(), features))
        .map(|l| {
            if features.binary_search(&l.rule.conclusion()).is_ok() {
                l.probability()
            } else {
                -l.probability()
            }
        })
        .sum()
}

/// Laws whose premise and conclusion both lie in `features`.
pub fn characteristic_set(laws: &[Law], features: &[PredicateId]) -> Vec<Law> {
    laws.iter()
        .filter(|l| {
            features.binary_search(&l.rule.conclusion()).is_ok()
                && is_subset(l.rule.premise(), features)
        })
        .cloned()
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureCluster {
    pub features: Vec<PredicateId>,
    pub agreement: f64,
    pub characteristic_set: Vec<Law>,
}

fn toggled(features: &[PredicateId], p: PredicateId) -> Vec<PredicateId> {
    let mut out = features.to_vec();
    match out.binary_search(&p) {
        Ok(i) => {
            out.remove(i);
        }
        Err(i) => out.insert(i, p),
    }
    out
}

/// Steepest ascent over single add/remove moves. Among equal gains the
/// smaller resulting set wins, then the lexicographically smaller one.
fn climb(
    laws: &[Law],
    language: &PredicateLanguage,
    start: Vec<PredicateId>,
) -> (Vec<PredicateId>, f64) {
    let mut current = start;
    let mut value = agreement(laws, &current);
    loop {
        let mut best: Option<(f64, Vec<PredicateId>)> = None;
        for p in language.ids() {
            let next = toggled(&current, p);
            let gain = agreement(laws, &next) - value;
            if gain <= AGREEMENT_TOLERANCE {
                continue;
            }
            let better = match &best {
                None => true,
                Some((g, set)) => {
                    gain > g + AGREEMENT_TOLERANCE
                        || ((gain - g).abs() <= AGREEMENT_TOLERANCE
                            && (next.len(), &next) < (set.len(), set))
                }
            };
            if better {
                best = Some((gain, next));
            }
        }
        match best {
            Some((_, next)) => {
                value = agreement(laws, &next);
                current = next;
            }
            None => return (current, value),
        }
    }
}

/// Whether every single-predicate neighbour has strictly lower agreement.
pub fn is_local_maximum(
    laws: &[Law],
    language: &PredicateLanguage,
    features: &[PredicateId],
) -> bool {
    let value = agreement(laws, features);
    language
        .ids()
        .all(|p| agreement(laws, &toggled(features, p)) < value - AGREEMENT_TOLERANCE)
}

/// Climbs from every singleton and from every law's predicate set, keeping
/// the distinct end points that are strict local maxima, in discovery order.
pub fn find_feature_clusters(laws: &[Law], language: &PredicateLanguage) -> Vec<FeatureCluster> {
    if laws.is_empty() {
        return Vec::new();
    }
    let seeds = language
        .ids()
        .map(|p| Vec::from([p]))
        .chain(laws.iter().map(|l| {
            let mut s = l.rule.premise().to_vec();
            let pos = s.binary_search(&l.rule.conclusion()).unwrap_err();
            s.insert(pos, l.rule.conclusion());
            s
        }));
    let mut seen = BTreeSet::new();
    let mut clusters = Vec::new();
    for seed in seeds {
        let (features, value) = climb(laws, language, seed);
        if !seen.insert(features.clone()) {
            continue;
        }
        if is_local_maximum(laws, language, &features) {
            clusters.push(FeatureCluster {
                characteristic_set: characteristic_set(laws, &features),
                agreement: value,
                features,
            });
        }
    }
    clusters
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectAssignment {
    pub object: usize,
    /// Index into the hierarchy's clusters; `None` when there are none.
    pub cluster: Option<usize>,
    /// Agreement of the object's features with the cluster's characteristic set.
    pub score: f64,
    /// Similarity band within the cluster: members whose scores lie within
    /// `epsilon` of the band's top score share a band.
    pub band: usize,
    pub below_zero: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterHierarchy {
    pub feature_clusters: Vec<FeatureCluster>,
    pub object_assignments: Vec<ObjectAssignment>,
    /// `(i, j)` whenever cluster `i`'s features are a proper subset of `j`'s.
    pub order: Vec<(usize, usize)>,
    pub epsilon: f64,
}

impl ClusterHierarchy {
    pub fn members(&self, cluster: usize) -> impl Iterator<Item = &ObjectAssignment> {
        self.object_assignments
            .iter()
            .filter(move |a| a.cluster == Some(cluster))
    }
}

/// Assigns each object to the cluster whose characteristic set agrees best
/// with its features (first cluster on ties) and groups each cluster's
/// members into `epsilon`-wide score bands.
pub fn assign_objects(
    clusters: Vec<FeatureCluster>,
    ds: &Dataset,
    epsilon: f64,
) -> ClusterHierarchy {
    let mut assignments: Vec<ObjectAssignment> = (0..ds.n_objects())
        .map(|o| {
            let features = ds.object_predicates(o);
            let mut best: Option<(usize, f64)> = None;
            for (ci, c) in clusters.iter().enumerate() {
                let score = agreement(&c.characteristic_set, &features);
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((ci, score));
                }
            }
            let score = best.map_or(0.0, |b| b.1);
            ObjectAssignment {
                object: o,
                cluster: best.map(|b| b.0),
                score,
                band: 0,
                below_zero: score < 0.0,
            }
        })
        .collect();

    for ci in 0..clusters.len() {
        let mut members: Vec<usize> = (0..assignments.len())
            .filter(|&i| assignments[i].cluster == Some(ci))
            .collect();
        members.sort_by(|&a, &b| {
            assignments[b]
                .score
                .total_cmp(&assignments[a].score)
                .then(a.cmp(&b))
        });
        let mut band = 0;
        let mut top = None;
        for i in members {
            let s = assignments[i].score;
            match top {
                Some(t) if t - s > epsilon => {
                    band += 1;
                    top = Some(s);
                }
                None => top = Some(s),
                _ => {}
            }
            assignments[i].band = band;
        }
    }

    let mut order = Vec::new();
    for (i, a) in clusters.iter().enumerate() {
        for (j, b) in clusters.iter().enumerate() {
            if i != j && a.features.len() < b.features.len() && is_subset(&a.features, &b.features)
            {
                order.push((i, j));
            }
        }
    }
    ClusterHierarchy {
        feature_clusters: clusters,
        object_assignments: assignments,
        order,
        epsilon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::Hyperparameters;
    use crate::learner::learn;
    use crate::model::Model;
    use crate::testutil::desk_d1;
    use alloc::vec;
    use proptest::prelude::*;

    const A: PredicateId = PredicateId(0);
    const B: PredicateId = PredicateId(1);
    const R: PredicateId = PredicateId(2);

    fn desk_laws() -> (Model, Vec<Law>) {
        let m = learn(&desk_d1(), &[R], &Hyperparameters::default()).unwrap();
        let laws = m.laws().cloned().collect();
        (m, laws)
    }

    #[test]
    fn agreement_examples() {
        let (_, laws) = desk_laws();
        assert_eq!(agreement(&laws, &[A, B, R]), 3.0);
        assert_eq!(agreement(&laws, &[A, B]), -3.0);
        assert_eq!(agreement(&laws, &[]), -0.5);
        assert_eq!(agreement(&laws, &[A, R]), 1.25);
        assert_eq!(agreement(&laws, &[B, R]), 1.25);
    }

    #[test]
    fn characteristic_set_examples() {
        let (_, laws) = desk_laws();
        assert_eq!(characteristic_set(&laws, &[A, B, R]).len(), 4);
        let ar: Vec<Vec<PredicateId>> = characteristic_set(&laws, &[A, R])
            .iter()
            .map(|l| l.rule.premise().to_vec())
            .collect();
        assert_eq!(ar, vec![vec![], vec![A]]);
        assert!(characteristic_set(&laws, &[]).is_empty());
    }

    #[test]
    fn desk_cluster() {
        let (m, laws) = desk_laws();
        let clusters = find_feature_clusters(&laws, &m.language);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].features, vec![A, B, R]);
        assert_eq!(clusters[0].agreement, 3.0);
        assert!(find_feature_clusters(&[], &m.language).is_empty());
    }

    #[test]
    fn desk_assignment() {
        let (m, laws) = desk_laws();
        let clusters = find_feature_clusters(&laws, &m.language);
        let h = assign_objects(clusters, &desk_d1(), 0.1);
        assert_eq!(h.object_assignments[0].score, 3.0);
        assert_eq!(h.object_assignments[0].cluster, Some(0));
        let o7 = &h.object_assignments[6];
        assert_eq!((o7.score, o7.below_zero, o7.cluster), (-0.5, true, Some(0)));

        let h = assign_objects(h.feature_clusters, &desk_d1(), f64::INFINITY);
        assert!(h
            .object_assignments
            .iter()
            .all(|a| a.cluster == Some(0) && a.band == 0));

        let none = assign_objects(Vec::new(), &desk_d1(), 0.1);
        assert!(none.object_assignments.iter().all(|a| a.cluster.is_none()));
    }

    /// Two blocks {A,B} and {C,D}: A iff B, C iff D, blocks independent with
    /// 30% frequency each (9 / 21 / 21 / 49 objects).
    fn two_blocks() -> Dataset {
        let mut rows = Vec::new();
        for (n, ab, cd) in [
            (9, true, true),
            (21, true, false),
            (21, false, true),
            (49, false, false),
        ] {
            for _ in 0..n {
                rows.push(vec![ab, ab, cd, cd]);
            }
        }
        Dataset::from_rows(&["A", "B", "C", "D"], &rows).unwrap()
    }

    #[test]
    fn independent_blocks_form_separate_clusters() {
        let ds = two_blocks();
        let targets: Vec<PredicateId> = ds.language().ids().collect();
        let m = learn(&ds, &targets, &Hyperparameters::default()).unwrap();
        let laws: Vec<Law> = m.laws().cloned().collect();
        // no cross-block laws: p(C | A) equals p(C) exactly
        assert_eq!(laws.len(), 8);
        let clusters = find_feature_clusters(&laws, &m.language);
        let sets: Vec<&[PredicateId]> = clusters.iter().map(|c| c.features.as_slice()).collect();
        let (a, b, c, d) = (
            PredicateId(0),
            PredicateId(1),
            PredicateId(2),
            PredicateId(3),
        );
        assert!(sets.contains(&&[a, b][..]));
        assert!(sets.contains(&&[c, d][..]));
        // {A,B}: 0.3 + 0.3 + 1 + 1 - 0.3 - 0.3
        let ab = clusters.iter().find(|x| x.features == [a, b]).unwrap();
        assert!((ab.agreement - 2.0).abs() < 1e-12);
        for cl in &clusters {
            assert!(is_local_maximum(&laws, &m.language, &cl.features));
        }
        let h = assign_objects(clusters, &ds, 0.1);
        for &(i, j) in &h.order {
            assert!(is_subset(
                &h.feature_clusters[i].features,
                &h.feature_clusters[j].features
            ));
            assert!(!h.order.contains(&(j, i)));
        }
    }

    fn arb_laws() -> impl Strategy<Value = Vec<Law>> {
        let conf = crate::rule::Confidence::new(0.95).unwrap();
        prop::collection::vec((0u32..64, 0u32..6, 1usize..20, 0usize..20), 0..12).prop_map(
            move |spec| {
                spec.into_iter()
                    .filter_map(|(mask, concl, sup, co)| {
                        let premise = (0..6)
                            .filter(|b| mask >> b & 1 == 1 && *b != concl)
                            .map(PredicateId);
                        let rule = crate::rule::Rule::new(premise, PredicateId(concl)).ok()?;
                        Some(Law {
                            level: rule.size(),
                            rule,
                            stats: crate::rule::RuleStats::from_counts(sup, co.min(sup), &conf),
                        })
                    })
                    .collect()
            },
        )
    }

    proptest! {
        #[test]
        fn agreement_decomposes_term_by_term(laws in arb_laws(), fmask in 0u32..64) {
            let f: Vec<PredicateId> = (0..6).filter(|b| fmask >> b & 1 == 1).map(PredicateId).collect();
            let mut expected = 0.0;
            for l in &laws {
                let premise_in = l.rule.premise().iter().all(|p| fmask >> p.0 & 1 == 1);
                let concl_in = fmask >> l.rule.conclusion().0 & 1 == 1;
                let sign = match (premise_in, concl_in) {
                    (true, true) => 1.0,
                    (true, false) => -1.0,
                    _ => 0.0,
                };
                expected += sign * l.probability();
            }
            prop_assert!((agreement(&laws, &f) - expected).abs() < 1e-9);
        }

        #[test]
        fn clusters_are_strict_local_maxima(laws in arb_laws()) {
            let mut lang = PredicateLanguage::new();
            for i in 0..6 {
                lang.push_boolean(&alloc::format!("p{}", i)).unwrap();
            }
            for c in find_feature_clusters(&laws, &lang) {
                prop_assert!(is_local_maximum(&laws, &lang, &c.features));
            }
        }
    }
}
