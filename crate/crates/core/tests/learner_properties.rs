use std::collections::BTreeSet;

use pld_core::graph::DerivationGraph;
use pld_core::learner::{additional_enumeration, base_enumeration};
use pld_core::oracle::enumerate_all_laws;
use pld_core::rule::{rule_stats, Confidence, Rule};
use pld_core::{learn, Dataset, Hyperparameters, PredicateId};
use proptest::prelude::*;

fn dataset(rows: Vec<Vec<bool>>, np: usize) -> Dataset {
    let names: Vec<String> = (0..np).map(|i| format!("p{}", i)).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Dataset::from_rows(&refs, &rows).unwrap()
}

fn arb_dataset(max_preds: usize, max_objects: usize) -> impl Strategy<Value = Dataset> {
    (2..=max_preds, 1..=max_objects, 0.2f64..0.8).prop_flat_map(|(np, no, density)| {
        prop::collection::vec(prop::collection::vec(prop::bool::weighted(density), np), no)
            .prop_map(move |rows| dataset(rows, np))
    })
}

fn key(rule: &Rule) -> (Vec<PredicateId>, PredicateId) {
    (rule.premise().to_vec(), rule.conclusion())
}

/// Probability of every proper subrule, counted from scratch.
fn all_subrule_probs(ds: &Dataset, rule: &Rule) -> Vec<f64> {
    let conf = Confidence::new(0.95).unwrap();
    let premise = rule.premise();
    (0u32..(1 << premise.len()) - 1)
        .map(|mask| {
            let sub = premise
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p);
            rule_stats(ds, &Rule::new(sub, rule.conclusion()).unwrap(), None, &conf).probability
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complete_search_matches_oracle(ds in arb_dataset(7, 40), size in 1usize..5) {
        let targets: Vec<PredicateId> = ds.language().ids().collect();
        let model = learn(&ds, &targets, &Hyperparameters::exhaustive(size)).unwrap();
        for t in &model.targets {
            let learned: BTreeSet<_> = t.law_set().map(|l| key(&l.rule)).collect();
            let oracle: BTreeSet<_> = enumerate_all_laws(&ds, t.conclusion, size)
                .unwrap()
                .iter()
                .map(|(r, _)| key(r))
                .collect();
            prop_assert_eq!(learned, oracle);
        }
    }

    #[test]
    fn deep_laws_are_sound_and_chained(ds in arb_dataset(8, 40), d in 1usize..3) {
        let hp = Hyperparameters { d, max_size: 6, ..Default::default() };
        let targets: Vec<PredicateId> = ds.language().ids().collect();
        let model = learn(&ds, &targets, &hp).unwrap();
        for t in &model.targets {
            for law in t.law_set() {
                let p = law.probability();
                prop_assert!(all_subrule_probs(&ds, &law.rule).iter().all(|&q| q < p));
                if law.level > d {
                    let seed = t.refined().iter().find(|s| {
                        s.level + 1 == law.level && s.rule.is_subrule_of(&law.rule)
                    });
                    prop_assert!(seed.is_some(), "no chain predecessor for {:?}", law.rule);
                    prop_assert!(seed.unwrap().probability() < p);
                }
            }
        }
        // deterministic
        prop_assert_eq!(&model, &learn(&ds, &targets, &hp).unwrap());
    }

    #[test]
    fn graph_nodes_are_coherent(ds in arb_dataset(7, 50), d in 1usize..3) {
        let conclusion = PredicateId(0);
        let hp = Hyperparameters { d, max_size: 5, ..Default::default() };
        let mut g = DerivationGraph::new(&ds, conclusion, &hp).unwrap();
        base_enumeration(&mut g, &ds, &hp, &mut |_| {}).unwrap();
        additional_enumeration(&mut g, &ds, &hp, &mut |_| {}).unwrap();
        let conf = Confidence::new(hp.confidence_level()).unwrap();
        let mut keys = BTreeSet::new();
        for (id, node) in g.nodes() {
            prop_assert!(keys.insert(node.rule.premise().to_vec()));
            prop_assert_eq!(node.object_cache.len(), node.stats.support);
            prop_assert_eq!(rule_stats(&ds, &node.rule, None, &conf), node.stats);
            prop_assert!(g.level(node.level()).contains(&id));
            for &pid in &node.parents {
                let parent = g.node(pid);
                prop_assert_eq!(parent.level() + 1, node.level());
                prop_assert!(parent.rule.is_subrule_of(&node.rule));
            }
            if node.in_reg {
                prop_assert!(g.reg(node.level()).contains(&id));
                prop_assert_eq!(node.is_law, Some(true));
            }
        }
        for k in 0..=g.depth() {
            for &id in g.reg(k) {
                let n = g.node(id);
                let p = n.probability();
                prop_assert!(all_subrule_probs(&ds, &n.rule).iter().all(|&q| q < p) || k == 0);
            }
        }
    }
}

/// Probability drops when P5 joins P1..P4 but the six-predicate premise
/// beats every subrule. Greedy refinement from depth 4 cannot reach it.
#[test]
fn hill_climbing_misses_non_monotone_law() {
    // columns P1..P6, R
    let mut rows = Vec::new();
    let push = |rows: &mut Vec<Vec<bool>>, n: usize, ps: [bool; 6], r: bool| {
        for _ in 0..n {
            let mut row = ps.to_vec();
            row.push(r);
            rows.push(row);
        }
    };
    push(&mut rows, 5, [true; 6], true);
    for i in 0..6 {
        let mut ps = [true; 6];
        ps[i] = false;
        push(&mut rows, 5, ps, false);
    }
    push(&mut rows, 40, [true, true, true, true, false, false], true);
    let ds = Dataset::from_rows(&["P1", "P2", "P3", "P4", "P5", "P6", "R"], &rows).unwrap();
    let r = PredicateId(6);
    let six = Rule::new((0..6).map(PredicateId), r).unwrap();

    let exact = enumerate_all_laws(&ds, r, 6).unwrap();
    assert!(exact
        .iter()
        .any(|(rule, s)| *rule == six && s.probability == 1.0));
    assert!(exact.iter().all(|(rule, _)| rule.size() != 5));

    let hp = Hyperparameters {
        d: 4,
        max_size: 6,
        ..Default::default()
    };
    let model = learn(&ds, &[r], &hp).unwrap();
    let t = &model.targets[0];
    let p1234 = Rule::new((0..4).map(PredicateId), r).unwrap();
    let law4 = t
        .laws
        .iter()
        .find(|l| l.rule == p1234)
        .expect("P1..P4 -> R is found");
    let conf = Confidence::new(0.95).unwrap();
    let with_p5 = rule_stats(&ds, &p1234.refine(PredicateId(4)).unwrap(), None, &conf);
    assert!(with_p5.probability < law4.probability());
    assert!(t.laws.iter().all(|l| l.rule != six));
    assert!(t.laws.iter().all(|l| l.level <= 4));
}
