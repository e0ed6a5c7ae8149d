//! Exhaustive law enumeration for small languages.
//!
//! Counts every premise subset directly from per-object predicate masks and
//! tests each against all of its proper subsets. Shares no code with the
//! graph search, so the two can check each other.

use alloc::vec::Vec;

use thiserror::Error;

use crate::dataset::Dataset;
use crate::language::PredicateId;
use crate::rule::{Confidence, Rule, RuleStats};

/// Largest number of non-conclusion predicates the oracle accepts.
pub const MAX_ORACLE_PREDICATES: usize = 16;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("oracle refuses {count} candidate predicates (limit {MAX_ORACLE_PREDICATES})")]
pub struct OracleTooLarge {
    pub count: usize,
}

/// Every rule with conclusion `conclusion` and at most `max_size` premise
/// predicates whose probability is non-zero and strictly above that of every
/// proper-subset premise. Sorted by premise size, then premise.
pub fn enumerate_all_laws(
    ds: &Dataset,
    conclusion: PredicateId,
    max_size: usize,
) -> Result<Vec<(Rule, RuleStats)>, OracleTooLarge> {
    let others: Vec<PredicateId> = ds.language().ids().filter(|&p| p != conclusion).collect();
    let m = others.len();
    if m > MAX_ORACLE_PREDICATES {
        return Err(OracleTooLarge { count: m });
    }
    let max_size = max_size.min(m);

    let rows: Vec<(u32, bool)> = (0..ds.n_objects())
        .map(|o| {
            let mask = others
                .iter()
                .enumerate()
                .filter(|&(_, &p)| ds.holds(p, o))
                .fold(0u32, |acc, (bit, _)| acc | 1 << bit);
            (mask, ds.holds(conclusion, o))
        })
        .collect();

    let full = 1usize << m;
    let mut counts: Vec<Option<(usize, usize)>> = alloc::vec![None; full];
    for (mask, slot) in counts.iter_mut().enumerate() {
        if (mask as u32).count_ones() as usize > max_size {
            continue;
        }
        let mask = mask as u32;
        let (mut support, mut co) = (0, 0);
        for &(row, r) in &rows {
            if row & mask == mask {
                support += 1;
                co += usize::from(r);
            }
        }
        *slot = Some((support, co));
    }
    let prob = |c: (usize, usize)| {
        if c.0 == 0 {
            0.0
        } else {
            c.1 as f64 / c.0 as f64
        }
    };

    let conf = Confidence::new(crate::hyper::REPORTING_LEVEL).expect("valid level");
    let mut laws = Vec::new();
    for (mask, c) in counts.iter().enumerate() {
        let Some(c) = *c else { continue };
        let p = prob(c);
        if p <= 0.0 {
            continue;
        }
        let mut dominant = true;
        if mask != 0 {
            let mut sub = (mask - 1) & mask;
            loop {
                let q = prob(counts[sub].expect("subsets are within size"));
                if q >= p {
                    dominant = false;
                    break;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        if dominant {
            let premise = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| others[b]);
            let rule = Rule::new(premise, conclusion).expect("conclusion excluded");
            laws.push((rule, RuleStats::from_counts(c.0, c.1, &conf)));
        }
    }
    laws.sort_by(|a, b| {
        a.0.size()
            .cmp(&b.0.size())
            .then_with(|| a.0.premise().cmp(b.0.premise()))
    });
    Ok(laws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::desk_d1;
    use alloc::vec;

    fn premises(laws: &[(Rule, RuleStats)]) -> Vec<(Vec<u32>, f64)> {
        laws.iter()
            .map(|(r, s)| (r.premise().iter().map(|p| p.0).collect(), s.probability))
            .collect()
    }

    #[test]
    fn desk_oracle() {
        let laws = enumerate_all_laws(&desk_d1(), PredicateId(2), 2).unwrap();
        assert_eq!(
            premises(&laws),
            vec![
                (vec![], 0.5),
                (vec![0], 0.75),
                (vec![1], 0.75),
                (vec![0, 1], 1.0)
            ]
        );
    }

    #[test]
    fn zero_probability_conclusion_has_no_laws() {
        let ds = Dataset::from_rows(&["a", "r"], &[vec![true, false], vec![false, false]]).unwrap();
        assert!(enumerate_all_laws(&ds, PredicateId(1), 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn size_zero_is_the_baseline() {
        let laws = enumerate_all_laws(&desk_d1(), PredicateId(2), 0).unwrap();
        assert_eq!(premises(&laws), vec![(vec![], 0.5)]);
    }

    #[test]
    fn refuses_large_languages() {
        let names: Vec<alloc::string::String> = (0..18).map(|i| alloc::format!("p{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ds = Dataset::from_rows(&refs, &[vec![false; 18]]).unwrap();
        assert_eq!(
            enumerate_all_laws(&ds, PredicateId(0), 2),
            Err(OracleTooLarge { count: 17 })
        );
    }

    #[test]
    fn laws_are_downward_witnessed() {
        let rows = crate::testutil::rows(&[
            "10110", "11011", "00111", "11100", "01011", "10101", "11111", "00010", "01100",
        ]);
        let ds = Dataset::from_rows(&["a", "b", "c", "d", "r"], &rows).unwrap();
        let r = PredicateId(4);
        let all = enumerate_all_laws(&ds, r, 4).unwrap();
        let conf = Confidence::new(0.95).unwrap();
        for (rule, stats) in &all {
            for i in 0..rule.size() {
                let sub = rule.without(i);
                let q = crate::rule::rule_stats(&ds, &sub, None, &conf).probability;
                assert!(q < stats.probability);
            }
        }
    }
}
