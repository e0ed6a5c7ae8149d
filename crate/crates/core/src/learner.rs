//! Law search over a derivation graph: complete base enumeration to depth
//! `d`, then hill-climbing refinement of the depth-`d` laws.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::LearnError;
use crate::error::RuleError;
use crate::graph::{CapExceeded, DerivationGraph, NodeId, RuleNode};
use crate::hyper::Hyperparameters;
use crate::language::PredicateId;
use crate::model::{Law, Model, TargetLaws};
use crate::rule::{law_condition, Rule};

/// Node and law counts for one sealed level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelReport {
    pub conclusion: PredicateId,
    pub level: usize,
    pub nodes: usize,
    pub laws: usize,
}

/// Result of learning one conclusion.
#[derive(Clone, Debug)]
pub struct TargetOutcome {
    pub laws: TargetLaws,
    pub levels: Vec<LevelReport>,
    pub graph_nodes: usize,
    /// Level being built when the node cap was hit.
    pub capped_at: Option<usize>,
}

/// Outcome of the parent search for a refinement candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParentCheck {
    Connected,
    /// Some proper subrule is at least as probable as the candidate.
    Rejected {
        witness: NodeId,
    },
}

/// Learns laws for every conclusion in `targets`.
///
/// Conclusions are independent; each gets its own graph. On a node-cap
/// abort the error carries every law from levels sealed before the abort.
pub fn learn(
    ds: &Dataset,
    targets: &[PredicateId],
    hp: &Hyperparameters,
) -> Result<Model, LearnError> {
    let outcomes = targets
        .iter()
        .map(|&t| learn_target(ds, t, hp, &mut |_| {}))
        .collect::<Result<Vec<_>, _>>()?;
    assemble(ds, hp, outcomes)
}

/// Collects per-conclusion outcomes into a model, surfacing the first capped one.
pub fn assemble(
    ds: &Dataset,
    hp: &Hyperparameters,
    outcomes: Vec<TargetOutcome>,
) -> Result<Model, LearnError> {
    let capped = outcomes
        .iter()
        .find_map(|o| o.capped_at.map(|lvl| (o.laws.conclusion, lvl)));
    let model = Model {
        language: ds.language().clone(),
        hyperparameters: hp.clone(),
        targets: outcomes.into_iter().map(|o| o.laws).collect(),
    };
    match capped {
        None => Ok(model),
        Some((target, level)) => Err(LearnError::NodeCap {
            partial: Box::new(model),
            target,
            level,
            cap: hp.node_cap,
        }),
    }
}

/// Learns the laws for a single conclusion, reporting each sealed level.
pub fn learn_target(
    ds: &Dataset,
    target: PredicateId,
    hp: &Hyperparameters,
    on_level: &mut dyn FnMut(&LevelReport),
) -> Result<TargetOutcome, LearnError> {
    if targets_invalid(ds, target) {
        return Err(LearnError::UnknownTarget(target));
    }
    hp.validate()?;
    let mut graph = DerivationGraph::new(ds, target, hp)?;
    let mut levels = Vec::new();
    let mut record = |r: LevelReport| {
        on_level(&r);
        levels.push(r);
    };
    record(LevelReport {
        conclusion: target,
        level: 0,
        nodes: 1,
        laws: 1,
    });
    let mut capped_at = base_enumeration(&mut graph, ds, hp, &mut record).err();
    if capped_at.is_none() {
        capped_at = additional_enumeration(&mut graph, ds, hp, &mut record).err();
    }
    Ok(TargetOutcome {
        laws: collect_laws(&graph, capped_at),
        levels,
        graph_nodes: graph.len(),
        capped_at,
    })
}

fn targets_invalid(ds: &Dataset, target: PredicateId) -> bool {
    !ds.language().contains(target)
}

/// Union of the sealed REG sets, baseline first. Levels at or above an
/// aborted level are left out.
fn collect_laws(graph: &DerivationGraph, capped_at: Option<usize>) -> TargetLaws {
    let root = graph.root();
    let mut laws = Vec::from([Law {
        rule: root.rule.clone(),
        stats: root.stats,
        level: 0,
    }]);
    let top = capped_at.map_or(graph.depth(), |l| l.saturating_sub(1));
    for k in 1..=top {
        laws.extend(graph.reg(k).iter().map(|&id| {
            let n = graph.node(id);
            Law {
                rule: n.rule.clone(),
                stats: n.stats,
                level: k,
            }
        }));
    }
    TargetLaws {
        conclusion: graph.conclusion(),
        laws,
    }
}

/// `node`'s rule extended by `p`.
pub fn refine(node: &RuleNode, p: PredicateId) -> Result<Rule, RuleError> {
    node.rule.refine(p)
}

/// Builds levels `1..=d`: every rule of that size exists as a node, linked
/// to all of its parents, and `REG_k` holds the admitted laws.
///
/// Returns the level being built if the node cap is hit.
pub fn base_enumeration(
    g: &mut DerivationGraph,
    ds: &Dataset,
    hp: &Hyperparameters,
    record: &mut dyn FnMut(LevelReport),
) -> Result<(), usize> {
    let conclusion = g.conclusion();
    let n = ds.n_predicates();
    for k in 1..=hp.d {
        let prev: Vec<NodeId> = g.level(k - 1).to_vec();
        let mut candidates = Vec::new();
        let mut created = 0;
        for from in prev {
            // Extending only past the largest premise id generates each
            // premise set exactly once.
            let start = g
                .node(from)
                .rule
                .premise()
                .last()
                .map_or(0, |p| p.index() + 1);
            for p in (start..n).map(PredicateId::from) {
                if p == conclusion {
                    continue;
                }
                let id = g
                    .insert_refinement(ds, from, p, hp)
                    .map_err(|CapExceeded| k)?;
                created += 1;
                for i in 0..k {
                    let sub = g.node(id).rule.without(i);
                    let pid = g
                        .lookup(sub.premise())
                        .expect("base enumeration materializes every smaller rule");
                    g.link(pid, id);
                }
                g.finish(id);
                let node = g.node(id);
                if node.is_law == Some(true) && node.significant {
                    candidates.push(id);
                }
            }
        }
        let reg = apply_thresholds(g, &candidates, hp, k);
        seal(g, reg, k, record);
        if created == 0 {
            break;
        }
    }
    Ok(())
}

/// Refines the members of `REG_{k-1}` one predicate at a time for
/// `k = d+1 ..= max_size`, stopping early when a level admits no laws.
pub fn additional_enumeration(
    g: &mut DerivationGraph,
    ds: &Dataset,
    hp: &Hyperparameters,
    record: &mut dyn FnMut(LevelReport),
) -> Result<(), usize> {
    let conclusion = g.conclusion();
    let n = ds.n_predicates();
    for k in hp.d + 1..=hp.max_size {
        let seeds: Vec<NodeId> = g.reg(k - 1).to_vec();
        if seeds.is_empty() {
            break;
        }
        let mut candidates = Vec::new();
        for seed in seeds {
            for p in (0..n).map(PredicateId::from) {
                let rule = g.node(seed).rule.clone();
                if p == conclusion || rule.premise().binary_search(&p).is_ok() {
                    continue;
                }
                let key = rule.refine(p).expect("checked above");
                if g.lookup(key.premise()).is_some() {
                    continue;
                }
                let id = g
                    .insert_refinement(ds, seed, p, hp)
                    .map_err(|CapExceeded| k)?;
                if !g.node(id).significant {
                    continue;
                }
                if find_parents(g, ds, id, hp).map_err(|CapExceeded| k)? == ParentCheck::Connected {
                    candidates.push(id);
                }
            }
        }
        let reg = apply_thresholds(g, &candidates, hp, k);
        let empty = reg.is_empty();
        seal(g, reg, k, record);
        if empty {
            break;
        }
    }
    Ok(())
}

fn seal(g: &mut DerivationGraph, reg: Vec<NodeId>, k: usize, record: &mut dyn FnMut(LevelReport)) {
    for &id in &reg {
        g.node_mut(id).in_reg = true;
    }
    let laws = reg.len();
    g.seal_reg(k, reg);
    record(LevelReport {
        conclusion: g.conclusion(),
        level: k,
        nodes: g.level(k).len(),
        laws,
    });
}

/// Locates or creates every subrule one predicate smaller than `id` and
/// links it as a parent, rejecting `id` as soon as a subrule at least as
/// probable turns up. Surviving candidates then have their parents
/// completed recursively, so the verdict covers all proper subrules.
pub fn find_parents(
    g: &mut DerivationGraph,
    ds: &Dataset,
    id: NodeId,
    hp: &Hyperparameters,
) -> Result<ParentCheck, CapExceeded> {
    let p = g.node(id).probability();
    let k = g.node(id).level();
    // Parents linked by an earlier, rejected search were already checked.
    for &pid in &g.node(id).parents {
        if g.node(pid).probability() >= p {
            return Ok(ParentCheck::Rejected { witness: pid });
        }
    }
    while g.node(id).parents.len() < k {
        let pid = g.link_next_parent(ds, id, hp)?;
        if g.node(pid).probability() >= p {
            return Ok(ParentCheck::Rejected { witness: pid });
        }
    }
    for i in 0..k {
        let pid = g.node(id).parents[i];
        g.ensure_complete(ds, pid, hp)?;
        let parent = g.node(pid);
        if parent.max_subrule_probability().is_some_and(|m| m >= p) {
            let witness = g.witness(pid).expect("complete node with a subrule");
            return Ok(ParentCheck::Rejected { witness });
        }
    }
    g.finish(id);
    debug_assert_eq!(g.node(id).is_law, Some(p > 0.0));
    Ok(ParentCheck::Connected)
}

/// Keeps the laws at or above the probability threshold whose gain over
/// their strongest direct parent meets the level's gain threshold.
pub fn apply_thresholds(
    g: &DerivationGraph,
    candidates: &[NodeId],
    hp: &Hyperparameters,
    level: usize,
) -> Vec<NodeId> {
    let min_gain = hp.gain_at(level);
    candidates
        .iter()
        .copied()
        .filter(|&id| {
            let node = g.node(id);
            let p = node.probability();
            debug_assert!(node.is_complete());
            debug_assert!(law_condition(p, node.max_subrule_probability()));
            p >= hp.prob_threshold && p - g.max_parent_probability(id) >= min_gain
        })
        .collect()
}
