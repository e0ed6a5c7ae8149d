//! The rule derivation graph for one conclusion.
//!
//! Nodes are keyed by their premise set. An edge runs from a rule to each
//! refinement by one predicate. Every node caches the objects its premise
//! covers so that refinements are counted over that subset only.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::ConfigError;
use crate::hyper::Hyperparameters;
use crate::language::PredicateId;
use crate::rule::{premise_cover, rule_stats, significance_check, Confidence, Rule, RuleStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct RuleNode {
    pub rule: Rule,
    pub stats: RuleStats,
    /// `None` until every proper subrule has been materialized.
    pub is_law: Option<bool>,
    pub significant: bool,
    /// Law, significant and past the thresholds: a member of its level's REG set.
    pub in_reg: bool,
    /// Objects satisfying the premise, ascending.
    pub object_cache: Vec<u32>,
    /// Subrules one predicate smaller; `parents[i]` drops `premise[i]`.
    pub parents: Vec<NodeId>,
    pub children: Vec<NodeId>,
    /// Largest probability over all proper subrules, with the node holding it.
    max_sub: f64,
    witness: Option<NodeId>,
    complete: bool,
}

impl RuleNode {
    pub fn probability(&self) -> f64 {
        self.stats.probability
    }

    pub fn level(&self) -> usize {
        self.rule.size()
    }

    /// Highest probability among all proper subrules, once complete.
    pub fn max_subrule_probability(&self) -> Option<f64> {
        self.complete.then_some(self.max_sub)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapExceeded;

#[derive(Clone, Debug)]
pub struct DerivationGraph {
    conclusion: PredicateId,
    nodes: Vec<RuleNode>,
    index: BTreeMap<Vec<PredicateId>, NodeId>,
    levels: Vec<Vec<NodeId>>,
    regs: Vec<Vec<NodeId>>,
    conf: Confidence,
    node_cap: usize,
}

impl DerivationGraph {
    /// A graph holding only the root `∅ -> conclusion`, with `REG_0 = {root}`.
    pub fn new(
        ds: &Dataset,
        conclusion: PredicateId,
        hp: &Hyperparameters,
    ) -> Result<Self, ConfigError> {
        let conf = Confidence::new(hp.confidence_level())?;
        let rule = Rule::baseline(conclusion);
        let stats = rule_stats(ds, &rule, None, &conf);
        let root = RuleNode {
            is_law: Some(stats.probability > 0.0),
            significant: true,
            in_reg: true,
            object_cache: (0..ds.n_objects() as u32).collect(),
            parents: Vec::new(),
            children: Vec::new(),
            max_sub: f64::NEG_INFINITY,
            witness: None,
            complete: true,
            rule,
            stats,
        };
        let mut index = BTreeMap::new();
        index.insert(Vec::new(), NodeId::ROOT);
        Ok(DerivationGraph {
            conclusion,
            nodes: vec![root],
            index,
            levels: vec![vec![NodeId::ROOT]],
            regs: vec![vec![NodeId::ROOT]],
            conf,
            node_cap: hp.node_cap,
        })
    }

    pub fn conclusion(&self) -> PredicateId {
        self.conclusion
    }

    pub fn root(&self) -> &RuleNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &RuleNode {
        &self.nodes[id.index()]
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut RuleNode {
        &mut self.nodes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &RuleNode)> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (NodeId(i as u32), n))
    }

    pub fn lookup(&self, premise: &[PredicateId]) -> Option<NodeId> {
        self.index.get(premise).copied()
    }

    /// Nodes of premise size `k` (`Nodes_k`).
    pub fn level(&self, k: usize) -> &[NodeId] {
        self.levels.get(k).map_or(&[], Vec::as_slice)
    }

    /// Laws admitted at level `k` (`REG_k`).
    pub fn reg(&self, k: usize) -> &[NodeId] {
        self.regs.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub(crate) fn seal_reg(&mut self, k: usize, members: Vec<NodeId>) {
        if self.regs.len() <= k {
            self.regs.resize(k + 1, Vec::new());
        }
        self.regs[k] = members;
    }

    pub(crate) fn baseline_probability(&self) -> f64 {
        self.nodes[0].stats.probability
    }

    /// Refines node `from` by `p`, counting over `from`'s object cache, and
    /// inserts the result without any parent links.
    pub(crate) fn insert_refinement(
        &mut self,
        ds: &Dataset,
        from: NodeId,
        p: PredicateId,
        hp: &Hyperparameters,
    ) -> Result<NodeId, CapExceeded> {
        let parent = &self.nodes[from.index()];
        let rule = parent
            .rule
            .refine(p)
            .expect("refinement predicate already in premise");
        let conclusion = self.conclusion;
        let mut cache = Vec::new();
        let mut co = 0;
        for &o in &parent.object_cache {
            if ds.holds(p, o as usize) {
                cache.push(o);
                co += usize::from(ds.holds(conclusion, o as usize));
            }
        }
        let stats = RuleStats::from_counts(cache.len(), co, &self.conf);
        self.insert(rule, stats, cache, hp)
    }

    /// Inserts a subrule found missing during a parent search. No cache
    /// scope is known for it, so it is counted over the full dataset.
    fn insert_full(
        &mut self,
        ds: &Dataset,
        rule: Rule,
        hp: &Hyperparameters,
    ) -> Result<NodeId, CapExceeded> {
        let stats = rule_stats(ds, &rule, None, &self.conf);
        let cache: Vec<u32> = premise_cover(ds, rule.premise())
            .ones_iter()
            .map(|o| o as u32)
            .collect();
        self.insert(rule, stats, cache, hp)
    }

    fn insert(
        &mut self,
        rule: Rule,
        stats: RuleStats,
        object_cache: Vec<u32>,
        hp: &Hyperparameters,
    ) -> Result<NodeId, CapExceeded> {
        if self.nodes.len() >= self.node_cap {
            return Err(CapExceeded);
        }
        debug_assert!(!self.index.contains_key(rule.premise()));
        let id = NodeId(self.nodes.len() as u32);
        let level = rule.size();
        let significant = significance_check(&rule, &stats, hp, self.baseline_probability());
        self.index.insert(rule.premise().to_vec(), id);
        if self.levels.len() <= level {
            self.levels.resize(level + 1, Vec::new());
        }
        self.levels[level].push(id);
        self.nodes.push(RuleNode {
            rule,
            stats,
            is_law: None,
            significant,
            in_reg: false,
            object_cache,
            parents: Vec::new(),
            children: Vec::new(),
            max_sub: f64::NEG_INFINITY,
            witness: None,
            complete: false,
        });
        Ok(id)
    }

    pub(crate) fn link(&mut self, parent: NodeId, child: NodeId) {
        self.nodes[child.index()].parents.push(parent);
        self.nodes[parent.index()].children.push(child);
    }

    /// Links the next missing parent of `id` (the subrule dropping
    /// `premise[parents.len()]`), creating it over the full dataset if the
    /// graph lacks it.
    pub(crate) fn link_next_parent(
        &mut self,
        ds: &Dataset,
        id: NodeId,
        hp: &Hyperparameters,
    ) -> Result<NodeId, CapExceeded> {
        let node = &self.nodes[id.index()];
        let sub = node.rule.without(node.parents.len());
        let pid = match self.lookup(sub.premise()) {
            Some(pid) => pid,
            None => self.insert_full(ds, sub, hp)?,
        };
        self.link(pid, id);
        Ok(pid)
    }

    /// Records the max-over-subrules summary from the (fully linked) parents
    /// and fixes the node's law status.
    pub(crate) fn finish(&mut self, id: NodeId) {
        let node = &self.nodes[id.index()];
        debug_assert_eq!(node.parents.len(), node.rule.size());
        let mut best = f64::NEG_INFINITY;
        let mut witness = None;
        for &pid in &node.parents {
            let parent = &self.nodes[pid.index()];
            debug_assert!(parent.complete);
            if parent.stats.probability > best {
                best = parent.stats.probability;
                witness = Some(pid);
            }
            if parent.max_sub > best {
                best = parent.max_sub;
                witness = parent.witness;
            }
        }
        let p = node.stats.probability;
        let node = &mut self.nodes[id.index()];
        node.max_sub = best;
        node.witness = witness;
        node.complete = true;
        node.is_law = Some(crate::rule::law_condition(p, [best]));
    }

    /// Materializes and links every proper subrule of `id`, recursively.
    pub(crate) fn ensure_complete(
        &mut self,
        ds: &Dataset,
        id: NodeId,
        hp: &Hyperparameters,
    ) -> Result<(), CapExceeded> {
        if self.nodes[id.index()].complete {
            return Ok(());
        }
        while self.nodes[id.index()].parents.len() < self.nodes[id.index()].rule.size() {
            self.link_next_parent(ds, id, hp)?;
        }
        for i in 0..self.nodes[id.index()].parents.len() {
            let pid = self.nodes[id.index()].parents[i];
            self.ensure_complete(ds, pid, hp)?;
        }
        self.finish(id);
        Ok(())
    }

    /// Subrule witnessing the largest subrule probability, once complete.
    pub fn witness(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].witness
    }

    /// Largest probability among the direct parents.
    pub fn max_parent_probability(&self, id: NodeId) -> f64 {
        self.nodes[id.index()]
            .parents
            .iter()
            .map(|&p| self.nodes[p.index()].stats.probability)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
