//! Human-readable renderings: law listings, level reports, cluster reports.

use std::fmt::Write as _;

use pld_core::{ClusterHierarchy, Law, PredicateId, PredicateLanguage};

use crate::parallel::LearnLog;

pub fn feature_list(language: &PredicateLanguage, ids: &[PredicateId]) -> String {
    ids.iter()
        .map(|&p| language.name(p))
        .collect::<Vec<_>>()
        .join(", ")
}

/// `P1, P2 -> R  p=0.92 support=40`; an empty premise is written `∅`.
pub fn format_law(language: &PredicateLanguage, law: &Law) -> String {
    let premise = if law.rule.is_baseline() {
        "∅".to_string()
    } else {
        feature_list(language, law.rule.premise())
    };
    format!(
        "{} -> {}  p={:?} support={}",
        premise,
        language.name(law.rule.conclusion()),
        law.probability(),
        law.stats.support
    )
}

pub fn level_report(language: &PredicateLanguage, log: &LearnLog) -> String {
    let mut out = String::new();
    for (target, levels) in &log.targets {
        let _ = writeln!(out, "target {}", language.name(*target));
        for t in levels {
            let _ = writeln!(
                out,
                "level {}: nodes={}, laws={}, time={:.3}ms",
                t.report.level,
                t.report.nodes,
                t.report.laws,
                t.elapsed.as_secs_f64() * 1e3
            );
        }
    }
    out
}

/// Objects are numbered from 1 in data-row order.
pub fn cluster_report(
    language: &PredicateLanguage,
    h: &ClusterHierarchy,
    epsilon_is_default: bool,
) -> String {
    let mut out = String::from("# pld cluster report\n");
    let _ = writeln!(
        out,
        "epsilon = {:?}{}",
        h.epsilon,
        if epsilon_is_default { " (default)" } else { "" }
    );
    let _ = writeln!(out, "clusters = {}", h.feature_clusters.len());
    for (ci, c) in h.feature_clusters.iter().enumerate() {
        let _ = writeln!(out, "\ncluster {}", ci);
        let _ = writeln!(
            out,
            "  features: {{{}}}",
            feature_list(language, &c.features)
        );
        let _ = writeln!(out, "  agreement: {:?}", c.agreement);
        out.push_str("  laws:\n");
        for law in &c.characteristic_set {
            let _ = writeln!(out, "    {}", format_law(language, law));
        }
        out.push_str("  members:\n");
        let mut members: Vec<_> = h.members(ci).collect();
        members.sort_by(|a, b| a.band.cmp(&b.band).then(a.object.cmp(&b.object)));
        for m in members {
            let _ = writeln!(
                out,
                "    object {} score={:?} band={}{}",
                m.object + 1,
                m.score,
                m.band,
                if m.below_zero { " below-zero" } else { "" }
            );
        }
    }
    let unassigned: Vec<String> = h
        .object_assignments
        .iter()
        .filter(|a| a.cluster.is_none())
        .map(|a| (a.object + 1).to_string())
        .collect();
    if !unassigned.is_empty() {
        let _ = writeln!(out, "\nunassigned: {}", unassigned.join(", "));
    }
    if !h.order.is_empty() {
        out.push_str("\norder:\n");
        for (a, b) in &h.order {
            let _ = writeln!(out, "  cluster {} < cluster {}", a, b);
        }
    }
    out
}
