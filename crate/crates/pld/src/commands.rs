//! The `learn`, `predict`, `cluster` and `inspect` commands.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use pld_core::cluster::{assign_objects, find_feature_clusters};
use pld_core::dataset::{apply_language, binarize_with};
use pld_core::inference::{
    anomaly_score, classify, range_predictors, regress_average, Classification,
};
use pld_core::oracle::enumerate_all_laws;
use pld_core::table::{ColumnKind, RawTable};
use pld_core::{
    Dataset, Law, LearnError, Model, ObjectFeatures, PredicateId, PredicateLanguage, Transform,
};

use crate::config::{Config, DEFAULT_QUANTIZATION_DEPTH};
use crate::error::{PldError, Result};
use crate::ingest::load_csv;
use crate::manifest::Manifest;
use crate::parallel::{default_threads, learn_parallel};
use crate::report::{cluster_report, feature_list, format_law, level_report};
use crate::rulefile::{RuleFile, Status};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_P_MIN: f64 = 0.9;

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| PldError::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| PldError::io("<stdout>", e))
}

/// Predicates named directly, or every predicate derived from a named column.
fn resolve_names(language: &PredicateLanguage, names: &[String]) -> Result<Vec<PredicateId>> {
    let mut ids = Vec::new();
    for name in names {
        if let Some(id) = language.id_of(name) {
            ids.push(id);
            continue;
        }
        let from_column: Vec<PredicateId> = language
            .iter()
            .filter(|d| &d.column == name)
            .map(|d| d.id)
            .collect();
        if from_column.is_empty() {
            return Err(PldError::Validation(format!(
                "`{}` is neither a predicate nor a column",
                name
            )));
        }
        ids.extend(from_column);
    }
    let mut seen = BTreeSet::new();
    ids.retain(|id| seen.insert(*id));
    Ok(ids)
}

#[derive(Clone, Debug, Default)]
pub struct LearnArgs {
    pub data: PathBuf,
    pub config: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
    pub targets: Vec<String>,
    /// Numeric columns quantized into disjoint ranges; each range is a target.
    pub range_targets: Vec<String>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct LearnSummary {
    pub laws: usize,
    pub targets: usize,
}

/// Learns a model and writes it with a manifest next to it (`<out>.manifest`).
/// A node-cap abort still writes the laws found so far, marked PARTIAL.
pub fn learn(args: &LearnArgs, out: &mut dyn Write) -> Result<LearnSummary> {
    let config = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let manifest = args.manifest.as_deref().map(Manifest::load).transpose()?;
    let q = match (&manifest, config.quantization_depth) {
        (Some(m), Some(c)) if m.quantization_depth != c => {
            return Err(PldError::Validation(format!(
                "manifest quantization depth {} differs from config value {}",
                m.quantization_depth, c
            )))
        }
        (Some(m), _) => m.quantization_depth,
        (None, c) => c.unwrap_or(DEFAULT_QUANTIZATION_DEPTH),
    };
    if args.targets.is_empty() && args.range_targets.is_empty() {
        return Err(PldError::Validation("no targets given".into()));
    }
    let hints = manifest
        .as_ref()
        .map(Manifest::kind_hints)
        .unwrap_or_default();
    let table = load_csv(&args.data, &hints)?;
    for name in &args.range_targets {
        match table.column(name) {
            Some(c) if c.kind == ColumnKind::Numeric => {}
            Some(_) => {
                return Err(PldError::Validation(format!(
                    "range target `{}` is not numeric",
                    name
                )))
            }
            None => return Err(PldError::Validation(format!("no column `{}`", name))),
        }
    }
    let range_cols: Vec<&str> = args.range_targets.iter().map(String::as_str).collect();
    let ds = binarize_with(&table, q, &range_cols)?;
    let mut names = args.targets.clone();
    names.extend(args.range_targets.iter().cloned());
    let targets = resolve_names(ds.language(), &names)?;

    let hp = &config.hyperparameters;
    let threads = args.threads.unwrap_or_else(default_threads);
    let (result, log) = learn_parallel(&ds, &targets, hp, threads);
    emit(out, &level_report(ds.language(), &log))?;

    write_file(
        &manifest_path(&args.out),
        Manifest::describe(&table, q).render().as_bytes(),
    )?;
    match result {
        Ok(model) => {
            let summary = LearnSummary {
                laws: model.n_laws(),
                targets: model.targets.len(),
            };
            RuleFile::complete(model).save(&args.out)?;
            emit(
                out,
                &format!(
                    "wrote {} laws for {} targets to {}\n",
                    summary.laws,
                    summary.targets,
                    args.out.display()
                ),
            )?;
            Ok(summary)
        }
        Err(LearnError::NodeCap {
            partial,
            target,
            level,
            cap,
        }) => {
            let file = RuleFile {
                status: Status::Partial { target, level },
                model: *partial,
            };
            file.save(&args.out)?;
            emit(
                out,
                &format!(
                    "PARTIAL: node cap {} reached for {} at level {}; wrote {} laws to {}\n",
                    cap,
                    ds.language().name(target),
                    level,
                    file.model.n_laws(),
                    args.out.display()
                ),
            )?;
            Err(PldError::Learn(LearnError::NodeCap {
                partial: Box::new(file.model),
                target,
                level,
                cap,
            }))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn manifest_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn column_kinds(language: &PredicateLanguage) -> BTreeMap<String, ColumnKind> {
    language
        .iter()
        .map(|d| {
            let kind = match d.transform {
                Transform::Identity => ColumnKind::Boolean,
                Transform::OneHot { .. } => ColumnKind::Categorical,
                Transform::Threshold { .. } | Transform::Range { .. } => ColumnKind::Numeric,
            };
            (d.column.clone(), kind)
        })
        .collect()
}

/// Reads `data` against the model's language. Extra columns are a schema
/// error; missing columns are allowed only when `may_be_absent` says so.
fn featurize(
    model: &Model,
    data: &Path,
    may_be_absent: &dyn Fn(&str) -> bool,
) -> Result<(RawTable, Dataset)> {
    let hints = column_kinds(&model.language);
    let table = load_csv(data, &hints)?;
    if let Some(extra) = table
        .columns()
        .iter()
        .find(|c| !hints.contains_key(&c.name))
    {
        return Err(PldError::Schema(format!(
            "unexpected column `{}`",
            extra.name
        )));
    }
    if let Some(def) = model
        .language
        .iter()
        .find(|d| table.column(&d.column).is_none() && !may_be_absent(&d.column))
    {
        return Err(PldError::Schema(format!(
            "missing column `{}` for predicate `{}`",
            def.column, def.name
        )));
    }
    let ds = apply_language(model.language.clone(), &table, |_| true)?;
    Ok((table, ds))
}

fn load_model(path: &Path) -> Result<Model> {
    Ok(RuleFile::load(path)?.model)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Classify,
    Regress,
    Anomaly,
}

#[derive(Clone, Debug)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub data: PathBuf,
    pub out: PathBuf,
    pub mode: Mode,
    /// Conclusions to predict; defaults to every model target (every target
    /// with a numeric interval in regress mode).
    pub targets: Vec<String>,
    pub p_min: f64,
    pub strict_ties: bool,
    pub unweighted: bool,
}

impl Default for PredictArgs {
    fn default() -> Self {
        PredictArgs {
            model: PathBuf::new(),
            data: PathBuf::new(),
            out: PathBuf::new(),
            mode: Mode::Classify,
            targets: Vec::new(),
            p_min: DEFAULT_P_MIN,
            strict_ties: false,
            unweighted: false,
        }
    }
}

fn law_list(language: &PredicateLanguage, laws: &[Law]) -> String {
    laws.iter()
        .map(|l| format_law(language, l))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Writes one CSV row per object. Nothing is written if any step fails.
pub fn predict(args: &PredictArgs) -> Result<usize> {
    let model = load_model(&args.model)?;
    let lang = &model.language;
    let mut targets = if args.targets.is_empty() {
        model.targets().collect()
    } else {
        resolve_names(lang, &args.targets)?
    };
    if let Some(t) = targets.iter().find(|t| model.target(**t).is_none()) {
        return Err(PldError::Validation(format!(
            "model has no laws for `{}`",
            lang.name(*t)
        )));
    }
    if args.mode == Mode::Regress && args.targets.is_empty() {
        targets.retain(|&t| lang.get(t).transform.interval().is_some());
    }
    let target_columns: BTreeSet<&str> = targets
        .iter()
        .map(|&t| lang.get(t).column.as_str())
        .collect();
    let absent_ok = |c: &str| args.mode != Mode::Anomaly && target_columns.contains(c);
    let (_, ds) = featurize(&model, &args.data, &absent_ok)?;
    let hidden: Vec<PredicateId> = lang
        .iter()
        .filter(|d| target_columns.contains(d.column.as_str()))
        .map(|d| d.id)
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| PldError::io(&args.out, e.into());
    match args.mode {
        Mode::Classify => {
            if targets.is_empty() {
                return Err(PldError::Validation(
                    "no class predicates to predict".into(),
                ));
            }
            w.write_record(["object", "label", "probability", "laws", "diagnostics"])
                .map_err(csv_err)?;
            for o in 0..ds.n_objects() {
                let obj = ObjectFeatures::from_dataset(&ds, o, &hidden);
                let row = match classify(&model, &obj, &targets, args.strict_ties)? {
                    Classification::Label(p) => [
                        (o + 1).to_string(),
                        lang.name(p.label).to_string(),
                        format!("{:?}", p.probability),
                        p.fired.to_string(),
                        law_list(lang, &p.support_laws),
                    ],
                    Classification::Conflict(f) => [
                        (o + 1).to_string(),
                        "FAIL".into(),
                        format!("{:?}", f.tied[0].probability()),
                        f.fired.to_string(),
                        format!("conflict: {}", law_list(lang, &f.tied)),
                    ],
                };
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        Mode::Regress => {
            let predictors = range_predictors(&model, &targets)?;
            if predictors.is_empty() {
                return Err(PldError::Validation("model has no range targets".into()));
            }
            w.write_record(["object", "value", "laws", "diagnostics"])
                .map_err(csv_err)?;
            for o in 0..ds.n_objects() {
                let obj = ObjectFeatures::from_dataset(&ds, o, &hidden);
                let row = match regress_average(&model, &obj, &predictors, args.unweighted) {
                    Ok(v) => [
                        (o + 1).to_string(),
                        format!("{:?}", v.value),
                        v.fired.to_string(),
                        String::new(),
                    ],
                    Err(_) => [
                        (o + 1).to_string(),
                        "FAIL".into(),
                        "0".into(),
                        "no applicable range law".into(),
                    ],
                };
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        Mode::Anomaly => {
            w.write_record(["object", "score", "applicable", "violated"])
                .map_err(csv_err)?;
            for o in 0..ds.n_objects() {
                let obj = ObjectFeatures::from_dataset(&ds, o, &[]);
                let s = anomaly_score(&model, &obj, args.p_min)?;
                w.write_record([
                    (o + 1).to_string(),
                    format!("{:?}", s.score),
                    s.applicable.to_string(),
                    s.violated.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| PldError::io(&args.out, e.into_error()))?;
    write_file(&args.out, &bytes)?;
    Ok(ds.n_objects())
}

#[derive(Clone, Debug, Default)]
pub struct ClusterArgs {
    pub model: PathBuf,
    /// Objects to assign; without data only feature clusters are reported.
    pub data: Option<PathBuf>,
    pub out: PathBuf,
    pub epsilon: Option<f64>,
}

pub fn cluster(args: &ClusterArgs) -> Result<usize> {
    let epsilon = args.epsilon.unwrap_or(DEFAULT_EPSILON);
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(PldError::Validation(format!(
            "epsilon must be non-negative, got {}",
            epsilon
        )));
    }
    let model = load_model(&args.model)?;
    let laws: Vec<Law> = model
        .targets
        .iter()
        .flat_map(|t| t.law_set())
        .cloned()
        .collect();
    let clusters = find_feature_clusters(&laws, &model.language);
    let ds = match &args.data {
        Some(path) => featurize(&model, path, &|_| false)?.1,
        None => Dataset::new(
            model.language.clone(),
            vec![pld_core::BitColumn::zeros(0); model.language.len()],
            0,
        )?,
    };
    let n = clusters.len();
    let h = assign_objects(clusters, &ds, epsilon);
    write_file(
        &args.out,
        cluster_report(&model.language, &h, args.epsilon.is_none()).as_bytes(),
    )?;
    Ok(n)
}

#[derive(Clone, Debug, Default)]
pub struct InspectArgs {
    pub model: PathBuf,
    pub conclusion: Option<String>,
    pub min_prob: Option<f64>,
    pub max_size: Option<usize>,
    pub oracle: Option<PathBuf>,
}

pub fn inspect(args: &InspectArgs) -> Result<String> {
    let file = RuleFile::load(&args.model)?;
    let model = &file.model;
    let lang = &model.language;
    let only: Option<Vec<PredicateId>> = args
        .conclusion
        .as_ref()
        .map(|c| resolve_names(lang, std::slice::from_ref(c)))
        .transpose()?;
    let mut out = String::new();
    out.push_str(&match &file.status {
        Status::Complete => format!("# complete model, {} laws\n", model.n_laws()),
        Status::Partial { target, level } => format!(
            "# PARTIAL model (node cap at {} level {}), {} laws\n",
            lang.name(*target),
            level,
            model.n_laws()
        ),
    });
    for law in model.laws() {
        let keep = only
            .as_ref()
            .is_none_or(|c| c.contains(&law.rule.conclusion()))
            && args.min_prob.is_none_or(|p| law.probability() >= p)
            && args.max_size.is_none_or(|s| law.rule.size() <= s);
        if keep {
            out.push_str(&format_law(lang, law));
            out.push('\n');
        }
    }
    if let Some(path) = &args.oracle {
        out.push_str(&oracle_diff(model, path)?);
    }
    Ok(out)
}

/// Re-derives every target's laws by exhaustive enumeration and lists the
/// differences from the model.
fn oracle_diff(model: &Model, data: &Path) -> Result<String> {
    let (_, ds) = featurize(model, data, &|_| false)?;
    let lang = &model.language;
    let mut lines = Vec::new();
    for t in &model.targets {
        let exact = enumerate_all_laws(&ds, t.conclusion, model.hyperparameters.max_size)?;
        let exact: BTreeMap<_, _> = exact
            .into_iter()
            .map(|(rule, stats)| (rule.premise().to_vec(), (rule, stats)))
            .collect();
        let learned: BTreeMap<_, _> = t
            .law_set()
            .map(|l| (l.rule.premise().to_vec(), l))
            .collect();
        let show = |premise: &[PredicateId]| {
            let p = if premise.is_empty() {
                "∅".to_string()
            } else {
                feature_list(lang, premise)
            };
            format!("{} -> {}", p, lang.name(t.conclusion))
        };
        for (premise, (_, stats)) in &exact {
            match learned.get(premise) {
                None => lines.push(format!(
                    "missing: {}  p={:?}",
                    show(premise),
                    stats.probability
                )),
                Some(l)
                    if l.stats.support != stats.support
                        || l.stats.co_support != stats.co_support =>
                {
                    lines.push(format!(
                        "stats: {}  model {}/{} oracle {}/{}",
                        show(premise),
                        l.stats.co_support,
                        l.stats.support,
                        stats.co_support,
                        stats.support
                    ))
                }
                Some(_) => {}
            }
        }
        for (premise, l) in &learned {
            if !exact.contains_key(premise) {
                lines.push(format!("extra: {}  p={:?}", show(premise), l.probability()));
            }
        }
    }
    Ok(if lines.is_empty() {
        "diff: none\n".to_string()
    } else {
        format!("diff: {} differences\n{}\n", lines.len(), lines.join("\n"))
    })
}
