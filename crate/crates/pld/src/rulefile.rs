//! Plain-text, tab-separated model files.
//!
//! A file starts with a format line, the language fingerprint, a status line
//! (`complete`, or `PARTIAL` with the conclusion and level at which the node
//! cap stopped learning), the hyperparameters and the predicate definitions.
//! Each `target` line is followed by its laws, baseline first:
//!
//! ```text
//! law  <level>  <probability>  <support>  <co_support>  <wilson_lb>  <conclusion>  <premise>...
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing a rendered
//! file gives back the identical model.

use std::fmt::Write as _;
use std::path::Path;

use pld_core::language::Direction;
use pld_core::{
    Hyperparameters, Law, Model, PredicateId, PredicateLanguage, Rule, RuleStats, TargetLaws,
    Transform,
};
use sha2::{Digest, Sha256};

use crate::error::{PldError, Result};

pub const FORMAT: &str = "pld-rules";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Complete,
    /// Learning hit the node cap for `target` while building `level`.
    Partial {
        target: PredicateId,
        level: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleFile {
    pub status: Status,
    pub model: Model,
}

fn predicate_lines(language: &PredicateLanguage) -> Vec<String> {
    language
        .iter()
        .map(|def| {
            let mut line = format!(
                "predicate\t{}\t{}\t{}\t{}\t",
                def.id.0,
                def.name,
                def.column,
                u8::from(def.column_has_missing)
            );
            match &def.transform {
                Transform::Identity => line.push_str("identity"),
                Transform::OneHot { category } => {
                    let _ = write!(line, "onehot\t{}", category);
                }
                Transform::Threshold {
                    threshold,
                    direction,
                    level,
                    parent_range,
                    column_range,
                } => {
                    let dir = match direction {
                        Direction::AtMost => "le",
                        Direction::Above => "gt",
                    };
                    let _ = write!(
                        line,
                        "threshold\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        threshold,
                        dir,
                        level,
                        parent_range.0,
                        parent_range.1,
                        column_range.0,
                        column_range.1
                    );
                }
                Transform::Range { lo, hi, closed_low } => {
                    let _ = write!(
                        line,
                        "range\t{}\t{}\t{}",
                        lo,
                        hi,
                        if *closed_low { "closed" } else { "open" }
                    );
                }
            }
            line
        })
        .collect()
}

/// SHA-256 over the canonical predicate definitions, in hex.
pub fn fingerprint(language: &PredicateLanguage) -> String {
    let mut hasher = Sha256::new();
    for line in predicate_lines(language) {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{:02x}", b))
        .collect()
}

fn check_text(what: &str, s: &str) -> Result<()> {
    if s.contains(['\t', '\n', '\r']) {
        return Err(PldError::Validation(format!(
            "{} {:?} contains a tab or line break and cannot be stored",
            what, s
        )));
    }
    Ok(())
}

impl RuleFile {
    pub fn complete(model: Model) -> Self {
        RuleFile {
            status: Status::Complete,
            model,
        }
    }

    pub fn is_partial(&self) -> bool {
        matches!(self.status, Status::Partial { .. })
    }

    pub fn render(&self) -> Result<String> {
        let m = &self.model;
        for def in m.language.iter() {
            check_text("predicate name", &def.name)?;
            check_text("column name", &def.column)?;
            if let Transform::OneHot { category } = &def.transform {
                check_text("category", category)?;
            }
        }
        let name = |p: PredicateId| m.language.name(p);
        let mut out = String::new();
        let _ = writeln!(out, "{}\t{}", FORMAT, VERSION);
        let _ = writeln!(out, "fingerprint\t{}", fingerprint(&m.language));
        match &self.status {
            Status::Complete => out.push_str("status\tcomplete\n"),
            Status::Partial { target, level } => {
                let _ = writeln!(out, "status\tPARTIAL\t{}\t{}", name(*target), level);
            }
        }
        let hp = &m.hyperparameters;
        let _ = writeln!(out, "hp\td\t{}", hp.d);
        let _ = writeln!(out, "hp\tmax_size\t{}", hp.max_size);
        match hp.significance {
            Some(a) => writeln!(out, "hp\ta\t{}", a),
            None => writeln!(out, "hp\ta\toff"),
        }
        .ok();
        let _ = writeln!(out, "hp\tmin_support\t{}", hp.min_support);
        let _ = writeln!(out, "hp\tprob_threshold\t{}", hp.prob_threshold);
        let _ = writeln!(out, "hp\tgain_threshold\t{}", hp.gain_threshold);
        for (level, g) in &hp.per_level_gain {
            let _ = writeln!(out, "hp\tper_level_gain.{}\t{}", level, g);
        }
        let _ = writeln!(out, "hp\tnode_cap\t{}", hp.node_cap);
        for line in predicate_lines(&m.language) {
            out.push_str(&line);
            out.push('\n');
        }
        for t in &m.targets {
            let _ = writeln!(out, "target\t{}", name(t.conclusion));
            for law in &t.laws {
                let s = &law.stats;
                let _ = write!(
                    out,
                    "law\t{}\t{}\t{}\t{}\t{}\t{}",
                    law.level,
                    s.probability,
                    s.support,
                    s.co_support,
                    s.wilson_lb,
                    name(law.rule.conclusion())
                );
                for &p in law.rule.premise() {
                    out.push('\t');
                    out.push_str(name(p));
                }
                out.push('\n');
            }
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.render()?;
        std::fs::write(path, text).map_err(|e| PldError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PldError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        Parser { path, line: 0 }.run(text)
    }
}

struct Parser<'a> {
    path: &'a Path,
    line: usize,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> PldError {
        PldError::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            message: message.into(),
        }
    }

    fn field<T: std::str::FromStr>(&self, fields: &[&str], i: usize, what: &str) -> Result<T> {
        let raw = fields
            .get(i)
            .ok_or_else(|| self.err(format!("missing {}", what)))?;
        raw.parse()
            .map_err(|_| self.err(format!("bad {} {:?}", what, raw)))
    }

    fn arity(&self, fields: &[&str], n: usize) -> Result<()> {
        if fields.len() != n {
            return Err(self.err(format!(
                "`{}` line needs {} fields, found {}",
                fields[0],
                n,
                fields.len()
            )));
        }
        Ok(())
    }

    fn id(&self, language: &PredicateLanguage, name: &str) -> Result<PredicateId> {
        language
            .id_of(name)
            .ok_or_else(|| self.err(format!("unknown predicate {:?}", name)))
    }

    fn run(mut self, text: &str) -> Result<RuleFile> {
        let mut fingerprint_field = None;
        let mut status_fields: Option<(usize, Vec<String>)> = None;
        let mut hp = Hyperparameters {
            per_level_gain: Default::default(),
            ..Hyperparameters::default()
        };
        let mut language = PredicateLanguage::new();
        let mut targets: Vec<TargetLaws> = Vec::new();
        let mut saw_header = false;

        for (i, raw) in text.lines().enumerate() {
            self.line = i + 1;
            if raw.is_empty() {
                continue;
            }
            let f: Vec<&str> = raw.split('\t').collect();
            if !saw_header {
                if f.first() != Some(&FORMAT) {
                    return Err(self.err("not a pld rule file"));
                }
                self.arity(&f, 2)?;
                let v: u32 = self.field(&f, 1, "format version")?;
                if v != VERSION {
                    return Err(self.err(format!("unsupported format version {}", v)));
                }
                saw_header = true;
                continue;
            }
            match f[0] {
                "fingerprint" => {
                    self.arity(&f, 2)?;
                    fingerprint_field = Some((self.line, f[1].to_string()));
                }
                "status" => {
                    status_fields =
                        Some((self.line, f[1..].iter().map(|s| s.to_string()).collect()));
                }
                "hp" => {
                    self.arity(&f, 3)?;
                    match f[1] {
                        "d" => hp.d = self.field(&f, 2, "d")?,
                        "max_size" => hp.max_size = self.field(&f, 2, "max_size")?,
                        "a" => {
                            hp.significance = match f[2] {
                                "off" => None,
                                _ => Some(self.field(&f, 2, "a")?),
                            }
                        }
                        "min_support" => hp.min_support = self.field(&f, 2, "min_support")?,
                        "prob_threshold" => {
                            hp.prob_threshold = self.field(&f, 2, "prob_threshold")?
                        }
                        "gain_threshold" => {
                            hp.gain_threshold = self.field(&f, 2, "gain_threshold")?
                        }
                        "node_cap" => hp.node_cap = self.field(&f, 2, "node_cap")?,
                        key => match key.strip_prefix("per_level_gain.").map(str::parse::<usize>) {
                            Some(Ok(level)) => {
                                let g = self.field(&f, 2, "per_level_gain")?;
                                hp.per_level_gain.insert(level, g);
                            }
                            _ => return Err(self.err(format!("unknown hyperparameter {:?}", key))),
                        },
                    }
                }
                "predicate" => self.predicate(&f, &mut language)?,
                "target" => {
                    self.arity(&f, 2)?;
                    let c = self.id(&language, f[1])?;
                    if targets.iter().any(|t| t.conclusion == c) {
                        return Err(self.err(format!("duplicate target {:?}", f[1])));
                    }
                    targets.push(TargetLaws {
                        conclusion: c,
                        laws: Vec::new(),
                    });
                }
                "law" => {
                    let law = self.law(&f, &language)?;
                    let t = targets
                        .last_mut()
                        .ok_or_else(|| self.err("law before any target"))?;
                    if law.rule.conclusion() != t.conclusion {
                        return Err(self.err("law conclusion differs from its target"));
                    }
                    if t.laws.is_empty() != law.rule.is_baseline() {
                        return Err(self.err("each target must list exactly one baseline, first"));
                    }
                    t.laws.push(law);
                }
                other => return Err(self.err(format!("unknown record {:?}", other))),
            }
        }
        if !saw_header {
            self.line = 1;
            return Err(self.err("empty rule file"));
        }
        hp.validate().map_err(|e| self.err(e.to_string()))?;
        if let Some(t) = targets.iter().find(|t| t.laws.is_empty()) {
            return Err(self.err(format!(
                "target {:?} has no baseline",
                language.name(t.conclusion)
            )));
        }

        let Some((line, stored)) = fingerprint_field else {
            return Err(self.err("missing fingerprint"));
        };
        self.line = line;
        if stored != fingerprint(&language) {
            return Err(self.err("fingerprint does not match the predicate definitions"));
        }
        let Some((line, status)) = status_fields else {
            return Err(self.err("missing status"));
        };
        self.line = line;
        let status = match status.as_slice() {
            [s] if s == "complete" => Status::Complete,
            [s, target, level] if s == "PARTIAL" => Status::Partial {
                target: self.id(&language, target)?,
                level: level
                    .parse()
                    .map_err(|_| self.err(format!("bad level {:?}", level)))?,
            },
            _ => return Err(self.err("status must be `complete` or `PARTIAL <target> <level>`")),
        };
        Ok(RuleFile {
            status,
            model: Model {
                language,
                hyperparameters: hp,
                targets,
            },
        })
    }

    fn predicate(&self, f: &[&str], language: &mut PredicateLanguage) -> Result<()> {
        if f.len() < 6 {
            return Err(self.err("truncated predicate line"));
        }
        let id: u32 = self.field(f, 1, "predicate id")?;
        if id as usize != language.len() {
            return Err(self.err(format!(
                "predicate ids must be dense, expected {}",
                language.len()
            )));
        }
        let missing = match f[4] {
            "0" => false,
            "1" => true,
            other => return Err(self.err(format!("bad missing flag {:?}", other))),
        };
        let transform = match f[5] {
            "identity" => {
                self.arity(f, 6)?;
                Transform::Identity
            }
            "onehot" => {
                self.arity(f, 7)?;
                Transform::OneHot {
                    category: f[6].to_string(),
                }
            }
            "threshold" => {
                self.arity(f, 13)?;
                let direction = match f[7] {
                    "le" => Direction::AtMost,
                    "gt" => Direction::Above,
                    other => return Err(self.err(format!("bad direction {:?}", other))),
                };
                Transform::Threshold {
                    threshold: self.field(f, 6, "threshold")?,
                    direction,
                    level: self.field(f, 8, "split level")?,
                    parent_range: (self.field(f, 9, "range")?, self.field(f, 10, "range")?),
                    column_range: (self.field(f, 11, "range")?, self.field(f, 12, "range")?),
                }
            }
            "range" => {
                self.arity(f, 9)?;
                let closed_low = match f[8] {
                    "closed" => true,
                    "open" => false,
                    other => return Err(self.err(format!("bad bound {:?}", other))),
                };
                Transform::Range {
                    lo: self.field(f, 6, "lower bound")?,
                    hi: self.field(f, 7, "upper bound")?,
                    closed_low,
                }
            }
            other => return Err(self.err(format!("unknown transform {:?}", other))),
        };
        language
            .push(f[2].to_string(), f[3].to_string(), missing, transform)
            .map_err(|e| self.err(e.to_string()))?;
        Ok(())
    }

    fn law(&self, f: &[&str], language: &PredicateLanguage) -> Result<Law> {
        if f.len() < 7 {
            return Err(self.err("truncated law line"));
        }
        let level: usize = self.field(f, 1, "level")?;
        let stats = RuleStats {
            probability: self.field(f, 2, "probability")?,
            support: self.field(f, 3, "support")?,
            co_support: self.field(f, 4, "co_support")?,
            wilson_lb: self.field(f, 5, "wilson_lb")?,
        };
        if stats.co_support > stats.support || !(0.0..=1.0).contains(&stats.probability) {
            return Err(self.err("inconsistent law statistics"));
        }
        let conclusion = self.id(language, f[6])?;
        let premise = f[7..]
            .iter()
            .map(|n| self.id(language, n))
            .collect::<Result<Vec<_>>>()?;
        let rule = Rule::new(premise, conclusion).map_err(|e| self.err(e.to_string()))?;
        if rule.size() != level {
            return Err(self.err("premise size does not match the level"));
        }
        Ok(Law { rule, stats, level })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pld_core::dataset::Dataset;

    fn desk_model() -> Model {
        let rows: Vec<Vec<bool>> = ["111", "111", "101", "100", "010", "011", "000", "000"]
            .iter()
            .map(|r| r.chars().map(|c| c == '1').collect())
            .collect();
        let ds = Dataset::from_rows(&["A", "B", "R"], &rows).unwrap();
        pld_core::learn(&ds, &[PredicateId(2)], &Hyperparameters::default()).unwrap()
    }

    #[test]
    fn round_trips_exactly() {
        let file = RuleFile::complete(desk_model());
        let text = file.render().unwrap();
        let back = RuleFile::parse(&text, Path::new("m")).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.render().unwrap(), text);
    }

    #[test]
    fn partial_status_round_trips() {
        let file = RuleFile {
            status: Status::Partial {
                target: PredicateId(2),
                level: 3,
            },
            model: desk_model(),
        };
        let text = file.render().unwrap();
        assert!(text.contains("status\tPARTIAL\tR\t3"));
        assert_eq!(RuleFile::parse(&text, Path::new("m")).unwrap(), file);
    }

    #[test]
    fn tampered_definitions_fail_fingerprint() {
        let text = RuleFile::complete(desk_model()).render().unwrap();
        let bad = text.replace(
            "predicate\t1\tB\tB\t0\tidentity",
            "predicate\t1\tB\tC\t0\tidentity",
        );
        match RuleFile::parse(&bad, Path::new("m")) {
            Err(PldError::Parse {
                line: 2, message, ..
            }) => assert!(message.contains("fingerprint")),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = RuleFile::complete(desk_model()).render().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let law_line = lines.iter().position(|l| l.starts_with("law\t1")).unwrap();
        let mut broken: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        broken[law_line] = broken[law_line].replace("\tA", "\tZ");
        match RuleFile::parse(&broken.join("\n"), Path::new("m")) {
            Err(PldError::Parse { line, .. }) => assert_eq!(line, law_line + 1),
            other => panic!("{:?}", other),
        }
        assert!(matches!(
            RuleFile::parse("hello\n", Path::new("m")),
            Err(PldError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn names_with_tabs_are_rejected() {
        let ds = Dataset::from_rows(&["a\tb", "R"], &[vec![true, true]]).unwrap();
        let m = pld_core::learn(&ds, &[PredicateId(1)], &Hyperparameters::default()).unwrap();
        assert!(matches!(
            RuleFile::complete(m).render(),
            Err(PldError::Validation(_))
        ));
    }
}
