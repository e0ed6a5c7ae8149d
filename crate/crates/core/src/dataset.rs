//! Boolean object x predicate matrix and the binarization that produces it.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bitset::BitColumn;
use crate::error::DataError;
use crate::language::{Direction, PredicateId, PredicateLanguage, Transform};
use crate::table::{Cell, ColumnKind, RawTable};

/// Immutable Boolean dataset, stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    language: PredicateLanguage,
    columns: Vec<BitColumn>,
    n_objects: usize,
}

impl Dataset {
    pub fn new(
        language: PredicateLanguage,
        columns: Vec<BitColumn>,
        n_objects: usize,
    ) -> Result<Self, DataError> {
        if columns.len() != language.len() || columns.iter().any(|c| c.len() != n_objects) {
            return Err(DataError::ShapeMismatch {
                columns: columns.len(),
                predicates: language.len(),
            });
        }
        Ok(Dataset {
            language,
            columns,
            n_objects,
        })
    }

    /// Builds a dataset of identity predicates from row-major Boolean rows.
    pub fn from_rows(names: &[&str], rows: &[Vec<bool>]) -> Result<Self, DataError> {
        let mut language = PredicateLanguage::new();
        for name in names {
            language.push_boolean(name)?;
        }
        let mut columns: Vec<BitColumn> =
            names.iter().map(|_| BitColumn::zeros(rows.len())).collect();
        for (o, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(DataError::Ragged {
                    column: format!("row {}", o),
                    expected: names.len(),
                    found: row.len(),
                });
            }
            for (p, &bit) in row.iter().enumerate() {
                if bit {
                    columns[p].set(o, true);
                }
            }
        }
        Self::new(language, columns, rows.len())
    }

    pub fn language(&self) -> &PredicateLanguage {
        &self.language
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_predicates(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, p: PredicateId) -> &BitColumn {
        &self.columns[p.index()]
    }

    /// Whether predicate `p` holds on object `object`.
    ///
    /// Panics when either index is out of range.
    #[inline]
    pub fn holds(&self, p: PredicateId, object: usize) -> bool {
        assert!(
            object < self.n_objects,
            "object {} out of range ({} objects)",
            object,
            self.n_objects
        );
        self.columns[p.index()].get(object)
    }

    /// Predicates true on `object`, ascending.
    pub fn object_predicates(&self, object: usize) -> Vec<PredicateId> {
        self.language
            .ids()
            .filter(|&p| self.holds(p, object))
            .collect()
    }
}

/// One median split: the threshold, its split level and the sub-range split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub threshold: f64,
    pub level: u32,
    pub range: (f64, f64),
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Recursive median thresholds over a sorted multiset, to depth `depth`.
///
/// Output is in level order, left to right within a level. A range whose
/// values are all equal is not split. When the median equals the range
/// maximum, the threshold drops to the largest value below it so both sides
/// stay non-empty.
pub fn median_thresholds(sorted: &[f64], depth: u32) -> Vec<Split> {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "values not sorted");
    let mut out = Vec::new();
    let mut ranges: Vec<&[f64]> = Vec::from([sorted]);
    for level in 1..=depth {
        let mut next = Vec::new();
        for range in ranges {
            let (Some(&lo), Some(&hi)) = (range.first(), range.last()) else {
                continue;
            };
            if lo == hi {
                continue;
            }
            let mut t = median(range);
            if t >= hi {
                t = range.iter().rev().copied().find(|&v| v < hi).unwrap_or(lo);
            }
            out.push(Split {
                threshold: t,
                level,
                range: (lo, hi),
            });
            let cut = range.partition_point(|&v| v <= t);
            next.push(&range[..cut]);
            next.push(&range[cut..]);
        }
        ranges = next;
    }
    out
}

/// Binarizes with median-threshold predicates for every numeric column.
pub fn binarize(table: &RawTable, depth: u32) -> Result<Dataset, DataError> {
    binarize_with(table, depth, &[])
}

/// Like [`binarize`], but numeric columns named in `range_columns` become
/// disjoint range predicates (the leaves of the median split) instead of
/// one-sided thresholds. These serve as quantized regression targets.
pub fn binarize_with(
    table: &RawTable,
    depth: u32,
    range_columns: &[&str],
) -> Result<Dataset, DataError> {
    let mut language = PredicateLanguage::new();
    for col in table.columns() {
        let missing = col.has_missing();
        if col.cells.iter().all(|c| matches!(c, Cell::Missing)) {
            return Err(DataError::AllMissing(col.name.clone()));
        }
        match col.kind {
            ColumnKind::Boolean => {
                language.push(
                    col.name.clone(),
                    col.name.clone(),
                    missing,
                    Transform::Identity,
                )?;
            }
            ColumnKind::Categorical => {
                let cats: BTreeSet<&str> = col
                    .cells
                    .iter()
                    .filter_map(|c| match c {
                        Cell::Text(t) => Some(t.as_str()),
                        _ => None,
                    })
                    .collect();
                for cat in cats {
                    language.push(
                        format!("{}={}", col.name, cat),
                        col.name.clone(),
                        missing,
                        Transform::OneHot {
                            category: cat.to_string(),
                        },
                    )?;
                }
            }
            ColumnKind::Numeric => {
                let mut values: Vec<f64> = col
                    .cells
                    .iter()
                    .filter_map(|c| match c {
                        Cell::Num(v) => Some(*v),
                        _ => None,
                    })
                    .collect();
                values.sort_by(f64::total_cmp);
                let column_range = (values[0], values[values.len() - 1]);
                let splits = median_thresholds(&values, depth);
                if range_columns.contains(&col.name.as_str()) {
                    push_ranges(&mut language, &col.name, missing, &splits, column_range)?;
                } else {
                    for s in splits {
                        language.push(
                            format!("{}<={}", col.name, s.threshold),
                            col.name.clone(),
                            missing,
                            Transform::Threshold {
                                threshold: s.threshold,
                                direction: Direction::AtMost,
                                level: s.level,
                                parent_range: s.range,
                                column_range,
                            },
                        )?;
                    }
                }
            }
        }
    }
    apply_language(language, table, |_| false)
}

fn push_ranges(
    language: &mut PredicateLanguage,
    column: &str,
    missing: bool,
    splits: &[Split],
    (min, max): (f64, f64),
) -> Result<(), DataError> {
    let mut cuts: Vec<f64> = splits.iter().map(|s| s.threshold).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(min);
    bounds.extend(cuts);
    bounds.push(max);
    for (i, w) in bounds.windows(2).enumerate() {
        let closed_low = i == 0;
        let name = if closed_low {
            format!("{} in [{},{}]", column, w[0], w[1])
        } else {
            format!("{} in ({},{}]", column, w[0], w[1])
        };
        language.push(
            name,
            column.to_string(),
            missing,
            Transform::Range {
                lo: w[0],
                hi: w[1],
                closed_low,
            },
        )?;
    }
    Ok(())
}

/// Evaluates an existing language on a table.
///
/// Predicates whose source column is absent are an error unless
/// `may_be_absent` returns true for them, in which case they are all-false.
pub fn apply_language(
    language: PredicateLanguage,
    table: &RawTable,
    may_be_absent: impl Fn(PredicateId) -> bool,
) -> Result<Dataset, DataError> {
    let n = table.n_objects();
    let mut columns = Vec::with_capacity(language.len());
    for def in language.iter() {
        let mut bits = BitColumn::zeros(n);
        match table.column(&def.column) {
            Some(col) => {
                for (o, cell) in col.cells.iter().enumerate() {
                    if def.transform.evaluate(cell) {
                        bits.set(o, true);
                    }
                }
            }
            None if may_be_absent(def.id) => {}
            None => return Err(DataError::MissingColumn(String::from(def.column.as_str()))),
        }
        columns.push(bits);
    }
    Dataset::new(language, columns, n)
}
