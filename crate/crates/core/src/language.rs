//! Named Boolean predicates and how each was derived from the input table.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::DataError;
use crate::table::Cell;

/// Dense predicate index, `0..language.len()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredicateId(pub u32);

impl PredicateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for PredicateId {
    fn from(i: usize) -> Self {
        PredicateId(i as u32)
    }
}

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    AtMost,
    Above,
}

/// How a predicate is computed from its source column.
#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    Identity,
    OneHot {
        category: String,
    },
    /// `value <= threshold` (or `>` for [`Direction::Above`]), produced by
    /// recursive median splitting. `parent_range` is the sub-range that was
    /// split; `column_range` the observed min and max of the column.
    Threshold {
        threshold: f64,
        direction: Direction,
        level: u32,
        parent_range: (f64, f64),
        column_range: (f64, f64),
    },
    /// `lo < value <= hi`, or `lo <= value <= hi` when `closed_low`.
    Range {
        lo: f64,
        hi: f64,
        closed_low: bool,
    },
}

impl Transform {
    /// Evaluates the predicate on one raw cell. Missing cells never hold.
    pub fn evaluate(&self, cell: &Cell) -> bool {
        match (self, cell) {
            (Transform::Identity, Cell::Bool(b)) => *b,
            (Transform::OneHot { category }, Cell::Text(t)) => t == category,
            (
                Transform::Threshold {
                    threshold,
                    direction,
                    ..
                },
                Cell::Num(v),
            ) => match direction {
                Direction::AtMost => *v <= *threshold,
                Direction::Above => *v > *threshold,
            },
            (Transform::Range { lo, hi, closed_low }, Cell::Num(v)) => {
                (*v > *lo || (*closed_low && *v == *lo)) && *v <= *hi
            }
            _ => false,
        }
    }

    /// Numeric interval covered by the predicate, for range predictors.
    pub fn interval(&self) -> Option<(f64, f64)> {
        match *self {
            Transform::Threshold {
                threshold,
                direction: Direction::AtMost,
                column_range,
                ..
            } => Some((column_range.0, threshold)),
            Transform::Threshold {
                threshold,
                direction: Direction::Above,
                column_range,
                ..
            } => Some((threshold, column_range.1)),
            Transform::Range { lo, hi, .. } => Some((lo, hi)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredicateDef {
    pub id: PredicateId,
    pub name: String,
    pub column: String,
    /// Source column had missing cells; those objects never satisfy this predicate.
    pub column_has_missing: bool,
    pub transform: Transform,
}

/// Ordered predicate definitions with unique names and dense ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PredicateLanguage {
    predicates: Vec<PredicateDef>,
    by_name: BTreeMap<String, PredicateId>,
}

impl PredicateLanguage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        name: String,
        column: String,
        column_has_missing: bool,
        transform: Transform,
    ) -> Result<PredicateId, DataError> {
        if self.by_name.contains_key(&name) {
            return Err(DataError::DuplicatePredicate(name));
        }
        let id = PredicateId::from(self.predicates.len());
        self.by_name.insert(name.clone(), id);
        self.predicates.push(PredicateDef {
            id,
            name,
            column,
            column_has_missing,
            transform,
        });
        Ok(id)
    }

    /// Boolean identity predicate named after its column.
    pub fn push_boolean(&mut self, name: &str) -> Result<PredicateId, DataError> {
        self.push(name.into(), name.into(), false, Transform::Identity)
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn get(&self, id: PredicateId) -> &PredicateDef {
        &self.predicates[id.index()]
    }

    pub fn name(&self, id: PredicateId) -> &str {
        &self.predicates[id.index()].name
    }

    pub fn id_of(&self, name: &str) -> Option<PredicateId> {
        self.by_name.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PredicateDef> {
        self.predicates.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = PredicateId> {
        (0..self.predicates.len()).map(PredicateId::from)
    }

    pub fn contains(&self, id: PredicateId) -> bool {
        id.index() < self.predicates.len()
    }
}
