//! Dataset manifests: the quantization depth and the kind of every column.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use pld_core::table::{ColumnKind, RawTable};

use crate::config::key_values;
use crate::error::{PldError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub quantization_depth: u32,
    pub columns: Vec<(String, ColumnKind)>,
}

impl Manifest {
    pub fn describe(table: &RawTable, quantization_depth: u32) -> Self {
        Manifest {
            quantization_depth,
            columns: table
                .columns()
                .iter()
                .map(|c| (c.name.clone(), c.kind))
                .collect(),
        }
    }

    pub fn kind_hints(&self) -> BTreeMap<String, ColumnKind> {
        self.columns.iter().cloned().collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("# pld dataset manifest\nq = {}\n", self.quantization_depth);
        for (name, kind) in &self.columns {
            let _ = writeln!(out, "column.{} = {}", name, kind.as_str());
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PldError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut quantization_depth = None;
        let mut columns = Vec::new();
        for (line, key, value, raw) in key_values(text) {
            let err = |message: String| PldError::Parse {
                path: path.to_path_buf(),
                line,
                message,
            };
            if key == "q" {
                quantization_depth = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("bad quantization depth {:?}", value)))?,
                );
            } else if let Some(name) = key.strip_prefix("column.") {
                let kind = ColumnKind::parse(value)
                    .ok_or_else(|| err(format!("unknown column kind {:?}", value)))?;
                columns.push((name.to_string(), kind));
            } else {
                return Err(err(format!("unexpected line {:?}", raw)));
            }
        }
        Ok(Manifest {
            quantization_depth: quantization_depth
                .unwrap_or(crate::config::DEFAULT_QUANTIZATION_DEPTH),
            columns,
        })
    }
}
