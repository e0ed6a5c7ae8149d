//! Flat `key = value` configuration files.
//!
//! ```text
//! # learner
//! d = 2
//! max_size = 4
//! a = off            # or a confidence level in (0, 1)
//! min_support = 5
//! prob_threshold = 0.6
//! gain_threshold = 0.05
//! per_level_gain.3 = 0.1
//! quantization_depth = 2
//! node_cap = 5000000
//! strict_ties = false
//! ```

use std::path::Path;

use pld_core::Hyperparameters;

use crate::error::{PldError, Result};

pub const DEFAULT_QUANTIZATION_DEPTH: u32 = 2;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub hyperparameters: Hyperparameters,
    /// Set only when the file names it, so a manifest may supply it instead.
    pub quantization_depth: Option<u32>,
    pub strict_ties: bool,
}

/// Splits `key = value` lines, dropping comments and blank lines.
pub(crate) fn key_values(text: &str) -> impl Iterator<Item = (usize, &str, &str, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
        if line.is_empty() {
            return None;
        }
        Some(match line.rsplit_once('=') {
            Some((k, v)) => (i + 1, k.trim(), v.trim(), line),
            None => (i + 1, "", "", line),
        })
    })
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PldError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = Config::default();
        for (line, key, value, raw) in key_values(text) {
            let err = |message: String| PldError::Parse {
                path: path.to_path_buf(),
                line,
                message,
            };
            if key.is_empty() {
                return Err(err(format!("expected `key = value`, found {:?}", raw)));
            }
            let num = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{}` needs a number, found {:?}", key, value)))
            };
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{}` needs an integer, found {:?}", key, value)))
            };
            let hp = &mut cfg.hyperparameters;
            match key {
                "d" => hp.d = int()?,
                "max_size" => hp.max_size = int()?,
                "a" => {
                    hp.significance = match value {
                        "off" | "none" => None,
                        _ => Some(num()?),
                    }
                }
                "min_support" => hp.min_support = int()?,
                "prob_threshold" => hp.prob_threshold = num()?,
                "gain_threshold" => hp.gain_threshold = num()?,
                "node_cap" => hp.node_cap = int()?,
                "quantization_depth" => {
                    cfg.quantization_depth = Some(
                        u32::try_from(int()?)
                            .map_err(|_| err(format!("quantization_depth too large: {}", value)))?,
                    )
                }
                "strict_ties" => {
                    cfg.strict_ties = match value {
                        "true" => true,
                        "false" => false,
                        _ => {
                            return Err(err(format!(
                                "`strict_ties` needs true or false, found {:?}",
                                value
                            )))
                        }
                    }
                }
                _ => match key.strip_prefix("per_level_gain.").map(str::parse::<usize>) {
                    Some(Ok(level)) if level >= 1 => {
                        let g = num()?;
                        hp.per_level_gain.insert(level, g);
                    }
                    _ => return Err(err(format!("unknown key `{}`", key))),
                },
            }
        }
        cfg.hyperparameters.validate()?;
        Ok(cfg)
    }
}
