//! Optional JSON config file: the same knobs as the flags, with flags
//! winning on conflict. Grid-valued fields accept either a number or a grid
//! expression string.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::{CmdError, CmdResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<Value>,
    pub gamma: Option<Value>,
    pub beta: Option<Value>,
    pub s0: Option<Value>,
    pub l: Option<Value>,
    pub m: Option<Value>,
    pub mu: Option<Value>,
    pub n: Option<Value>,
    pub seed: Option<Value>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CmdResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CmdError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CmdError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Grid expression for a field: numbers become single-point grids.
    pub fn grid(&self, field: &str) -> CmdResult<Option<String>> {
        match self.field(field) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(other) => Err(CmdError::Usage(format!(
                "config field '{field}' must be a number or grid string, got {other}"
            ))),
        }
    }

    pub fn u64(&self, field: &str) -> CmdResult<Option<u64>> {
        match self.field(field) {
            None => Ok(None),
            Some(Value::Number(n)) if n.as_u64().is_some() => Ok(n.as_u64()),
            Some(other) => Err(CmdError::Usage(format!(
                "config field '{field}' must be a non-negative integer, got {other}"
            ))),
        }
    }

    pub fn f64(&self, field: &str) -> CmdResult<Option<f64>> {
        match self.field(field) {
            None => Ok(None),
            Some(Value::Number(n)) if n.as_f64().is_some() => Ok(n.as_f64()),
            Some(other) => Err(CmdError::Usage(format!(
                "config field '{field}' must be a number, got {other}"
            ))),
        }
    }

    fn field(&self, field: &str) -> Option<&Value> {
        match field {
            "alpha" => self.alpha.as_ref(),
            "gamma" => self.gamma.as_ref(),
            "beta" => self.beta.as_ref(),
            "s0" => self.s0.as_ref(),
            "l" => self.l.as_ref(),
            "m" => self.m.as_ref(),
            "mu" => self.mu.as_ref(),
            "n" => self.n.as_ref(),
            "seed" => self.seed.as_ref(),
            _ => None,
        }
    }
}
