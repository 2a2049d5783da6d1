//! Hand-traced ground-truth files.
//!
//! ```text
//! # comment
//! entry: Ns.Class.Method
//! subset: clean            (optional)
//! manual_minutes: 41.5     (optional)
//! Ns.Class.Method
//! Ns.Other.Callee
//! ```
//!
//! Node lines are fully-qualified member names; whitespace and any
//! parameter list are ignored.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::store::member_name;
use crate::{Error, Result};

pub const TRUTH_EXTENSION: &str = "truth";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthGraph {
    /// File stem, for reporting.
    pub name: String,
    pub entry: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<String>,
    pub expected_nodes: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recorded_manual_minutes: Option<f64>,
}

/// Match key: whitespace removed, parameter list dropped.
pub fn match_key(name: &str) -> String {
    let compact: String = name.split_whitespace().collect();
    member_name(&compact).to_string()
}

impl GroundTruthGraph {
    pub fn parse(name: &str, text: &str) -> Result<GroundTruthGraph> {
        let bad = |line: usize, msg: &str| Error::Validation(format!("{name}:{line}: {msg}"));
        let mut entry = None;
        let mut subset = None;
        let mut minutes = None;
        let mut nodes = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = line.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "entry" => entry = Some(match_key(value)),
                    "subset" => subset = Some(value.to_string()),
                    "manual_minutes" => {
                        let m: f64 = value.parse().map_err(|_| bad(i + 1, "manual_minutes is not a number"))?;
                        if !(m.is_finite() && m >= 0.0) {
                            return Err(bad(i + 1, "manual_minutes must be non-negative"));
                        }
                        minutes = Some(m);
                    }
                    _ => return Err(bad(i + 1, "unknown key")),
                }
                continue;
            }
            nodes.insert(match_key(line));
        }
        let entry = entry.ok_or_else(|| bad(0, "missing `entry:` line"))?;
        if !nodes.contains(&entry) {
            return Err(bad(0, "entry is not listed among the expected nodes"));
        }
        Ok(GroundTruthGraph {
            name: name.to_string(),
            entry,
            subset,
            expected_nodes: nodes,
            recorded_manual_minutes: minutes,
        })
    }

    pub fn manual_count(&self) -> usize {
        self.expected_nodes.len()
    }
}

/// Every `*.truth` file in `dir`, by file name.
pub fn load_suite(dir: &Path) -> Result<Vec<GroundTruthGraph>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x == TRUTH_EXTENSION) {
            paths.push(p);
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            GroundTruthGraph::parse(&stem, &text)
        })
        .collect()
}
