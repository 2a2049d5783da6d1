//! Node-count accuracy and discovery-time reports.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::truth::{match_key, GroundTruthGraph};
use crate::navigate::{CallGraph, GraphOptions, Navigator};
use crate::store::GraphSnapshot;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub entry: String,
    pub subset: String,
    pub auto_count: usize,
    pub manual_count: usize,
    pub matched_count: usize,
    pub recall: f64,
    pub precision: f64,
    /// Empty when the truth file has no recorded time.
    pub manual_minutes: Option<f64>,
    /// Wall clock of the automated discovery, minutes to 2 decimals.
    pub auto_minutes: f64,
    /// Same, in milliseconds to 3 decimals.
    pub auto_ms: f64,
    /// Why the entry could not be evaluated, if it could not.
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub manual_avg_minutes: Option<f64>,
    pub auto_avg_minutes: f64,
    pub auto_avg_ms: f64,
}

impl Timing {
    /// Manual over automated average time.
    pub fn speedup(&self) -> Option<f64> {
        let manual = self.manual_avg_minutes?;
        (self.auto_avg_ms > 0.0).then(|| manual * 60_000.0 / self.auto_avg_ms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub per_entry: Vec<EntryRecord>,
    /// Σ matched / Σ manual.
    pub aggregate_accuracy: f64,
    /// Σ matched / Σ auto.
    pub aggregate_precision: f64,
    pub timing: Timing,
}

/// `(matched, recall, precision)` of an automated name set against a manual one.
pub fn compare_sets(auto: &BTreeSet<String>, manual: &BTreeSet<String>) -> (usize, f64, f64) {
    let matched = auto.intersection(manual).count();
    (matched, ratio(matched, manual.len()), ratio(matched, auto.len()))
}

pub fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn round_to(x: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (x * f).round() / f
}

/// Scores one generated graph against its ground truth.
pub fn compare(auto: &CallGraph, truth: &GroundTruthGraph) -> Result<EntryRecord> {
    if match_key(&auto.root) != truth.entry {
        return Err(Error::Validation(format!(
            "graph root `{}` does not match truth entry `{}`",
            auto.root, truth.entry
        )));
    }
    let names: BTreeSet<String> = auto.member_names().iter().map(|n| match_key(n)).collect();
    let (matched, recall, precision) = compare_sets(&names, &truth.expected_nodes);
    Ok(EntryRecord {
        entry: truth.entry.clone(),
        subset: truth.subset.clone().unwrap_or_default(),
        auto_count: names.len(),
        manual_count: truth.manual_count(),
        matched_count: matched,
        recall,
        precision,
        manual_minutes: truth.recorded_manual_minutes,
        auto_minutes: 0.0,
        auto_ms: 0.0,
        note: String::new(),
    })
}

impl AccuracyReport {
    pub fn from_records(per_entry: Vec<EntryRecord>) -> AccuracyReport {
        let sum = |f: fn(&EntryRecord) -> usize| per_entry.iter().map(f).sum::<usize>();
        let matched = sum(|r| r.matched_count);
        let manual: Vec<f64> = per_entry.iter().filter_map(|r| r.manual_minutes).collect();
        let n = per_entry.len().max(1) as f64;
        let timing = Timing {
            manual_avg_minutes: (!manual.is_empty()).then(|| round_to(manual.iter().sum::<f64>() / manual.len() as f64, 2)),
            auto_avg_minutes: round_to(per_entry.iter().map(|r| r.auto_minutes).sum::<f64>() / n, 2),
            auto_avg_ms: round_to(per_entry.iter().map(|r| r.auto_ms).sum::<f64>() / n, 3),
        };
        AccuracyReport {
            aggregate_accuracy: ratio(matched, sum(|r| r.manual_count)),
            aggregate_precision: ratio(matched, sum(|r| r.auto_count)),
            per_entry,
            timing,
        }
    }

    /// Σ matched / Σ manual over the entries of one subset.
    pub fn subset_accuracy(&self, subset: &str) -> Option<f64> {
        let rows: Vec<&EntryRecord> = self.per_entry.iter().filter(|r| r.subset == subset).collect();
        if rows.is_empty() {
            return None;
        }
        let matched = rows.iter().map(|r| r.matched_count).sum();
        Some(ratio(matched, rows.iter().map(|r| r.manual_count).sum()))
    }

    /// One row per entry; aggregates are recomputed when read back.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.per_entry.is_empty() {
            w.write_record([
                "entry", "subset", "auto_count", "manual_count", "matched_count", "recall", "precision",
                "manual_minutes", "auto_minutes", "auto_ms", "note",
            ])?;
        }
        for r in &self.per_entry {
            w.serialize(r)?;
        }
        w.into_inner().map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_csv(bytes: &[u8]) -> Result<AccuracyReport> {
        let mut r = csv::Reader::from_reader(bytes);
        let rows = r.deserialize().collect::<std::result::Result<Vec<EntryRecord>, _>>()?;
        Ok(AccuracyReport::from_records(rows))
    }
}

/// Measures automated discovery time.
pub trait Timer {
    fn time(&self, f: &mut dyn FnMut()) -> Duration;
}

pub struct WallClock;

impl Timer for WallClock {
    fn time(&self, f: &mut dyn FnMut()) -> Duration {
        let t = Instant::now();
        f();
        t.elapsed()
    }
}

/// Reports a fixed duration; for reproducible reports.
pub struct FixedTimer(pub Duration);

impl Timer for FixedTimer {
    fn time(&self, f: &mut dyn FnMut()) -> Duration {
        f();
        self.0
    }
}

/// Generates and scores a call graph for every suite entry. Entries that
/// cannot be generated score zero with a note; the run continues.
pub fn run_benchmark(
    snapshot: &GraphSnapshot,
    suite: &[GroundTruthGraph],
    timer: &dyn Timer,
    opts: GraphOptions,
) -> AccuracyReport {
    let nav = Navigator::new(snapshot);
    let mut rows = Vec::with_capacity(suite.len());
    for truth in suite {
        let mut out = None;
        let elapsed = timer.time(&mut || out = Some(nav.generate(&truth.entry, opts)));
        let row = out.expect("timer ran the job").and_then(|g| compare(&g, truth));
        let mut row = row.unwrap_or_else(|e| {
            tracing::warn!(entry = %truth.entry, error = %e, "benchmark entry not evaluated");
            EntryRecord {
                entry: truth.entry.clone(),
                subset: truth.subset.clone().unwrap_or_default(),
                auto_count: 0,
                manual_count: truth.manual_count(),
                matched_count: 0,
                recall: 0.0,
                precision: 0.0,
                manual_minutes: truth.recorded_manual_minutes,
                auto_minutes: 0.0,
                auto_ms: 0.0,
                note: e.to_string(),
            }
        });
        row.auto_minutes = round_to(elapsed.as_secs_f64() / 60.0, 2);
        row.auto_ms = round_to(elapsed.as_secs_f64() * 1000.0, 3);
        rows.push(row);
    }
    AccuracyReport::from_records(rows)
}
