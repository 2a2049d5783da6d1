//! Daily per-project structural metrics, kept as a CSV series.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::persist::write_atomic;
use super::snapshot::GraphSnapshot;
use crate::{Error, Result};

pub const METRICS_FILE: &str = "metrics.csv";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MetricsEntry {
    pub date: NaiveDate,
    pub project: String,
    /// Node plus edge count for the project.
    pub graph_size: usize,
    pub function_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsSeries {
    pub entries: Vec<MetricsEntry>,
}

impl MetricsSeries {
    /// Entries for one project, in date order.
    pub fn project(&self, project: &str) -> impl Iterator<Item = &MetricsEntry> {
        let project = project.to_string();
        self.entries.iter().filter(move |e| e.project == project)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.entries.is_empty() {
            w.write_record(["date", "project", "graph_size", "function_count"])?;
        }
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.into_inner().map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_csv(bytes: &[u8]) -> Result<MetricsSeries> {
        let mut r = csv::Reader::from_reader(bytes);
        let mut entries = r.deserialize().collect::<std::result::Result<Vec<MetricsEntry>, _>>()?;
        entries.sort();
        Ok(MetricsSeries { entries })
    }

    pub fn load(path: &Path) -> Result<MetricsSeries> {
        match fs::read(path) {
            Ok(b) => MetricsSeries::from_csv(&b),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(MetricsSeries::default()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        write_atomic(path, &self.to_csv()?)
    }
}

/// Replaces the snapshot's date with one entry per project.
pub fn append_metrics(snapshot: &GraphSnapshot, series: &MetricsSeries) -> MetricsSeries {
    let date = snapshot.created_at.date_naive();
    let mut entries: Vec<MetricsEntry> = series.entries.iter().filter(|e| e.date != date).cloned().collect();
    for (project, c) in &snapshot.per_project_counts {
        entries.push(MetricsEntry {
            date,
            project: project.clone(),
            graph_size: c.graph_size(),
            function_count: c.function_count,
        });
    }
    entries.sort();
    MetricsSeries { entries }
}
