//! Full and incremental sweeps.

use std::collections::HashMap;
use std::path::Path;

use chrono::{DateTime, Utc};

use super::metrics::{append_metrics, MetricsSeries, METRICS_FILE};
use super::persist::SnapshotStore;
use super::snapshot::GraphSnapshot;
use crate::config::Config;
use crate::corpus::{scan_with_contents, FileCategory, ScannedFile};
use crate::diag::{DiagCode, Diagnostic};
use crate::exec::{self, Parallelism};
use crate::extract::{extract_file, ExtractOptions, FileModel};
use crate::resolve::resolve_all;
use crate::Result;

/// Sweeps a corpus, reusing file models whose content hash is unchanged
/// since the previous sweep. Output is identical to a fresh rebuild.
#[derive(Debug, Default)]
pub struct Rebuilder {
    mode: Parallelism,
    cache: HashMap<(String, String, String), FileModel>,
    cached_for: Option<Config>,
    last_hits: usize,
}

impl Rebuilder {
    pub fn new(mode: Parallelism) -> Self {
        Rebuilder {
            mode,
            ..Default::default()
        }
    }

    /// Files served from the cache during the last sweep.
    pub fn last_cache_hits(&self) -> usize {
        self.last_hits
    }

    pub fn rebuild(&mut self, config: &Config) -> Result<GraphSnapshot> {
        self.rebuild_at(config, Utc::now())
    }

    pub fn rebuild_at(&mut self, config: &Config, now: DateTime<Utc>) -> Result<GraphSnapshot> {
        if self.cached_for.as_ref() != Some(config) {
            self.cache.clear();
            self.cached_for = Some(config.clone());
        }
        let scanned = scan_with_contents(&config.projects, self.mode)?;

        let mut diagnostics = Vec::new();
        let mut work: Vec<(&ScannedFile, Option<FileModel>)> = Vec::new();
        let mut hits = 0;
        for s in &scanned {
            let r = &s.record;
            if r.skipped {
                diagnostics.push(Diagnostic::new(r.key(), 0, DiagCode::UnreadableFile, "file could not be read"));
                continue;
            }
            if r.category != FileCategory::CodeBehind {
                continue;
            }
            let key = (r.project_id.clone(), r.path.clone(), r.content_hash.clone());
            let cached = self.cache.get(&key).cloned();
            hits += usize::from(cached.is_some());
            work.push((s, cached));
        }
        self.last_hits = hits;

        let options: HashMap<&str, ExtractOptions> = config
            .projects
            .iter()
            .map(|p| (p.project_id.as_str(), ExtractOptions::for_project(p, &config.extra_builtin_types)))
            .collect();
        let models: Vec<FileModel> = exec::map(&work, self.mode, |(s, cached)| {
            if let Some(m) = cached {
                return m.clone();
            }
            let r = &s.record;
            let bytes = s.bytes.as_deref().unwrap_or_default();
            let source = String::from_utf8_lossy(bytes);
            extract_file(&r.project_id, &r.path, &source, &options[r.project_id.as_str()])
        });

        self.cache.clear();
        for ((s, _), m) in work.iter().zip(&models) {
            let r = &s.record;
            self.cache
                .insert((r.project_id.clone(), r.path.clone(), r.content_hash.clone()), m.clone());
        }

        for m in &models {
            diagnostics.extend(m.diagnostics.iter().cloned());
        }
        let resolution = resolve_all(&models, &config.projects, self.mode);
        let files = scanned.into_iter().map(|s| s.record).collect();
        Ok(GraphSnapshot::assemble(files, &resolution, diagnostics, &config.projects, now))
    }
}

/// One-off full rebuild without a cache.
pub fn rebuild(config: &Config) -> Result<GraphSnapshot> {
    Rebuilder::default().rebuild(config)
}

/// Rebuild, persist the snapshot and update the metrics series.
pub fn sweep(config: &Config, rebuilder: &mut Rebuilder, now: DateTime<Utc>) -> Result<GraphSnapshot> {
    let snapshot = rebuilder.rebuild_at(config, now)?;
    SnapshotStore::new(&config.data_dir).persist(&snapshot)?;
    let path = metrics_path(&config.data_dir);
    let series = MetricsSeries::load(&path)?;
    append_metrics(&snapshot, &series).save(&path)?;
    Ok(snapshot)
}

pub fn metrics_path(data_dir: &Path) -> std::path::PathBuf {
    data_dir.join(METRICS_FILE)
}
