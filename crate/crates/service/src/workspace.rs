use std::sync::Arc;

use tiergraph_core::json::to_canonical_json;
use tiergraph_core::navigate::{
    export_graph, search, CorpusText, GraphFormat, GraphOptions, Navigator, SearchOptions,
};
use tiergraph_core::store::{metrics_path, GraphSnapshot, MetricsSeries, SnapshotStore};
use tiergraph_core::{Config, Parallelism, Result};

/// A loaded snapshot with the corpus text and metrics read alongside it.
/// Immutable once built; reloads build a fresh one.
#[derive(Debug)]
pub struct Workspace {
    pub snapshot: Arc<GraphSnapshot>,
    pub corpus: CorpusText,
    pub metrics: MetricsSeries,
}

impl Workspace {
    /// Loads `snapshot_id`, or the newest snapshot when `None`.
    pub fn open(config: &Config, snapshot_id: Option<&str>) -> Result<Workspace> {
        let store = SnapshotStore::new(&config.data_dir);
        let snapshot = match snapshot_id {
            Some(id) => store.load(id)?,
            None => store.load_latest()?,
        };
        Ok(Workspace {
            snapshot: Arc::new(snapshot),
            corpus: CorpusText::load(&config.projects, Parallelism::default())?,
            metrics: MetricsSeries::load(&metrics_path(&config.data_dir))?,
        })
    }

    pub fn search_json(&self, keyword: &str, case_insensitive: bool) -> Result<String> {
        let r = search(keyword, &self.corpus, &self.snapshot, SearchOptions { case_insensitive })?;
        to_canonical_json(&r)
    }

    pub fn graph(&self, entry: &str, opts: GraphOptions, format: GraphFormat) -> Result<Vec<u8>> {
        let g = Navigator::new(&self.snapshot).generate(entry, opts)?;
        export_graph(&g, format)
    }

    pub fn graph_json(&self, entry: &str, opts: GraphOptions) -> Result<String> {
        let bytes = self.graph(entry, opts, GraphFormat::Json)?;
        Ok(String::from_utf8(bytes).expect("JSON export is UTF-8"))
    }

    pub fn metrics_json(&self) -> Result<String> {
        to_canonical_json(&self.metrics)
    }

    pub fn snapshot_json(&self) -> Result<String> {
        to_canonical_json(&self.snapshot.summary())
    }
}
