//! Snapshot assembly, persistence, metrics and scheduled sweeps.

mod metrics;
mod persist;
mod rebuild;
mod schedule;
mod snapshot;

pub use metrics::{append_metrics, MetricsEntry, MetricsSeries, METRICS_FILE};
pub use persist::{SnapshotStore, FORMAT, FORMAT_VERSION};
pub use rebuild::{metrics_path, rebuild, sweep, Rebuilder};
pub use schedule::{run_once, run_scheduled, Scheduler, Tick};
pub use snapshot::{corpus_hash, member_name, GraphSnapshot, Node, NodeKind, ProjectCounts, SnapshotSummary};
