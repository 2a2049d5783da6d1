//! Read-only HTTP API over the latest persisted snapshot.
//!
//! | route | body |
//! |---|---|
//! | `GET /api/search?q=<kw>[&ci=true]` | `SearchResult` |
//! | `GET /api/graph?entry=<id>[&max_depth=N]` | `CallGraph` |
//! | `GET /api/metrics/daily` | `MetricsSeries` |
//! | `GET /api/snapshot` | `SnapshotSummary` |
//!
//! Every body is canonical JSON and every non-2xx body is one [`ApiError`].
//! The CLI renders through the same [`Workspace`] methods, so its output is
//! byte-identical to the API's.

mod error;
mod http;
mod workspace;

pub use error::ApiError;
pub use http::{router, serve, AppState, RouterOptions};
pub use workspace::Workspace;
