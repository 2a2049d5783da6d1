use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use tiergraph_core::navigate::GraphOptions;
use tiergraph_core::store::SnapshotStore;
use tiergraph_core::{Config, Error};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use crate::error::ApiError;
use crate::workspace::Workspace;

/// Shared state: the config plus the current workspace, swapped whole.
pub struct AppState {
    config: Config,
    current: RwLock<Option<Arc<Workspace>>>,
}

impl AppState {
    /// Starts empty; call [`AppState::reload`] to load the latest snapshot.
    pub fn new(config: Config) -> Self {
        AppState {
            config,
            current: RwLock::new(None),
        }
    }

    pub fn with_workspace(config: Config, ws: Workspace) -> Self {
        AppState {
            config,
            current: RwLock::new(Some(Arc::new(ws))),
        }
    }

    pub fn current(&self) -> Option<Arc<Workspace>> {
        self.current.read().unwrap_or_else(|p| p.into_inner()).clone()
    }

    /// Loads the newest snapshot if it differs from the current one.
    /// Returns true when a swap happened.
    pub fn reload(&self) -> tiergraph_core::Result<bool> {
        let latest = SnapshotStore::new(&self.config.data_dir).latest_id()?;
        let Some(latest) = latest else { return Ok(false) };
        if self.current().is_some_and(|w| w.snapshot.snapshot_id == latest) {
            return Ok(false);
        }
        let ws = Arc::new(Workspace::open(&self.config, Some(&latest))?);
        *self.current.write().unwrap_or_else(|p| p.into_inner()) = Some(ws);
        tracing::info!(snapshot = %latest, "snapshot loaded");
        Ok(true)
    }

    fn workspace(&self) -> Result<Arc<Workspace>, ApiError> {
        self.current().ok_or_else(ApiError::no_snapshot)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RouterOptions {
    /// Built UI bundle served for non-API paths.
    pub ui_dir: Option<PathBuf>,
    /// Permissive CORS, for local UI development.
    pub dev_cors: bool,
}

pub fn router(state: Arc<AppState>, opts: RouterOptions) -> Router {
    let api = Router::new()
        .route("/api/search", get(search))
        .route("/api/graph", get(graph))
        .route("/api/metrics/daily", get(metrics))
        .route("/api/snapshot", get(snapshot))
        .route("/api/{*rest}", get(unknown_api))
        .method_not_allowed_fallback(method_not_allowed)
        .with_state(state);
    let mut app = match opts.ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(unknown_api),
    };
    if opts.dev_cors {
        app = app.layer(CorsLayer::permissive());
    }
    app
}

/// Serves until ctrl-c, re-checking the store for a newer snapshot every
/// `reload_every`.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>, opts: RouterOptions, reload_every: Duration) -> std::io::Result<()> {
    if let Err(e) = state.reload() {
        tracing::warn!(error = %e, "no snapshot loaded at startup");
    }
    let poller = {
        let state = Arc::clone(&state);
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(reload_every);
            loop {
                tick.tick().await;
                let s = Arc::clone(&state);
                match tokio::task::spawn_blocking(move || s.reload()).await {
                    Ok(Err(e)) => tracing::warn!(error = %e, "snapshot reload failed"),
                    Err(e) => tracing::warn!(error = %e, "snapshot reload panicked"),
                    Ok(Ok(_)) => {}
                }
            }
        })
    };
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    let result = axum::serve(listener, router(state, opts))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    poller.abort();
    result
}

fn json(body: String) -> Response {
    (StatusCode::OK, [(CONTENT_TYPE, "application/json")], body).into_response()
}

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn params(p: Params) -> Result<HashMap<String, String>, ApiError> {
    p.map(|Query(q)| q).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn flag(params: &HashMap<String, String>, name: &str) -> Result<bool, ApiError> {
    match params.get(name).map(String::as_str) {
        None | Some("false") | Some("0") => Ok(false),
        Some("true") | Some("1") | Some("") => Ok(true),
        Some(other) => Err(ApiError::bad_request(format!("`{name}` must be true or false, got `{other}`"))),
    }
}

async fn search(State(state): State<Arc<AppState>>, p: Params) -> Result<Response, ApiError> {
    let params = params(p)?;
    let q = params.get("q").filter(|q| !q.is_empty());
    let q = q.ok_or_else(|| ApiError::bad_request("query parameter `q` is required"))?;
    let ci = flag(&params, "ci")?;
    let ws = state.workspace()?;
    Ok(json(ws.search_json(q, ci)?))
}

async fn graph(State(state): State<Arc<AppState>>, p: Params) -> Result<Response, ApiError> {
    let params = params(p)?;
    let entry = params.get("entry").filter(|e| !e.is_empty());
    let entry = entry.ok_or_else(|| ApiError::bad_request("query parameter `entry` is required"))?;
    let mut opts = GraphOptions::default();
    if let Some(d) = params.get("max_depth") {
        opts.max_depth = d
            .parse()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| ApiError::bad_request(format!("`max_depth` must be a positive integer, got `{d}`")))?;
    }
    let ws = state.workspace()?;
    Ok(json(ws.graph_json(entry, opts)?))
}

async fn metrics(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    Ok(json(state.workspace()?.metrics_json()?))
}

async fn snapshot(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    Ok(json(state.workspace()?.snapshot_json()?))
}

async fn unknown_api() -> ApiError {
    ApiError::from(Error::NotFound("no such route".into()))
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "the API is read-only; use GET")
}
