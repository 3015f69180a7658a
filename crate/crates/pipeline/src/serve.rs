//! Review server.
//!
//! Routes:
//!
//! - `GET /api/samples?status=S&offset=N&limit=N` lists records in id order.
//! - `GET /api/samples/{id}/image?kind=rgb|alpha|inverse|refined` returns PNG bytes.
//! - `POST /api/samples/{id}/decision` with `{"decision":"accept"|"reject"}`
//!   applies a human decision and returns the updated record.
//! - `GET /api/stats` returns the number of samples per status.
//!
//! Errors are JSON objects `{"error": message}`. A decision is written to the
//! manifest (atomically) before the response is sent, and writes are
//! serialized through one lock. Other paths fall through to static files
//! from the optional assets directory.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Component, Path as FsPath, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::Mutex;

use crate::error::PipelineError;
use crate::manifest::{Manifest, ManifestStore, SampleRecord, Status};
use crate::screen::{decide, Decision};

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 1000;

struct Shared {
    store: ManifestStore,
    manifest: Manifest,
}

#[derive(Clone)]
struct AppState {
    inner: Arc<Mutex<Shared>>,
    assets: Option<Arc<PathBuf>>,
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        let status = match e {
            PipelineError::UnknownSample(_) => StatusCode::NOT_FOUND,
            PipelineError::Transition { .. } | PipelineError::HumanRequired { .. } => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

fn bad_request(message: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, message.into())
}

#[derive(Deserialize)]
struct ListQuery {
    status: Option<String>,
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn list_samples(
    State(state): State<AppState>,
    Query(q): Query<ListQuery>,
) -> Result<Json<Vec<SampleRecord>>, ApiError> {
    let status = q
        .status
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Status>())
        .transpose()
        .map_err(bad_request)?;
    let limit = q.limit.unwrap_or(DEFAULT_LIMIT).min(MAX_LIMIT);
    let shared = state.inner.lock().await;
    let page = shared
        .manifest
        .samples
        .iter()
        .filter(|s| status.is_none_or(|st| s.status == st))
        .skip(q.offset.unwrap_or(0))
        .take(limit)
        .cloned()
        .collect();
    Ok(Json(page))
}

#[derive(Deserialize)]
struct ImageQuery {
    kind: Option<String>,
}

async fn sample_image(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ImageQuery>,
) -> Result<Response, ApiError> {
    let kind = q.kind.unwrap_or_else(|| "rgb".into());
    let path = {
        let shared = state.inner.lock().await;
        let record = shared
            .manifest
            .sample(&id)
            .ok_or_else(|| ApiError::from(PipelineError::UnknownSample(id.clone())))?;
        let rel = match kind.as_str() {
            "rgb" => Some(&record.paths.rgb),
            "alpha" => Some(&record.paths.alpha),
            "inverse" => Some(&record.paths.inverse),
            "refined" => record.paths.refined.as_ref(),
            other => return Err(bad_request(format!("unknown image kind {other:?}"))),
        }
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("sample {id:?} has no {kind} image")))?;
        shared.store.resolve(rel)
    };
    let bytes = tokio::fs::read(&path)
        .await
        .map_err(|e| ApiError(StatusCode::NOT_FOUND, format!("{}: {e}", path.display())))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], bytes).into_response())
}

#[derive(Deserialize)]
struct DecisionBody {
    decision: String,
}

async fn post_decision(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SampleRecord>, ApiError> {
    let body: DecisionBody =
        serde_json::from_slice(&body).map_err(|e| bad_request(format!("invalid decision body: {e}")))?;
    let decision = match body.decision.as_str() {
        "accept" => Decision::Accept,
        "reject" => Decision::Reject,
        other => return Err(bad_request(format!("decision must be \"accept\" or \"reject\", got {other:?}"))),
    };
    let mut shared = state.inner.lock().await;
    let Shared { store, manifest } = &mut *shared;
    let mut next = manifest.clone();
    decide(&mut next, &id, decision)?;
    // persist before acknowledging; on failure the in-memory state is untouched
    tokio::task::block_in_place(|| store.save(&mut next))?;
    *manifest = next;
    let record = manifest.sample(&id).cloned().expect("decided sample exists");
    Ok(Json(record))
}

async fn stats(State(state): State<AppState>) -> Json<BTreeMap<String, usize>> {
    let shared = state.inner.lock().await;
    let mut out: BTreeMap<String, usize> = shared
        .manifest
        .counts()
        .into_iter()
        .map(|(s, n)| (s.to_string(), n))
        .collect();
    out.insert("total".into(), shared.manifest.samples.len());
    Json(out)
}

fn content_type(path: &FsPath) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or_default() {
        "html" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript; charset=utf-8",
        "css" => "text/css; charset=utf-8",
        "json" | "map" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "ico" => "image/x-icon",
        _ => "application/octet-stream",
    }
}

async fn static_file(State(state): State<AppState>, uri: Uri) -> Result<Response, ApiError> {
    let not_found = || ApiError(StatusCode::NOT_FOUND, format!("no route for {}", uri.path()));
    let Some(root) = state.assets.as_deref() else {
        return Err(not_found());
    };
    let rel = PathBuf::from(uri.path().trim_start_matches('/'));
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) || uri.path().starts_with("/api/") {
        return Err(not_found());
    }
    let mut path = root.join(&rel);
    if rel.as_os_str().is_empty() || path.is_dir() {
        path = path.join("index.html");
    }
    let bytes = tokio::fs::read(&path).await.map_err(|_| not_found())?;
    Ok(([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response())
}

fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/samples", get(list_samples))
        .route("/api/samples/{id}/image", get(sample_image))
        .route("/api/samples/{id}/decision", post(post_decision))
        .route("/api/stats", get(stats))
        .fallback(static_file)
        .with_state(state)
}

async fn shutdown_signal() {
    let interrupt = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = interrupt => {},
        _ = terminate => {},
    }
}

/// Serves until SIGINT or SIGTERM. Prints `listening on http://ADDR` once the
/// socket is bound. The manifest lock is released on return.
pub fn serve(store: ManifestStore, manifest: Manifest, bind: SocketAddr, assets: Option<PathBuf>) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| anyhow::anyhow!("cannot bind {bind}: {e}"))?;
        let addr = listener.local_addr()?;
        let state = AppState {
            inner: Arc::new(Mutex::new(Shared { store, manifest })),
            assets: assets.map(Arc::new),
        };
        println!("listening on http://{addr}");
        use std::io::Write as _;
        std::io::stdout().flush()?;
        axum::serve(listener, router(state.clone()))
            .with_graceful_shutdown(shutdown_signal())
            .await?;
        drop(state);
        Ok(())
    })
}
