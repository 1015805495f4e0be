//! Read-only HTTP service over a frozen link dataset.
//!
//! | route | |
//! |---|---|
//! | `GET /sparql?query=…`, `POST /sparql` | SPARQL subset, results as SPARQL JSON |
//! | `GET /experts?title=…` | concepts of an article with the expert teams mentioning them |
//! | `GET /healthz` | `ok` |
//!
//! Every response carries `Access-Control-Allow-Origin: *`.

mod experts;
mod results;

pub use experts::{find_experts, normalize_title, ExpertHit, ExpertsResponse, TeamLink};
pub use results::{results_json, SPARQL_RESULTS_JSON};

use std::collections::HashMap;
use std::future::Future;
use std::path::Path;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use expert_pivot::store::{evaluate, parse_ntriples, parse_sparql, Dataset, StoreError, Vocabulary};
use serde_json::json;
use tokio::net::TcpListener;

pub const DEFAULT_MAX_QUERY_BYTES: usize = 64 * 1024;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read dataset {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: StoreError,
    },
}

/// Read an N-Triples file into a dataset.
pub fn load_dataset(path: &Path) -> Result<Dataset, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_ntriples(&text).map_err(|source| LoadError::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Shared, immutable request context.
#[derive(Debug, Clone)]
pub struct AppState {
    dataset: Arc<Dataset>,
    vocab: Arc<Vocabulary>,
    max_query_bytes: usize,
}

impl AppState {
    pub fn new(dataset: Dataset, vocab: Vocabulary, max_query_bytes: usize) -> Self {
        AppState {
            dataset: Arc::new(dataset),
            vocab: Arc::new(vocab),
            max_query_bytes,
        }
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sparql", get(sparql_get).post(sparql_post).options(preflight))
        .route("/experts", get(experts).options(preflight))
        .route("/healthz", get(|| async { "ok" }))
        .fallback(|| async { error(StatusCode::NOT_FOUND, "no such endpoint") })
        .with_state(state)
        .layer(axum::middleware::map_response(allow_any_origin))
}

/// Serve until `shutdown` resolves, then finish in-flight requests.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

/// Resolves on Ctrl-C or, on Unix, SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        if let Err(e) = tokio::signal::ctrl_c().await {
            log::error!("cannot listen for Ctrl-C: {e}");
            std::future::pending::<()>().await;
        }
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(e) => {
                log::error!("cannot listen for SIGTERM: {e}");
                std::future::pending::<()>().await;
            }
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        () = ctrl_c => {},
        () = terminate => {},
    }
    log::info!("shutting down");
}

async fn allow_any_origin(mut response: Response) -> Response {
    response
        .headers_mut()
        .insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    response
}

async fn preflight() -> Response {
    (
        StatusCode::NO_CONTENT,
        [
            (header::ACCESS_CONTROL_ALLOW_METHODS, "GET, POST, OPTIONS"),
            (header::ACCESS_CONTROL_ALLOW_HEADERS, "Content-Type"),
            (header::ACCESS_CONTROL_MAX_AGE, "86400"),
        ],
    )
        .into_response()
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn sparql_get(State(state): State<AppState>, Query(params): Query<HashMap<String, String>>) -> Response {
    match params.get("query") {
        Some(query) => run_sparql(&state, query),
        None => error(StatusCode::BAD_REQUEST, "missing query parameter"),
    }
}

/// Accepts `application/sparql-query` bodies and form-encoded `query=`.
async fn sparql_post(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .split(';')
        .next()
        .unwrap_or("")
        .trim()
        .to_ascii_lowercase();
    if body.len() > state.max_query_bytes {
        return too_large(&state);
    }
    match content_type.as_str() {
        "application/x-www-form-urlencoded" => {
            match form_urlencoded::parse(&body).find(|(k, _)| k == "query") {
                Some((_, query)) => run_sparql(&state, &query),
                None => error(StatusCode::BAD_REQUEST, "missing query field"),
            }
        }
        _ => match std::str::from_utf8(&body) {
            Ok(query) => run_sparql(&state, query),
            Err(_) => error(StatusCode::BAD_REQUEST, "query is not UTF-8"),
        },
    }
}

fn too_large(state: &AppState) -> Response {
    error(
        StatusCode::PAYLOAD_TOO_LARGE,
        format!("query exceeds {} bytes", state.max_query_bytes),
    )
}

fn run_sparql(state: &AppState, text: &str) -> Response {
    if text.len() > state.max_query_bytes {
        return too_large(state);
    }
    let query = match parse_sparql(text) {
        Ok(q) => q,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let results = evaluate(&query, &state.dataset);
    (
        [(header::CONTENT_TYPE, SPARQL_RESULTS_JSON)],
        results_json(&results).to_string(),
    )
        .into_response()
}

async fn experts(State(state): State<AppState>, Query(params): Query<HashMap<String, String>>) -> Response {
    let title = params.get("title").map(|t| normalize_title(t)).unwrap_or_default();
    if title.is_empty() {
        return error(StatusCode::BAD_REQUEST, "missing title parameter");
    }
    Json(find_experts(&state.dataset, &state.vocab, &title)).into_response()
}
