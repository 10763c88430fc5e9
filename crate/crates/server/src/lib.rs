//! HTTP binding for [`App::dispatch`]. Handlers run on the blocking pool
//! since the store and outbound clients are synchronous.

use std::path::Path;
use std::sync::Arc;

use aw_core::config::Config;
use aw_core::domain::Store;
use aw_core::search::{rebuild_index, SearchIndex};
use aw_core::service::{ApiError, ApiRequest, ApiResponse, App, Method, MAX_BODY_BYTES};
use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderMap, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;

/// Opens the store, rebuilds the search index from it and wires the
/// configured transport and live provider.
pub fn build_app(config: &Config) -> Result<App, String> {
    let store = Store::open(&config.storage_path).map_err(|e| format!("cannot open store: {e}"))?;
    let index = SearchIndex::new();
    let n = rebuild_index(&store, &index).map_err(|e| format!("index rebuild failed: {e}"))?;
    tracing::info!(documents = n, "search index rebuilt");
    let transport = config.transport().map_err(|e| e.to_string())?;
    let provider = config.live_provider(transport.clone())?;
    Ok(App::new(Arc::new(store), Arc::new(index), transport)
        .with_provider(provider)
        .with_config(config.service_config()))
}

/// Persists the search index so `awctl` and later runs can load it.
pub fn save_index(app: &App, dir: &Path) -> Result<(), String> {
    app.index().save(dir).map_err(|e| e.to_string())
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .fallback(handle)
        // One byte over the cap so the service reports the 413 itself.
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES + 1))
        .with_state(app)
}

fn bearer(headers: &HeaderMap) -> Option<String> {
    let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
    value.strip_prefix("Bearer ").map(|t| t.trim().to_owned())
}

fn query_pairs(uri: &Uri) -> Vec<(String, String)> {
    let raw = uri.query().unwrap_or("");
    form_urlencoded::parse(raw.as_bytes()).into_owned().collect()
}

async fn handle(
    State(app): State<Arc<App>>,
    method: axum::http::Method,
    uri: Uri,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let Some(method) = Method::parse(method.as_str()) else {
        return respond(ApiError::method_not_allowed().into());
    };
    let req = ApiRequest {
        method,
        path: uri.path().to_owned(),
        query: query_pairs(&uri),
        token: bearer(&headers),
        body: body.to_vec(),
    };
    match tokio::task::spawn_blocking(move || app.dispatch(req)).await {
        Ok(resp) => respond(resp),
        Err(e) => {
            tracing::error!(error = %e, "handler panicked");
            respond(ApiError::internal(&e).into())
        }
    }
}

fn respond(resp: ApiResponse) -> Response {
    let status = StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    if status == StatusCode::NO_CONTENT {
        return status.into_response();
    }
    let body = serde_json::to_vec(&resp.body).unwrap_or_default();
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}
