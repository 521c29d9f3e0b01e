use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

use crate::store::{AdjudicationStore, StoreError, VerdictInput};

pub type SharedStore = Arc<RwLock<AdjudicationStore>>;

#[derive(Deserialize)]
struct NextQuery {
    annotator: Option<String>,
}

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

fn store_error(e: StoreError) -> Response {
    let status = match e {
        StoreError::UnknownPair(_) => StatusCode::NOT_FOUND,
        StoreError::EmptyAnnotator => StatusCode::BAD_REQUEST,
        StoreError::ConflictingCandidate { .. } => StatusCode::CONFLICT,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error(status, e)
}

async fn next(State(store): State<SharedStore>, Query(q): Query<NextQuery>) -> Response {
    let Some(annotator) = q.annotator.filter(|a| !a.trim().is_empty()) else {
        return error(StatusCode::BAD_REQUEST, "annotator query parameter is required");
    };
    let store = store.read().unwrap_or_else(|e| e.into_inner());
    match store.next_pending(&annotator) {
        Some(view) => Json(view).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

async fn verdict(State(store): State<SharedStore>, Json(input): Json<VerdictInput>) -> Response {
    let result = tokio::task::spawn_blocking(move || {
        let mut store = store.write().unwrap_or_else(|e| e.into_inner());
        store.record_verdict(input, chrono::Utc::now())
    })
    .await;
    match result {
        Ok(Ok(status)) => Json(json!({ "status": status })).into_response(),
        Ok(Err(e)) => store_error(e),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

async fn progress(State(store): State<SharedStore>) -> Response {
    Json(store.read().unwrap_or_else(|e| e.into_inner()).progress()).into_response()
}

async fn export(State(store): State<SharedStore>) -> Response {
    let pairs = store.read().unwrap_or_else(|e| e.into_inner()).finalize();
    let body = ontorel_core::jsonl::to_jsonl_string(&pairs);
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

/// API routes, with static files from `assets` served for everything else.
pub fn router(store: SharedStore, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/queue/next", get(next))
        .route("/api/verdicts", post(verdict))
        .route("/api/progress", get(progress))
        .route("/api/export", get(export))
        .with_state(store);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until Ctrl-C. Blocks the calling thread.
pub fn serve(addr: SocketAddr, store: SharedStore, assets: Option<PathBuf>) -> std::io::Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        log::info!("adjudication service listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(store, assets))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })
}
