//! JSON over HTTP for the review UI.
//!
//! Every request carries `Authorization: Bearer <token>`; the token map
//! resolves it to a reviewer name. Responses carry `x-api-version`.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;

use super::{Decision, HarnessError, QueueFilter, ReviewService};
use crate::judgments::StoreError;

pub const API_VERSION: &str = "1";
pub const VERSION_HEADER: &str = "x-api-version";

pub struct ApiState {
    pub service: Arc<ReviewService>,
    /// token -> reviewer
    pub tokens: BTreeMap<String, String>,
}

struct ApiError(StatusCode, &'static str, String);

impl From<HarnessError> for ApiError {
    fn from(e: HarnessError) -> Self {
        let (status, code) = match &e {
            HarnessError::UnknownRun(_) => (StatusCode::NOT_FOUND, "unknown_run"),
            HarnessError::UnknownItem(_) => (StatusCode::NOT_FOUND, "unknown_item"),
            HarnessError::AlreadyClaimed(_) => (StatusCode::CONFLICT, "already_claimed"),
            HarnessError::AlreadyResolved(_) => (StatusCode::CONFLICT, "already_resolved"),
            HarnessError::Store(StoreError::StaleRevision { .. }) => (StatusCode::CONFLICT, "stale_revision"),
            HarnessError::NotClaimant(_) => (StatusCode::FORBIDDEN, "not_claimant"),
            HarnessError::BadRequest(_) | HarnessError::Store(StoreError::UnknownCard(_)) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "bad_decision")
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        versioned((self.0, Json(json!({ "error": self.1, "message": self.2 }))).into_response())
    }
}

fn versioned(mut r: Response) -> Response {
    r.headers_mut().insert(VERSION_HEADER, HeaderValue::from_static(API_VERSION));
    r
}

fn ok<T: serde::Serialize>(body: T) -> Response {
    versioned(Json(body).into_response())
}

fn reviewer(state: &ApiState, headers: &HeaderMap) -> Result<String, ApiError> {
    if let Some(v) = headers.get(VERSION_HEADER) {
        if v.as_bytes() != API_VERSION.as_bytes() {
            return Err(ApiError(
                StatusCode::BAD_REQUEST,
                "unsupported_version",
                format!("this server speaks version {API_VERSION}"),
            ));
        }
    }
    headers
        .get("authorization")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .and_then(|t| state.tokens.get(t.trim()))
        .cloned()
        .ok_or_else(|| ApiError(StatusCode::UNAUTHORIZED, "unauthorized", "missing or unknown bearer token".into()))
}

async fn queue(
    State(st): State<Arc<ApiState>>,
    Path(run): Path<String>,
    Query(filter): Query<QueueFilter>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    reviewer(&st, &headers)?;
    Ok(ok(st.service.list_queue(&run, &filter)?))
}

async fn claim(
    State(st): State<Arc<ApiState>>,
    Path(item): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let who = reviewer(&st, &headers)?;
    Ok(ok(st.service.claim(&item, &who)?))
}

async fn resolve(
    State(st): State<Arc<ApiState>>,
    Path(item): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let who = reviewer(&st, &headers)?;
    let decision: Decision = serde_json::from_slice(&body)
        .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, "bad_decision", e.to_string()))?;
    let (item, judgment) = st.service.resolve(&item, &who, &decision)?;
    Ok(ok(json!({ "item": item, "judgment": judgment })))
}

async fn report(
    State(st): State<Arc<ApiState>>,
    Path(run): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    reviewer(&st, &headers)?;
    Ok(ok(st.service.report(&run)?))
}

pub fn router(state: ApiState) -> Router {
    Router::new()
        .route("/runs/{id}/queue", get(queue))
        .route("/runs/{id}/report", get(report))
        .route("/items/{id}/claim", post(claim))
        .route("/items/{id}/resolve", post(resolve))
        .with_state(Arc::new(state))
}

/// Reads a token map file: a JSON object of `token -> reviewer`.
pub fn load_tokens(path: &std::path::Path) -> Result<BTreeMap<String, String>, HarnessError> {
    let raw = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}
