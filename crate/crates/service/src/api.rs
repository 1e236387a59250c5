use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query as QueryParams, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dataedron_core::query::{combine, parse, Combinator, Query};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use crate::engine::{Engine, NavigateRequest, SearchRequest};
use crate::ServiceError;

struct ApiError {
    status: StatusCode,
    body: Value,
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let mut body = json!({ "error": e.to_string(), "kind": e.kind() });
        if let ServiceError::Parse(p) = &e {
            body["offset"] = json!(p.offset);
        }
        ApiError {
            status: StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            body,
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": r.body_text(), "kind": "bad_request" }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs a blocking engine call off the async workers.
async fn blocking<T, F>(engine: &Arc<Engine>, f: F) -> ApiResult<T>
where
    F: FnOnce(&Engine) -> Result<T, ServiceError> + Send + 'static,
    T: Send + 'static,
{
    let engine = engine.clone();
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: json!({ "error": e.to_string(), "kind": "internal" }),
        })?
        .map_err(ApiError::from)
}

fn raw_json(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn search(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<SearchRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let summary = blocking(&engine, move |e| e.search(&req)).await?;
    Ok(Json(summary).into_response())
}

async fn session(State(engine): State<Arc<Engine>>, Path(sid): Path<String>) -> ApiResult<Response> {
    let summary = blocking(&engine, move |e| e.summary(&sid)).await?;
    Ok(Json(summary).into_response())
}

async fn facet(State(engine): State<Arc<Engine>>, Path((sid, alpha)): Path<(String, String)>) -> ApiResult<Response> {
    let f = blocking(&engine, move |e| e.facet(&sid, &alpha)).await?;
    Ok(raw_json(f.to_json()))
}

#[derive(Deserialize)]
struct LayoutParams {
    t_min: Option<f64>,
    t_max: Option<f64>,
}

async fn layout(
    State(engine): State<Arc<Engine>>,
    Path((sid, alpha)): Path<(String, String)>,
    QueryParams(p): QueryParams<LayoutParams>,
) -> ApiResult<Response> {
    let (t_min, t_max) = (p.t_min.unwrap_or(1.0), p.t_max.unwrap_or(8.0));
    let l = blocking(&engine, move |e| e.layout(&sid, &alpha, t_min, t_max)).await?;
    Ok(Json(l).into_response())
}

async fn navigate(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<NavigateRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let nav = blocking(&engine, move |e| e.navigate(&req)).await?;
    Ok(Json(nav).into_response())
}

async fn history(State(engine): State<Arc<Engine>>, Path(sid): Path<String>) -> ApiResult<Response> {
    let h = blocking(&engine, move |e| e.history(&sid)).await?;
    Ok(Json(h).into_response())
}

#[derive(Deserialize)]
struct MergeRequest {
    sid: String,
    other_sid: String,
}

async fn merge(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<MergeRequest>, JsonRejection>,
) -> ApiResult<Response> {
    let Json(req) = body?;
    let h = blocking(&engine, move |e| e.merge_history(&req.sid, &req.other_sid)).await?;
    Ok(Json(h).into_response())
}

#[derive(Deserialize)]
struct CombineRequest {
    #[serde(default)]
    query: String,
    modifier: Combinator,
    term: String,
}

#[derive(Serialize)]
struct CombineResponse {
    query: String,
}

/// Joins a clicked vertex label to the current query. An empty current query
/// yields the term alone.
async fn combine_query(body: Result<Json<CombineRequest>, JsonRejection>) -> ApiResult<Response> {
    let Json(req) = body?;
    let addition = if req.term.split_whitespace().count() > 1 {
        Query::phrase(req.term.split_whitespace())
    } else {
        Query::term(req.term.trim())
    }
    .map_err(ServiceError::from)?;
    let q = if req.query.trim().is_empty() {
        addition
    } else {
        combine(parse(&req.query).map_err(ServiceError::from)?, req.modifier, addition)
    };
    Ok(Json(CombineResponse { query: q.print() }).into_response())
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/search", post(search))
        .route("/session/{sid}", get(session))
        .route("/facet/{sid}/{alpha}", get(facet))
        .route("/layout/{sid}/{alpha}", get(layout))
        .route("/navigate", post(navigate))
        .route("/history/{sid}", get(history))
        .route("/history/merge", post(merge))
        .route("/combine", post(combine_query))
        .layer(CorsLayer::permissive())
        .with_state(engine)
}

/// Serves until the process is stopped.
pub async fn serve(engine: Arc<Engine>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(engine)).await
}
