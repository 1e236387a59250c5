#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use dataedron_arxiv::ArxivClient;
use dataedron_service::{router, Engine, SessionStore};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn arxiv_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../arxiv/fixtures")
}

pub fn service_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Offline engine with a stepping clock and sequential session ids.
pub fn engine(data_dir: &Path) -> Arc<Engine> {
    engine_with(data_dir, &arxiv_fixtures())
}

pub fn engine_with(data_dir: &Path, fixtures: &Path) -> Arc<Engine> {
    let clock = Arc::new(AtomicU64::new(1_600_000_000_000));
    let ids = Arc::new(AtomicU64::new(1));
    let store = SessionStore::open(data_dir).unwrap();
    Arc::new(
        Engine::new(store, ArxivClient::offline(fixtures))
            .with_clock(move || clock.fetch_add(1000, Ordering::SeqCst))
            .with_id_source(move || format!("s{}", ids.fetch_add(1, Ordering::SeqCst))),
    )
}

pub fn install_d0(data_dir: &Path) {
    std::fs::copy(service_fixtures().join("d0.json"), data_dir.join("d0.json")).unwrap();
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(serde_json::to_vec(&b).unwrap())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub async fn call_json(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

pub fn app(engine: Arc<Engine>) -> Router {
    router(engine)
}
