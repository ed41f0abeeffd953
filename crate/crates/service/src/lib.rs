//! HTTP front for the recommender engine: bot lifecycle, chat sessions and
//! the per-turn pipeline.
//!
//! | method | path | body / query | returns |
//! |---|---|---|---|
//! | POST | `/bots` | multipart: `data` (TSV), `config` (JSON, optional), `name` | bot |
//! | GET | `/bots` | | bot list |
//! | GET | `/bots/{id}` | | bot |
//! | PATCH | `/bots/{id}/config` | partial config document | bot |
//! | POST | `/bots/{id}/sessions` | `{"seed": n}` (optional) | session id and seed |
//! | GET | `/bots/{id}/kg/focus` | `nodes=a,b&radius=1&limit=200` | focus graph |
//! | POST | `/sessions/{id}/messages` | `{"utterance": "..."}` | turn record |
//! | GET | `/sessions/{id}` | | state and transcript |
//!
//! Failures come back as `{"error": code, "detail": ..., "stage": ...}`.

pub mod error;
pub mod store;

use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::Deserialize;

use crs_core::config::ConfigDocument;
use crs_core::kg::{FocusGraph, DEFAULT_FOCUS_LIMIT};
use crs_core::{NodeId, Session, TurnRecord};

pub use error::ApiError;
pub use store::{BotView, SessionInfo, Store};

/// Upload cap for data files.
pub const MAX_UPLOAD_BYTES: usize = 64 * 1024 * 1024;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/bots", post(create_bot).get(list_bots))
        .route("/bots/{id}", get(get_bot))
        .route("/bots/{id}/config", patch(update_config))
        .route("/bots/{id}/sessions", post(create_session))
        .route("/bots/{id}/kg/focus", get(kg_focus))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/messages", post(post_message))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(store)
}

type ApiResult<T> = Result<T, ApiError>;

async fn create_bot(State(store): State<Arc<Store>>, mut form: Multipart) -> ApiResult<(StatusCode, Json<BotView>)> {
    let mut name = None;
    let mut data = None;
    let mut config = None;
    while let Some(field) = form
        .next_field()
        .await
        .map_err(|e| ApiError::bad_request(e.body_text()))?
    {
        let field_name = field.name().unwrap_or_default().to_string();
        let bytes = field.bytes().await.map_err(|e| ApiError::bad_request(e.body_text()))?;
        match field_name.as_str() {
            "name" => name = Some(String::from_utf8_lossy(&bytes).trim().to_string()),
            "data" => data = Some(bytes),
            "config" => config = Some(bytes),
            other => return Err(ApiError::bad_request(format!("unexpected form field {other:?}"))),
        }
    }
    let data = data.ok_or_else(|| ApiError::bad_request("missing form field \"data\""))?;
    let document = match config {
        Some(bytes) if !bytes.iter().all(u8::is_ascii_whitespace) => ConfigDocument::from_slice(&bytes)?,
        _ => ConfigDocument::default(),
    };
    let name = name.filter(|n| !n.is_empty()).unwrap_or_else(|| "bot".into());
    let view = store.create_bot(name, &data, document)?;
    tracing::info!(id = %view.meta.id, nodes = view.meta.stats.nodes, "bot created");
    Ok((StatusCode::CREATED, Json(view)))
}

async fn list_bots(State(store): State<Arc<Store>>) -> Json<Vec<BotView>> {
    Json(store.list_bots())
}

async fn get_bot(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Json<BotView>> {
    Ok(Json(store.bot(&id)?.view()))
}

async fn update_config(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> ApiResult<Json<BotView>> {
    let patch = ConfigDocument::from_slice(&body)?;
    Ok(Json(store.update_config(&id, patch)?))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    seed: Option<u64>,
}

async fn create_session(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> ApiResult<(StatusCode, Json<SessionInfo>)> {
    let req: NewSession = if body.iter().all(u8::is_ascii_whitespace) {
        NewSession::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?
    };
    Ok((StatusCode::CREATED, Json(store.create_session(&id, req.seed)?)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Message {
    utterance: String,
}

async fn post_message(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> ApiResult<Json<TurnRecord>> {
    let msg: Message = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let session = store.session(&id)?;
    // Queue behind any turn already running on this session.
    let mut session = session.lock().await;
    let bot = store.bot(&session.bot_id)?.snapshot();
    let record = session.post_message(&bot, &msg.utterance)?.clone();
    Ok(Json(record))
}

async fn get_session(State(store): State<Arc<Store>>, Path(id): Path<String>) -> ApiResult<Json<Session>> {
    let session = store.session(&id)?;
    let snapshot = session.lock().await.clone();
    Ok(Json(snapshot))
}

#[derive(Debug, Deserialize)]
struct FocusQuery {
    #[serde(default)]
    nodes: String,
    radius: Option<u8>,
    limit: Option<usize>,
}

async fn kg_focus(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(q): Query<FocusQuery>,
) -> ApiResult<Json<FocusGraph>> {
    let graph = store.bot(&id)?.graph();
    let radius = q.radius.unwrap_or(1);
    if radius > 2 {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "OutOfRange",
            format!("radius must be 0, 1 or 2, got {radius}"),
        ));
    }
    let mut seeds = Vec::new();
    for token in q.nodes.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let by_id = token
            .strip_prefix('n')
            .unwrap_or(token)
            .parse::<u32>()
            .ok()
            .map(NodeId)
            .filter(|&n| graph.contains(n));
        let node = by_id.or_else(|| graph.lookup_node(token).map(|n| n.id));
        seeds.push(node.ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "UnknownNode",
                format!("no node matches {token:?}"),
            )
        })?);
    }
    Ok(Json(graph.subgraph_focus(
        &seeds,
        radius,
        q.limit.unwrap_or(DEFAULT_FOCUS_LIMIT),
    )))
}
