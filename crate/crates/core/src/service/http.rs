//! JSON-over-HTTP front end for [`LiveService`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Classification, LiveService, LiveSession, ModelCard, ServiceError};
use crate::seqmine::PersonaReport;

#[derive(Debug, Default, Deserialize)]
struct CreateSession {
    session_id: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StepRequest {
    pub grid: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::SessionExists(_) => StatusCode::CONFLICT,
            ServiceError::InvalidGrid(_) => StatusCode::BAD_REQUEST,
            ServiceError::Model(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        if let ServiceError::InvalidGrid(v) = &self {
            body["violations"] = json!(v);
        }
        (status, Json(body)).into_response()
    }
}

type Shared = State<Arc<LiveService>>;

async fn create_session(State(svc): Shared, body: Bytes) -> Result<(StatusCode, Json<CreatedSession>), Response> {
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| {
            (StatusCode::BAD_REQUEST, Json(json!({ "error": "bad_request", "message": e.to_string() }))).into_response()
        })?
    };
    let session_id = svc.create_session(req.session_id).map_err(IntoResponse::into_response)?;
    Ok((StatusCode::CREATED, Json(CreatedSession { session_id })))
}

async fn post_step(
    State(svc): Shared,
    Path(id): Path<String>,
    Json(req): Json<StepRequest>,
) -> Result<Json<Classification>, ServiceError> {
    svc.classify_wire(&id, &req.grid).map(Json)
}

async fn get_session(State(svc): Shared, Path(id): Path<String>) -> Result<Json<LiveSession>, ServiceError> {
    svc.session(&id).map(Json)
}

async fn get_model(State(svc): Shared) -> Json<ModelCard> {
    Json(svc.model_card())
}

async fn get_personas(State(svc): Shared) -> Json<PersonaReport> {
    Json(svc.report().clone())
}

pub fn router(service: Arc<LiveService>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/steps", post(post_step))
        .route("/model", get(get_model))
        .route("/personas", get(get_personas))
        .with_state(service)
}

pub async fn serve(service: Arc<LiveService>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(service)).await
}
