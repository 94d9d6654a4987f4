use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dots_polygons::polygon_game::Player;
use serde::Deserialize;

use crate::error::ServiceError;
use crate::fixtures::FIXTURES;
use crate::game::Move;
use crate::service::{CreateConfig, Service};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::BAD_REQUEST);
        (status, Json(self.body())).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    #[serde(flatten)]
    pub mv: Move,
    #[serde(default)]
    pub player: Option<Player>,
}

type Shared = Arc<Service>;

fn body<T>(r: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    r.map(|Json(v)| v).map_err(|e| ServiceError::InvalidConfig(e.body_text()))
}

/// Solver-backed work runs off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ServiceError::Storage(e.to_string()))?
}

async fn create(State(svc): State<Shared>, cfg: Result<Json<CreateConfig>, JsonRejection>) -> Response {
    let cfg = match body(cfg) {
        Ok(c) => c,
        Err(e) => return e.into_response(),
    };
    match blocking(move || svc.create(&cfg)).await {
        Ok(v) => (StatusCode::CREATED, Json(v)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn show(State(svc): State<Shared>, Path(id): Path<String>) -> Response {
    match svc.get(&id) {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn hint(State(svc): State<Shared>, Path(id): Path<String>) -> Response {
    match blocking(move || svc.hint(&id)).await {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn play(
    State(svc): State<Shared>,
    Path(id): Path<String>,
    req: Result<Json<MoveRequest>, JsonRejection>,
) -> Response {
    let req = match body(req) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    match blocking(move || svc.post_move(&id, req.mv, req.player)).await {
        Ok(v) => Json(v).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn fixtures() -> Response {
    Json(FIXTURES.to_vec()).into_response()
}

pub fn router(svc: Shared) -> Router {
    Router::new()
        .route("/games", post(create))
        .route("/games/{id}", get(show))
        .route("/games/{id}/hint", get(hint))
        .route("/games/{id}/moves", post(play))
        .route("/fixtures", get(fixtures))
        .with_state(svc)
}

pub async fn serve(svc: Shared, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(svc)).await
}
