//! JSON-over-HTTP front end.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use proxauth_core::rfsim::ScanReport;
use serde::{Deserialize, Serialize};

use crate::error::AuthError;
use crate::service::{AuthService, RegisterRequest};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl AuthError {
    pub fn status(&self) -> StatusCode {
        match self {
            AuthError::Conflict => StatusCode::CONFLICT,
            AuthError::Validation(_) | AuthError::Incomplete(_) => StatusCode::BAD_REQUEST,
            AuthError::AuthFailed => StatusCode::UNAUTHORIZED,
            AuthError::Expired => StatusCode::GONE,
            AuthError::Denied => StatusCode::FORBIDDEN,
            AuthError::NotFound => StatusCode::NOT_FOUND,
            AuthError::InvalidState(_) => StatusCode::CONFLICT,
            AuthError::TooManyRequests => StatusCode::TOO_MANY_REQUESTS,
            AuthError::Config(_) | AuthError::Storage(_) | AuthError::Mail(_) | AuthError::Core(_) => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }
}

impl IntoResponse for AuthError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        let message = if status.is_server_error() { "internal error".to_string() } else { self.to_string() };
        (status, Json(ErrorBody { error: self.code().into(), message })).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct LoginBody {
    username: String,
    password: String,
}

#[derive(Debug, Deserialize)]
struct ScansBody {
    scans: Vec<ScanReport>,
}

#[derive(Debug, Deserialize)]
struct OtpRequestBody {
    username: String,
    security_answer: String,
}

#[derive(Debug, Deserialize)]
struct OtpVerifyBody {
    username: String,
    code: String,
}

#[derive(Debug, Serialize)]
struct Granted {
    granted: bool,
    session_id: String,
    next_check_at: Option<f64>,
}

type Shared = State<Arc<AuthService>>;

/// Runs the (blocking, hash-heavy) service call off the async workers.
async fn blocking<T, F>(svc: Arc<AuthService>, f: F) -> Result<T, AuthError>
where
    T: Send + 'static,
    F: FnOnce(&AuthService) -> Result<T, AuthError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&svc))
        .await
        .map_err(|e| AuthError::Storage(format!("worker failed: {e}")))?
}

async fn register(State(svc): Shared, Json(req): Json<RegisterRequest>) -> Result<impl IntoResponse, AuthError> {
    let p = blocking(svc, move |s| s.register(req)).await?;
    Ok((
        StatusCode::CREATED,
        Json(serde_json::json!({ "username": p.username, "email": p.email, "created_at": p.created_at })),
    ))
}

async fn login(State(svc): Shared, Json(b): Json<LoginBody>) -> Result<impl IntoResponse, AuthError> {
    let pending = blocking(svc, move |s| s.login_step1(&b.username, &b.password)).await?;
    Ok(Json(pending))
}

async fn submit(State(svc): Shared, Path(pending_id): Path<String>, Json(b): Json<ScansBody>) -> Result<impl IntoResponse, AuthError> {
    let svc2 = svc.clone();
    let d = blocking(svc, move |s| s.submit_scans(&pending_id, &b.scans)).await?;
    match d.session_id {
        Some(id) if d.granted => {
            let next = svc2.session(&id)?.next_check_at;
            Ok(Json(Granted { granted: true, session_id: id, next_check_at: next }))
        }
        _ => Err(AuthError::Denied),
    }
}

async fn session(State(svc): Shared, Path(id): Path<String>) -> Result<impl IntoResponse, AuthError> {
    Ok(Json(svc.session(&id)?))
}

async fn tick(State(svc): Shared, Path(id): Path<String>, Json(b): Json<ScansBody>) -> Result<impl IntoResponse, AuthError> {
    let r = blocking(svc, move |s| s.continuous_tick(&id, &b.scans)).await?;
    Ok(Json(r))
}

async fn otp_request(State(svc): Shared, Json(b): Json<OtpRequestBody>) -> Result<impl IntoResponse, AuthError> {
    blocking(svc, move |s| s.request_otp(&b.username, &b.security_answer)).await?;
    Ok((StatusCode::ACCEPTED, Json(serde_json::json!({ "status": "sent" }))))
}

async fn otp_verify(State(svc): Shared, Json(b): Json<OtpVerifyBody>) -> Result<impl IntoResponse, AuthError> {
    let s = blocking(svc, move |s| s.verify_otp(&b.username, &b.code)).await?;
    Ok(Json(serde_json::json!({ "granted": true, "session_id": s.session_id, "otp_fallback": true })))
}

pub fn router(svc: Arc<AuthService>) -> Router {
    Router::new()
        .route("/register", post(register))
        .route("/login", post(login))
        .route("/auth/{pending_id}/scans", post(submit))
        .route("/session/{id}", get(session))
        .route("/session/{id}/tick", post(tick))
        .route("/otp/request", post(otp_request))
        .route("/otp/verify", post(otp_verify))
        .with_state(svc)
}

/// Serves until `shutdown` resolves, sweeping overdue sessions every
/// recheck interval.
pub async fn serve(
    svc: Arc<AuthService>,
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let sweeper = {
        let svc = svc.clone();
        let every = std::time::Duration::from_secs_f64(svc.policy().recheck_interval_s);
        tokio::spawn(async move {
            let mut iv = tokio::time::interval(every);
            loop {
                iv.tick().await;
                for id in svc.sweep() {
                    tracing::info!(session = %id, "terminated overdue session");
                }
            }
        })
    };
    let r = axum::serve(listener, router(svc)).with_graceful_shutdown(shutdown).await;
    sweeper.abort();
    r
}
