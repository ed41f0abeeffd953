use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::{json, Value};

use crs_core::{ConfigError, KgError, PipelineError};

/// Error document returned by every endpoint:
/// `{"error": code, "detail": ..., "stage": ...}`.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub error: String,
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: impl Into<String>, detail: impl Into<Value>) -> Self {
        ApiError {
            status,
            error: code.into(),
            detail: detail.into(),
            stage: None,
        }
    }

    pub fn bad_request(detail: impl Into<Value>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", detail)
    }

    pub fn bot_not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "BotNotFound", format!("no bot with id {id}"))
    }

    pub fn session_not_found(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "SessionNotFound",
            format!("no session with id {id}"),
        )
    }

    pub fn internal(detail: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", detail.to_string())
    }
}

impl From<KgError> for ApiError {
    fn from(e: KgError) -> Self {
        let detail = match &e {
            KgError::MalformedLine { line, reason } => json!({ "line": line, "message": reason }),
            KgError::SelfLoop { line } => json!({ "line": line, "message": e.to_string() }),
            _ => json!({ "message": e.to_string() }),
        };
        let status = match e {
            KgError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.code(), detail)
    }
}

impl From<ConfigError> for ApiError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Syntax(err) => ApiError::new(StatusCode::BAD_REQUEST, "ConfigSyntax", err.to_string()),
            ConfigError::Invalid(findings) => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "ConfigInvalid",
                serde_json::to_value(findings).unwrap_or(Value::Null),
            ),
        }
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            error: e.code.to_string(),
            detail: Value::String(e.message.clone()),
            stage: Some(e.stage.to_string()),
        }
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        ApiError::internal(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}
