use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use oga_archive::StoreError;
use oga_core::FormatError;
use serde_json::{json, Map, Value};

/// JSON error body: `{"error": <code>, "message": <text>, ...details}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Map<String, Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            details: Map::new(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", "a valid bearer token is required")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

impl From<FormatError> for ApiError {
    fn from(e: FormatError) -> Self {
        let (code, status) = match e {
            FormatError::Unrepresentable(_) => ("unrepresentable", StatusCode::UNPROCESSABLE_ENTITY),
            FormatError::UnknownFormat => ("unknown-format", StatusCode::BAD_REQUEST),
            _ => ("parse-failed", StatusCode::BAD_REQUEST),
        };
        let mut err = ApiError::new(status, code, e.to_string());
        if let Some((line, column)) = e.position() {
            err = err.with("line", line).with("column", column);
        }
        err
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        use StatusCode as S;
        let (status, code) = match &e {
            StoreError::ParseFailed(f) => return f.clone().into(),
            StoreError::NotFound(_) => (S::NOT_FOUND, "not-found"),
            StoreError::Gone(_) => (S::GONE, "gone"),
            StoreError::StorageFull { .. } => (S::INSUFFICIENT_STORAGE, "storage-full"),
            StoreError::Metadata(_) => (S::BAD_REQUEST, "invalid-metadata"),
            StoreError::FieldNotUserSettable(_) => (S::BAD_REQUEST, "field-not-user-settable"),
            StoreError::InvalidValue { .. } => (S::BAD_REQUEST, "invalid-value"),
            StoreError::DuplicateMember(_) => (S::CONFLICT, "duplicate-member"),
            StoreError::UnknownProperty(_) => (S::BAD_REQUEST, "unknown-property"),
            StoreError::InvalidQuery(_) => (S::BAD_REQUEST, "invalid-query"),
            StoreError::CorruptArchive(_) => (S::BAD_REQUEST, "corrupt-archive"),
            StoreError::Database(_) | StoreError::Io(_) | StoreError::Corrupt(_) => {
                tracing::error!("storage failure: {e}");
                (S::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = self.details;
        body.insert("error".into(), json!(self.code));
        body.insert("message".into(), json!(self.message));
        let mut resp = (self.status, Json(Value::Object(body))).into_response();
        if self.status == StatusCode::UNAUTHORIZED {
            resp.headers_mut()
                .insert(header::WWW_AUTHENTICATE, header::HeaderValue::from_static("Bearer"));
        }
        resp
    }
}
