//! The JSON error envelope and conversions from the service errors.
//!
//! Every failure answers `{"code": ..., "message": ..., "details": ...}`.

use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Request};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use extrucat_core::annotation::AnnotationError;
use extrucat_core::cad::CadError;
use extrucat_core::catalogue::{CatalogueError, LeadError, SearchError};
use extrucat_core::ontology::OntologyError;
use extrucat_core::rdf::StoreError;
use extrucat_core::sparql::QueryError;
use extrucat_core::technician::{StockError, TechnicianError};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "forbidden", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn internal(message: impl std::fmt::Display) -> Self {
        log::error!("internal error: {message}");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message.to_string())
    }

    fn field(status: StatusCode, code: &'static str, field: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        Self::new(status, code, message.clone()).with_details(json!([{ "field": field, "message": message }]))
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}: {}", self.status.as_u16(), self.code, self.message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "code": self.code, "message": self.message, "details": self.details });
        (self.status, Json(body)).into_response()
    }
}

/// `Json<T>` whose rejections use the error envelope.
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(value)) => Ok(ApiJson(value)),
            Err(rejection) => Err(json_rejection(rejection)),
        }
    }
}

fn json_rejection(rejection: JsonRejection) -> ApiError {
    let status = match rejection {
        JsonRejection::MissingJsonContentType(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
        _ => StatusCode::BAD_REQUEST,
    };
    ApiError::new(status, "invalid_json", rejection.body_text())
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        ApiError::internal(e)
    }
}

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        match e {
            AnnotationError::Invalid(fields) => {
                let details = serde_json::to_value(&fields).unwrap_or(Value::Null);
                ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "invalid_submission",
                    "submission has invalid fields",
                )
                .with_details(details)
            }
            AnnotationError::AlreadyExists(_) => ApiError::new(StatusCode::CONFLICT, "already_exists", e.to_string()),
            AnnotationError::UnknownExtruder(_) | AnnotationError::UnknownComponent(_) => {
                ApiError::not_found(e.to_string())
            }
            AnnotationError::Asset(_) | AnnotationError::Store(_) => ApiError::internal(e),
        }
    }
}

impl From<OntologyError> for ApiError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::UnknownClass(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_class", e.to_string()),
        }
    }
}

impl From<CatalogueError> for ApiError {
    fn from(e: CatalogueError) -> Self {
        match e {
            CatalogueError::UnknownExtruder(_) => ApiError::not_found(e.to_string()),
            CatalogueError::Template(_) => ApiError::internal(e),
        }
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Template(_) => ApiError::internal(e),
            SearchError::Catalogue(inner) => inner.into(),
            _ => match e.field() {
                Some(field) => ApiError::field(StatusCode::BAD_REQUEST, "invalid_search", field, e.to_string()),
                None => ApiError::new(StatusCode::BAD_REQUEST, "invalid_search", e.to_string()),
            },
        }
    }
}

impl From<LeadError> for ApiError {
    fn from(e: LeadError) -> Self {
        match e {
            LeadError::Invalid { field, ref message } => ApiError::field(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_request",
                field,
                message.clone(),
            ),
            LeadError::UnknownExtruder(_) => ApiError::not_found(e.to_string()),
            LeadError::Persist(_) => ApiError::internal(e),
        }
    }
}

impl From<StockError> for ApiError {
    fn from(e: StockError) -> Self {
        match e {
            StockError::Unreachable(_) => {
                ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "stock_unavailable", e.to_string())
            }
            StockError::Conflict(_) => ApiError::new(StatusCode::CONFLICT, "stock_conflict", e.to_string()),
            StockError::UnknownProvider(_) => ApiError::not_found(e.to_string()),
            StockError::Protocol(_) => ApiError::new(StatusCode::BAD_GATEWAY, "stock_protocol", e.to_string()),
        }
    }
}

impl From<TechnicianError> for ApiError {
    fn from(e: TechnicianError) -> Self {
        match e {
            TechnicianError::NotOwner { .. } => ApiError::forbidden(e.to_string()),
            TechnicianError::UnknownCustomer(_) => ApiError::forbidden(e.to_string()),
            TechnicianError::UnknownComponent(_) => ApiError::not_found(e.to_string()),
            TechnicianError::NotAComponentOf { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "not_a_component", e.to_string())
            }
            TechnicianError::MissingPartCode(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "missing_part_code", e.to_string())
            }
            TechnicianError::Stock(inner) => inner.into(),
            TechnicianError::Catalogue(inner) => inner.into(),
            TechnicianError::Ontology(inner) => inner.into(),
            TechnicianError::Ticket(_) | TechnicianError::Persist(_) => ApiError::internal(e),
        }
    }
}

impl From<CadError> for ApiError {
    fn from(e: CadError) -> Self {
        let (status, code) = match &e {
            CadError::InProgress => (StatusCode::CONFLICT, "sync_in_progress"),
            CadError::Network(_) => (StatusCode::SERVICE_UNAVAILABLE, "cad_unavailable"),
            CadError::Auth | CadError::Corrupt { .. } | CadError::Protocol(_) => (StatusCode::BAD_GATEWAY, "cad_error"),
            CadError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            CadError::UnsupportedFormat(_) => (StatusCode::UNSUPPORTED_MEDIA_TYPE, "unsupported_format"),
            CadError::Annotation(_) => {
                let CadError::Annotation(inner) = e else { unreachable!() };
                return inner.into();
            }
            CadError::Asset(_) => return ApiError::internal(e),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_query", e.to_string())
            .with_details(json!({ "line": e.line, "column": e.column }))
    }
}
