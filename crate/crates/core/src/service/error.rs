//! Mapping of internal errors to HTTP status codes and stable codes.

use serde::Serialize;

use crate::domain::DomainError;
use crate::ingest::IngestError;
use crate::memento::MementoError;
use crate::search::SearchError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub http_status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(http_status: u16, code: &str, message: impl Into<String>) -> Self {
        Self {
            http_status,
            code: code.to_owned(),
            message: message.into(),
        }
    }

    pub fn unauthenticated() -> Self {
        Self::new(401, "Unauthenticated", "a valid session token is required")
    }

    pub fn invalid_credentials() -> Self {
        Self::new(401, "InvalidCredentials", "unknown username or wrong password")
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(400, "MalformedRequest", message)
    }

    pub fn route_not_found() -> Self {
        Self::new(404, "RouteNotFound", "no such endpoint")
    }

    pub fn method_not_allowed() -> Self {
        Self::new(405, "MethodNotAllowed", "method not supported on this endpoint")
    }

    /// Opaque to the client; the cause goes to the log.
    pub fn internal(cause: &dyn std::fmt::Display) -> Self {
        tracing::error!(%cause, "internal error");
        Self::new(500, "InternalError", "internal error")
    }
}

/// `(status, code)` for every domain error.
pub fn domain_status(e: &DomainError) -> u16 {
    use DomainError::*;
    match e {
        ReadOnlyGroup(_) | NotAMember { .. } => 403,
        UnknownUser(_) | UnknownGroup(_) | UnknownResource(_) | UnknownTag(_) => 404,
        DuplicateUsername(_)
        | DuplicateUrlInGroup { .. }
        | DuplicateTag(_)
        | AlreadyMember { .. }
        | SoleOwnerCannotLeave(_) => 409,
        EmptyTitle
        | FieldNotEditable(_)
        | NestingTooDeep
        | InvalidSubgroup { .. }
        | FewerThanTwoSources
        | EmptyValue
        | TextTooLong { .. }
        | CaptureInFuture(_)
        | InvalidUrl(_)
        | InvalidArgument(_) => 422,
        Storage(_) => 500,
    }
}

impl From<DomainError> for ApiError {
    fn from(e: DomainError) -> Self {
        match domain_status(&e) {
            500 => ApiError::internal(&e),
            status => ApiError::new(status, e.code(), e.to_string()),
        }
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::InvalidFacetField(_) => ApiError::new(422, "InvalidFacetField", e.to_string()),
            SearchError::InvalidQuery(_) => ApiError::new(422, "InvalidQuery", e.to_string()),
            SearchError::Storage(_) => ApiError::internal(&e),
        }
    }
}

impl From<MementoError> for ApiError {
    fn from(e: MementoError) -> Self {
        match e {
            MementoError::InvalidUrl(_) => ApiError::new(422, "InvalidUrl", e.to_string()),
            MementoError::Transport(_) => ApiError::new(502, "TransportError", e.to_string()),
            _ => ApiError::new(502, "UpstreamError", e.to_string()),
        }
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Domain(d) => d.into(),
            IngestError::Memento(m) => m.into(),
            IngestError::UnknownCollection(_) => ApiError::new(404, "UnknownCollection", e.to_string()),
            IngestError::LeaseHeld(_) => ApiError::new(409, "LeaseHeld", e.to_string()),
            IngestError::Source(_) => ApiError::new(502, "UpstreamError", e.to_string()),
        }
    }
}
