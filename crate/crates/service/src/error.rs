use axum::http::StatusCode;
use discrepancy::Error;

#[derive(Debug)]
pub enum ApiError {
    NoDataset,
    NoDendrogram,
    UnknownSpace(String),
    /// Unknown space in a resource path rather than a request body.
    UnknownSpaceNotFound(String),
    UnknownNode(String),
    UnknownConfig(String),
    UnknownCase(String),
    PayloadUnavailable(String),
    BadEnum(String),
    BadRequest(String),
    Internal(String),
}

impl ApiError {
    pub(crate) fn from_body(e: serde_json::Error) -> Self {
        let msg = e.to_string();
        if msg.contains("unknown variant") {
            ApiError::BadEnum(msg)
        } else {
            ApiError::BadRequest(msg)
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::NoDataset
            | ApiError::NoDendrogram
            | ApiError::UnknownNode(_)
            | ApiError::UnknownConfig(_)
            | ApiError::UnknownCase(_)
            | ApiError::UnknownSpaceNotFound(_)
            | ApiError::PayloadUnavailable(_) => StatusCode::NOT_FOUND,
            ApiError::UnknownSpace(_) | ApiError::BadEnum(_) | ApiError::BadRequest(_) => {
                StatusCode::BAD_REQUEST
            }
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ApiError::NoDataset => "NoDataset",
            ApiError::NoDendrogram => "NoDendrogram",
            ApiError::UnknownSpace(_) | ApiError::UnknownSpaceNotFound(_) => "UnknownSpace",
            ApiError::UnknownNode(_) => "UnknownNode",
            ApiError::UnknownConfig(_) => "UnknownConfig",
            ApiError::UnknownCase(_) => "UnknownCase",
            ApiError::PayloadUnavailable(_) => "PayloadUnavailable",
            ApiError::BadEnum(_) => "BadEnum",
            ApiError::BadRequest(_) => "BadRequest",
            ApiError::Internal(_) => "Internal",
        }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ApiError::NoDataset => f.write_str("no dataset loaded"),
            ApiError::NoDendrogram => f.write_str("no dendrogram computed yet; POST /api/dendrogram first"),
            ApiError::UnknownSpace(s) | ApiError::UnknownSpaceNotFound(s) => write!(f, "unknown space '{s}'"),
            ApiError::UnknownNode(s) => write!(f, "unknown node '{s}'"),
            ApiError::UnknownConfig(s) => write!(f, "no cached result for config '{s}'"),
            ApiError::UnknownCase(s) => write!(f, "unknown case '{s}'"),
            ApiError::PayloadUnavailable(s) => write!(f, "space '{s}' has no payloads"),
            ApiError::BadEnum(m) | ApiError::BadRequest(m) | ApiError::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for ApiError {}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownSpace(s) => ApiError::UnknownSpace(s),
            other => ApiError::Internal(other.to_string()),
        }
    }
}
