//! Persistent faceted-search sessions over Arxiv results, exposed over HTTP.
//!
//! Routes:
//!
//! | method | path | body / answer |
//! |---|---|---|
//! | POST | `/search` | [`SearchRequest`] → [`SessionSummary`] |
//! | GET | `/session/{sid}` | [`SessionSummary`] |
//! | GET | `/facet/{sid}/{alpha}` | reduced facet JSON |
//! | GET | `/layout/{sid}/{alpha}?t_min=1&t_max=8` | extra-node layout JSON |
//! | POST | `/navigate` | [`NavigateRequest`] → [`NavigateResponse`] |
//! | GET | `/history/{sid}` | query history JSON |
//! | POST | `/history/merge` | `{sid, other_sid}` → merged history |
//! | POST | `/combine` | `{query, modifier, term}` → `{query}` |

mod api;
mod engine;
mod store;

use dataedron_arxiv::ArxivError;
use dataedron_core::facet::FacetError;
use dataedron_core::query::{ParseError, QueryError};
use thiserror::Error;

pub use api::{router, serve};
pub use engine::{
    Engine, EntrySummary, NavigateRequest, NavigateResponse, SearchRequest, SessionSummary, DEFAULT_N, DEFAULT_W,
    MAX_N, MAX_W,
};
pub use store::{Params, Session, SessionStore};

/// Environment variable naming the session directory.
pub const DATA_DIR_ENV: &str = "DATAEDRON_DATA_DIR";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("query parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("query error: {0}")]
    Query(#[from] QueryError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("type `{0}` is not navigable in this session")]
    NotNavigable(String),
    #[error(transparent)]
    Facet(#[from] FacetError),
    #[error("upstream failure: {0}")]
    Upstream(#[from] ArxivError),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl ServiceError {
    /// HTTP status used for this error.
    pub fn status(&self) -> u16 {
        match self {
            ServiceError::Parse(_) | ServiceError::Query(_) => 400,
            ServiceError::UnknownSession(_) => 404,
            ServiceError::InvalidParams(_) | ServiceError::NotNavigable(_) => 422,
            ServiceError::Facet(FacetError::Invalid(_)) => 500,
            ServiceError::Facet(_) => 422,
            ServiceError::Upstream(_) => 502,
            ServiceError::Storage(_) => 500,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::Parse(_) => "parse",
            ServiceError::Query(_) => "query",
            ServiceError::InvalidParams(_) => "invalid_params",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::NotNavigable(_) => "not_navigable",
            ServiceError::Facet(_) => "facet",
            ServiceError::Upstream(_) => "upstream",
            ServiceError::Storage(_) => "storage",
        }
    }
}
