//! Loading external archive collections into read-only groups.

pub mod adapter;
pub mod fallback;
pub mod lease;
pub mod pipeline;
pub mod thumbnail;

pub use adapter::{
    urlsafe, CollectionSourceRecord, FixtureAdapter, HttpAdapter, SeedSourceRecord, SourceAdapter,
};
pub use fallback::apply_html_meta_fallback;
pub use lease::{Lease, LeaseTable};
pub use pipeline::{
    ingest_collection, run_incremental_update, select_collections_for_update, CollectionReport,
    IngestOptions, SeedError, UpdateReport, DEFAULT_PARALLELISM, DEFAULT_WINDOW_DAYS,
};
pub use thumbnail::{
    resolve_thumbnail, ScreenshotProvider, StubScreenshotProvider, Thumbnail, GONE_MESSAGE,
};

use crate::domain::DomainError;
use crate::memento::MementoError;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("unknown collection {0:?}")]
    UnknownCollection(String),
    #[error("collection {0:?} is already being ingested")]
    LeaseHeld(String),
    #[error("source error: {0}")]
    Source(String),
    #[error(transparent)]
    Memento(#[from] MementoError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
