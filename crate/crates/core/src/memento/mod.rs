//! Web archive wire protocols: TimeMaps, CDX queries, on-demand archiving and
//! capture timelines.

pub mod archive_now;
pub mod cdx;
pub mod linkformat;
pub mod timeline;
pub mod timemap;
pub mod transport;

pub use archive_now::{request_archive_now, ArchiveOutcome, ArchiveReceipt};
pub use cdx::{archive_status, cdx_query_url, parse_cdx_response, ArchiveStatus, CdxCaptureLine, IndexStatus};
pub use timeline::{aggregate_by_month, aggregate_captures_by_month, capture_span, CaptureSpan, MonthBucket};
pub use timemap::{
    fetch_timemap, parse_timemap, parse_timemap_with_report, timemap_url, MementoEntry, ParseReport,
    RelMarker, SkippedEntry, TimeMapDocument, LINK_FORMAT,
};
pub use transport::{
    HttpResponse, HttpTransport, PoliteTransport, StubTransport, Transport, TransportError, DEFAULT_POLITENESS,
    DEFAULT_TIMEOUT,
};

use crate::urlnorm::InvalidUrl;

#[derive(Debug, thiserror::Error)]
pub enum MementoError {
    #[error("unsupported media type {0:?}")]
    UnsupportedMediaType(String),
    #[error("malformed link-format: {0}")]
    MalformedLinkFormat(String),
    #[error("timemap has no rel=\"original\" link")]
    MissingOriginalRelation,
    #[error("malformed CDX response: {0}")]
    MalformedResponse(String),
    /// A required CDX column is absent from the header row.
    #[error("CDX header lacks required field {0:?}")]
    UnknownHeaderField(String),
    #[error(transparent)]
    InvalidUrl(#[from] InvalidUrl),
    #[error(transparent)]
    Transport(#[from] TransportError),
}
