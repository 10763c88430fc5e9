//! Metadata search: a field-weighted BM25 index with facets, and federated
//! search that appends live-web results after archive hits.

pub mod document;
pub mod federated;
pub mod index;
pub mod provider;
pub mod query;
pub mod sync;
pub mod tokenize;

pub use document::{Facet, Field, IndexDocument};
pub use federated::federated_search;
pub use index::{SearchIndex, INDEX_VERSION};
pub use provider::{DisabledProvider, FixtureProvider, HttpProvider, LiveResult, LiveWebProvider, ProviderError};
pub use query::{
    FacetCounts, QuerySpec, ResultSource, SearchPage, SearchResult, Snippet, Visibility,
    DEFAULT_PAGE_SIZE, MAX_PAGE_SIZE,
};
pub use sync::{document_for, rebuild_index, sync_index};
pub use tokenize::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("unknown facet field {0:?}")]
    InvalidFacetField(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("index storage: {0}")]
    Storage(String),
}
