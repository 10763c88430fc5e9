//! Query and result types.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::document::Facet;
use super::SearchError;
use crate::domain::{GroupId, MediaType, ResourceId};
use crate::memento::CaptureSpan;

pub const DEFAULT_PAGE_SIZE: usize = 20;
pub const MAX_PAGE_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    pub terms: String,
    pub media_type: Option<MediaType>,
    pub filters: BTreeMap<Facet, String>,
    pub page: usize,
    pub page_size: usize,
}

impl Default for QuerySpec {
    fn default() -> Self {
        Self {
            terms: String::new(),
            media_type: None,
            filters: BTreeMap::new(),
            page: 1,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

impl QuerySpec {
    pub fn new(terms: &str) -> Self {
        Self {
            terms: terms.to_owned(),
            ..Self::default()
        }
    }

    pub fn filter(mut self, facet: Facet, value: &str) -> Self {
        self.filters.insert(facet, value.to_owned());
        self
    }

    pub fn page(mut self, page: usize, page_size: usize) -> Self {
        self.page = page;
        self.page_size = page_size;
        self
    }

    /// Builds a query from request parameters: `q`, `media_type`, `page`,
    /// `page_size`, and one parameter per facet filter named after the facet.
    pub fn from_params<'a>(
        params: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, SearchError> {
        let mut q = QuerySpec::default();
        let number = |k: &str, v: &str| {
            v.parse::<usize>()
                .map_err(|_| SearchError::InvalidQuery(format!("{k} must be a positive integer")))
        };
        for (key, value) in params {
            match key {
                "q" | "terms" => q.terms = value.to_owned(),
                "page" => q.page = number(key, value)?,
                "page_size" => q.page_size = number(key, value)?,
                "media_type" | "media" if !value.is_empty() => {
                    q.media_type = Some(MediaType::parse(value).ok_or_else(|| {
                        SearchError::InvalidQuery(format!("unknown media type {value:?}"))
                    })?);
                }
                "media_type" | "media" => {}
                other => {
                    let facet: Facet = other.parse()?;
                    if q.filters.insert(facet, value.to_owned()).is_some() {
                        return Err(SearchError::InvalidQuery(format!(
                            "more than one value for {facet}"
                        )));
                    }
                }
            }
        }
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.page == 0 {
            return Err(SearchError::InvalidQuery("page starts at 1".into()));
        }
        if self.page_size == 0 || self.page_size > MAX_PAGE_SIZE {
            return Err(SearchError::InvalidQuery(format!(
                "page_size must be between 1 and {MAX_PAGE_SIZE}"
            )));
        }
        if let (Some(m), Some(f)) = (self.media_type, self.filters.get(&Facet::MediaType)) {
            if m.as_str() != f.trim() {
                return Err(SearchError::InvalidQuery(
                    "media_type conflicts with the media_type filter".into(),
                ));
            }
        }
        Ok(())
    }

    /// Facet filters with `media_type` folded in, values normalized.
    pub fn effective_filters(&self) -> BTreeMap<Facet, String> {
        let mut out: BTreeMap<Facet, String> = self
            .filters
            .iter()
            .map(|(f, v)| (*f, f.normalize_value(v)))
            .collect();
        if let Some(m) = self.media_type {
            out.insert(Facet::MediaType, m.as_str().to_owned());
        }
        out
    }

    pub fn offset(&self) -> usize {
        (self.page - 1).saturating_mul(self.page_size)
    }
}

/// Which private groups a searcher may see. Public groups are always visible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Visibility {
    All,
    PublicPlus(BTreeSet<GroupId>),
}

impl Visibility {
    pub fn public_only() -> Self {
        Visibility::PublicPlus(BTreeSet::new())
    }

    pub fn allows(&self, public: bool, group: GroupId) -> bool {
        match self {
            Visibility::All => true,
            Visibility::PublicPlus(groups) => public || groups.contains(&group),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snippet {
    pub field: String,
    pub text: String,
    /// Byte ranges of matched terms within `text`.
    pub highlights: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ResultSource {
    Archive {
        resource_id: ResourceId,
        group_id: GroupId,
        subgroup_id: Option<GroupId>,
        url: String,
        title: String,
        captures: CaptureSpan,
    },
    LiveWeb {
        url: String,
        title: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub source: ResultSource,
    pub score: f64,
    /// Per query term contribution to `score`.
    pub score_components: Vec<(String, f64)>,
    pub snippet: Option<Snippet>,
}

impl SearchResult {
    pub fn resource_id(&self) -> Option<ResourceId> {
        match &self.source {
            ResultSource::Archive { resource_id, .. } => Some(*resource_id),
            ResultSource::LiveWeb { .. } => None,
        }
    }

    pub fn is_archive(&self) -> bool {
        matches!(self.source, ResultSource::Archive { .. })
    }

    pub fn url(&self) -> &str {
        match &self.source {
            ResultSource::Archive { url, .. } | ResultSource::LiveWeb { url, .. } => url,
        }
    }
}

pub type FacetCounts = BTreeMap<Facet, BTreeMap<String, usize>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchPage {
    pub results: Vec<SearchResult>,
    pub facet_counts: FacetCounts,
    pub total: usize,
    pub page: usize,
    pub page_size: usize,
    /// Set when live-web results were requested but could not be fetched.
    pub live_unavailable: bool,
    pub warnings: Vec<String>,
}
