//! Live-web search providers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::MediaType;
use crate::memento::Transport;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveResult {
    pub url: String,
    pub title: String,
    #[serde(default)]
    pub snippet: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("live search unavailable: {0}")]
    Unavailable(String),
}

pub trait LiveWebProvider: Send + Sync {
    fn search(
        &self,
        terms: &str,
        media_type: Option<MediaType>,
        count: usize,
    ) -> Result<Vec<LiveResult>, ProviderError>;
}

/// Canned results keyed by query text (trimmed, lower-cased).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FixtureProvider {
    pub results: BTreeMap<String, Vec<LiveResult>>,
}

impl FixtureProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, query: &str, results: Vec<LiveResult>) -> Self {
        self.results.insert(Self::key(query), results);
        self
    }

    /// Reads a JSON object mapping query text to result lists.
    pub fn from_file(path: &Path) -> Result<Self, ProviderError> {
        let bytes = std::fs::read(path)
            .map_err(|e| ProviderError::Unavailable(format!("{}: {e}", path.display())))?;
        let results: BTreeMap<String, Vec<LiveResult>> = serde_json::from_slice(&bytes)
            .map_err(|e| ProviderError::Unavailable(format!("{}: {e}", path.display())))?;
        Ok(Self {
            results: results.into_iter().map(|(k, v)| (Self::key(&k), v)).collect(),
        })
    }

    fn key(query: &str) -> String {
        query.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
    }
}

impl LiveWebProvider for FixtureProvider {
    fn search(
        &self,
        terms: &str,
        _media_type: Option<MediaType>,
        count: usize,
    ) -> Result<Vec<LiveResult>, ProviderError> {
        Ok(self
            .results
            .get(&Self::key(terms))
            .map(|r| r.iter().take(count).cloned().collect())
            .unwrap_or_default())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DisabledProvider;

impl LiveWebProvider for DisabledProvider {
    fn search(&self, _: &str, _: Option<MediaType>, _: usize) -> Result<Vec<LiveResult>, ProviderError> {
        Err(ProviderError::Unavailable("no live provider configured".into()))
    }
}

/// Queries `GET {endpoint}?q=..&count=..[&media_type=..]`, expecting a JSON
/// array of `{url, title, snippet}`.
pub struct HttpProvider<T> {
    endpoint: String,
    transport: T,
}

impl<T: Transport> HttpProvider<T> {
    pub fn new(endpoint: &str, transport: T) -> Self {
        Self {
            endpoint: endpoint.to_owned(),
            transport,
        }
    }
}

impl<T: Transport> LiveWebProvider for HttpProvider<T> {
    fn search(
        &self,
        terms: &str,
        media_type: Option<MediaType>,
        count: usize,
    ) -> Result<Vec<LiveResult>, ProviderError> {
        let mut query = url::form_urlencoded::Serializer::new(String::new());
        query.append_pair("q", terms).append_pair("count", &count.to_string());
        if let Some(m) = media_type {
            query.append_pair("media_type", m.as_str());
        }
        let url = format!("{}?{}", self.endpoint, query.finish());
        let resp = self
            .transport
            .get(&url)
            .map_err(|e| ProviderError::Unavailable(e.to_string()))?;
        if !resp.is_success() {
            return Err(ProviderError::Unavailable(format!("status {}", resp.status)));
        }
        let mut results: Vec<LiveResult> = serde_json::from_slice(&resp.body)
            .map_err(|e| ProviderError::Unavailable(format!("bad response: {e}")))?;
        results.truncate(count);
        Ok(results)
    }
}
