//! Where collection and seed metadata come from.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::memento::{fetch_timemap, parse_timemap, TimeMapDocument, Transport, LINK_FORMAT};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CollectionSourceRecord {
    pub external_id: String,
    pub title: String,
    pub institution: String,
    pub description: String,
    pub subjects: Vec<String>,
    pub collectors: Vec<String>,
    pub portal_link: String,
}

/// Seed metadata as published by the source. Empty strings mean absent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedSourceRecord {
    pub url: String,
    pub title: String,
    pub description: String,
    pub subjects: Vec<String>,
    pub collector: String,
    pub creator: String,
    pub publisher: String,
    pub language: String,
    pub format: String,
    #[serde(alias = "type")]
    pub resource_type: String,
}

pub trait SourceAdapter: Send + Sync {
    fn list_collections(&self) -> Result<Vec<CollectionSourceRecord>, IngestError>;
    fn list_seeds(&self, external_id: &str) -> Result<Vec<SeedSourceRecord>, IngestError>;
    fn fetch_timemap(&self, url: &str) -> Result<TimeMapDocument, IngestError>;
    fn fetch_page(&self, url: &str) -> Result<Option<Vec<u8>>, IngestError>;
}

/// File name stem used for per-URL fixture files.
pub fn urlsafe(url: &str) -> String {
    URL_SAFE_NO_PAD.encode(url.as_bytes())
}

fn parse_jsonl<T: DeserializeOwned>(text: &str, origin: &str) -> Result<Vec<T>, IngestError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l)
                .map_err(|e| IngestError::Source(format!("{origin}:{}: {e}", n + 1)))
        })
        .collect()
}

/// Reads the on-disk corpus layout:
///
/// ```text
/// collections.jsonl
/// seeds/{external_id}.jsonl
/// timemaps/{urlsafe(url)}.link
/// pages/{urlsafe(url)}.html
/// ```
///
/// A missing TimeMap file means the URL has no captures.
#[derive(Debug, Clone)]
pub struct FixtureAdapter {
    root: PathBuf,
}

impl FixtureAdapter {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn read_optional(&self, rel: PathBuf) -> Result<Option<Vec<u8>>, IngestError> {
        let path = self.root.join(rel);
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(IngestError::Source(format!("{}: {e}", path.display()))),
        }
    }
}

impl SourceAdapter for FixtureAdapter {
    fn list_collections(&self) -> Result<Vec<CollectionSourceRecord>, IngestError> {
        let path = self.root.join("collections.jsonl");
        let text = fs::read_to_string(&path)
            .map_err(|e| IngestError::Source(format!("{}: {e}", path.display())))?;
        parse_jsonl(&text, "collections.jsonl")
    }

    fn list_seeds(&self, external_id: &str) -> Result<Vec<SeedSourceRecord>, IngestError> {
        let rel = PathBuf::from("seeds").join(format!("{external_id}.jsonl"));
        match self.read_optional(rel)? {
            None => Ok(Vec::new()),
            Some(bytes) => {
                let text = String::from_utf8(bytes)
                    .map_err(|e| IngestError::Source(format!("seeds/{external_id}.jsonl: {e}")))?;
                parse_jsonl(&text, &format!("seeds/{external_id}.jsonl"))
            }
        }
    }

    fn fetch_timemap(&self, url: &str) -> Result<TimeMapDocument, IngestError> {
        let rel = PathBuf::from("timemaps").join(format!("{}.link", urlsafe(url)));
        match self.read_optional(rel)? {
            None => Ok(TimeMapDocument::empty(url)),
            Some(body) => Ok(parse_timemap(&body, LINK_FORMAT)?),
        }
    }

    fn fetch_page(&self, url: &str) -> Result<Option<Vec<u8>>, IngestError> {
        self.read_optional(PathBuf::from("pages").join(format!("{}.html", urlsafe(url))))
    }
}

/// Reads collection and seed listings laid out like the fixture corpus from
/// an HTTP mirror, TimeMaps from a Memento endpoint, and pages from the live
/// web.
pub struct HttpAdapter<T> {
    corpus_base: String,
    timemap_base: String,
    transport: T,
}

impl<T: Transport> HttpAdapter<T> {
    pub fn new(corpus_base: &str, timemap_base: &str, transport: T) -> Self {
        Self {
            corpus_base: corpus_base.trim_end_matches('/').to_owned(),
            timemap_base: timemap_base.to_owned(),
            transport,
        }
    }

    fn get_text(&self, url: &str) -> Result<Option<String>, IngestError> {
        let resp = self
            .transport
            .get(url)
            .map_err(|e| IngestError::Source(e.to_string()))?;
        match resp.status {
            404 => Ok(None),
            s if (200..300).contains(&s) => String::from_utf8(resp.body)
                .map(Some)
                .map_err(|e| IngestError::Source(format!("{url}: {e}"))),
            s => Err(IngestError::Source(format!("{url} answered with status {s}"))),
        }
    }
}

impl<T: Transport> SourceAdapter for HttpAdapter<T> {
    fn list_collections(&self) -> Result<Vec<CollectionSourceRecord>, IngestError> {
        let url = format!("{}/collections.jsonl", self.corpus_base);
        let text = self
            .get_text(&url)?
            .ok_or_else(|| IngestError::Source(format!("{url} not found")))?;
        parse_jsonl(&text, &url)
    }

    fn list_seeds(&self, external_id: &str) -> Result<Vec<SeedSourceRecord>, IngestError> {
        let url = format!("{}/seeds/{external_id}.jsonl", self.corpus_base);
        match self.get_text(&url)? {
            None => Ok(Vec::new()),
            Some(text) => parse_jsonl(&text, &url),
        }
    }

    fn fetch_timemap(&self, url: &str) -> Result<TimeMapDocument, IngestError> {
        Ok(fetch_timemap(&self.timemap_base, url, &self.transport)?)
    }

    fn fetch_page(&self, url: &str) -> Result<Option<Vec<u8>>, IngestError> {
        match self.transport.get(url) {
            Ok(resp) if resp.is_success() => Ok(Some(resp.body)),
            Ok(_) => Ok(None),
            Err(e) => Err(IngestError::Source(e.to_string())),
        }
    }
}
