//! TimeMap documents: parsing, canonical serialization and fetching.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::linkformat::{parse_links, write_link, LinkEntry};
use super::transport::{Transport, TransportError};
use super::MementoError;
use crate::clock::{format_rfc1123, parse_rfc1123, Timestamp};

pub const LINK_FORMAT: &str = "application/link-format";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelMarker {
    First,
    Last,
    Memento,
}

impl RelMarker {
    pub fn as_str(self) -> &'static str {
        match self {
            RelMarker::First => "first",
            RelMarker::Last => "last",
            RelMarker::Memento => "memento",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MementoEntry {
    pub uri: String,
    pub datetime: Timestamp,
    pub rel_markers: BTreeSet<RelMarker>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeMapDocument {
    pub original_uri: String,
    pub timegate_uri: Option<String>,
    pub self_uri: Option<String>,
    pub mementos: Vec<MementoEntry>,
}

impl TimeMapDocument {
    pub fn empty(original_uri: &str) -> Self {
        Self {
            original_uri: original_uri.to_owned(),
            timegate_uri: None,
            self_uri: None,
            mementos: Vec::new(),
        }
    }

    /// Canonical link-format: original, timegate, self, then mementos in
    /// ascending order.
    pub fn to_link_format(&self) -> String {
        let rel = |r: &str| vec![("rel".to_owned(), r.to_owned())];
        let mut links = vec![LinkEntry {
            uri: self.original_uri.clone(),
            params: rel("original"),
        }];
        if let Some(tg) = &self.timegate_uri {
            links.push(LinkEntry {
                uri: tg.clone(),
                params: rel("timegate"),
            });
        }
        if let Some(s) = &self.self_uri {
            let mut params = rel("self");
            params.push(("type".into(), LINK_FORMAT.into()));
            links.push(LinkEntry {
                uri: s.clone(),
                params,
            });
        }
        for m in &self.mementos {
            let rels: Vec<&str> = m.rel_markers.iter().map(|r| r.as_str()).collect();
            links.push(LinkEntry {
                uri: m.uri.clone(),
                params: vec![
                    ("rel".into(), rels.join(" ")),
                    ("datetime".into(), format_rfc1123(&m.datetime)),
                ],
            });
        }
        let mut out = links.iter().map(write_link).collect::<Vec<_>>().join(",\n");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedEntry {
    pub uri: String,
    pub raw_datetime: Option<String>,
    pub reason: String,
}

/// Memento entries dropped during parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub skipped: Vec<SkippedEntry>,
}

pub fn parse_timemap(body: &[u8], declared_media_type: &str) -> Result<TimeMapDocument, MementoError> {
    parse_timemap_with_report(body, declared_media_type).map(|(doc, _)| doc)
}

pub fn parse_timemap_with_report(
    body: &[u8],
    declared_media_type: &str,
) -> Result<(TimeMapDocument, ParseReport), MementoError> {
    let essence = declared_media_type
        .split(';')
        .next()
        .unwrap_or_default()
        .trim()
        .to_ascii_lowercase();
    if essence != LINK_FORMAT {
        return Err(MementoError::UnsupportedMediaType(declared_media_type.to_owned()));
    }
    let text = std::str::from_utf8(body)
        .map_err(|e| MementoError::MalformedLinkFormat(format!("body is not UTF-8: {e}")))?;

    let mut original = None;
    let mut timegate = None;
    let mut self_uri = None;
    let mut mementos = Vec::new();
    let mut report = ParseReport::default();
    for link in parse_links(text)? {
        let rels = link.rels();
        let has = |r: &str| rels.iter().any(|x| x == r);
        if has("original") && original.is_none() {
            original = Some(link.uri.clone());
        }
        if has("timegate") && timegate.is_none() {
            timegate = Some(link.uri.clone());
        }
        if has("self") && self_uri.is_none() {
            self_uri = Some(link.uri.clone());
        }
        if !has("memento") {
            continue;
        }
        let raw = link.param("datetime").map(str::to_owned);
        let skip = |reason: &str| SkippedEntry {
            uri: link.uri.clone(),
            raw_datetime: raw.clone(),
            reason: reason.to_owned(),
        };
        if link.uri.is_empty() {
            report.skipped.push(skip("empty memento uri"));
            continue;
        }
        let Some(datetime) = raw.as_deref().and_then(parse_rfc1123) else {
            report.skipped.push(skip(if raw.is_some() {
                "unparsable datetime"
            } else {
                "missing datetime"
            }));
            continue;
        };
        let rel_markers = rels
            .iter()
            .filter_map(|r| match r.as_str() {
                "first" => Some(RelMarker::First),
                "last" => Some(RelMarker::Last),
                "memento" => Some(RelMarker::Memento),
                _ => None,
            })
            .collect();
        mementos.push(MementoEntry {
            uri: link.uri,
            datetime,
            rel_markers,
        });
    }
    let original_uri = original.ok_or(MementoError::MissingOriginalRelation)?;
    mementos.sort_by(|a, b| {
        a.datetime
            .cmp(&b.datetime)
            .then_with(|| a.uri.cmp(&b.uri))
            .then_with(|| a.rel_markers.cmp(&b.rel_markers))
    });
    Ok((
        TimeMapDocument {
            original_uri,
            timegate_uri: timegate,
            self_uri,
            mementos,
        },
        report,
    ))
}

pub fn timemap_url(timemap_base: &str, original_url: &str) -> String {
    format!("{}/timemap/link/{}", timemap_base.trim_end_matches('/'), original_url)
}

/// Fetches and parses the TimeMap of `original_url`. A 404 means the URL was
/// never captured and yields an empty document.
pub fn fetch_timemap(
    timemap_base: &str,
    original_url: &str,
    transport: &dyn Transport,
) -> Result<TimeMapDocument, MementoError> {
    let url = timemap_url(timemap_base, original_url);
    let resp = transport.get(&url)?;
    if resp.status == 404 {
        return Ok(TimeMapDocument::empty(original_url));
    }
    if !resp.is_success() {
        return Err(TransportError::Status {
            url,
            status: resp.status,
        }
        .into());
    }
    let media_type = resp.header("content-type").unwrap_or(LINK_FORMAT);
    parse_timemap(&resp.body, media_type)
}
