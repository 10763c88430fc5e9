//! Reads a fixture corpus straight from disk, without the ingestion code.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use aw_core::clock::Timestamp;
use aw_core::ingest::urlsafe;
use chrono::DateTime;

pub type Captures = BTreeSet<(Timestamp, String)>;

pub fn seed_urls(root: &Path, collection: &str) -> Vec<String> {
    let text = fs::read_to_string(root.join("seeds").join(format!("{collection}.jsonl"))).unwrap_or_default();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            v["url"].as_str().unwrap().to_owned()
        })
        .collect()
}

/// `(datetime, uri)` of every link entry carrying a datetime.
pub fn raw_mementos(body: &str) -> Captures {
    body.split('<')
        .skip(1)
        .filter_map(|entry| {
            let uri = &entry[..entry.find('>')?];
            let rest = entry.split("datetime=\"").nth(1)?;
            let raw = &rest[..rest.find('"')?];
            let t = DateTime::parse_from_rfc2822(&raw.replace("GMT", "+0000")).ok()?.to_utc();
            Some((t, uri.to_owned()))
        })
        .collect()
}

/// Seed url → mementos in its TimeMap file.
pub fn expected_captures(root: &Path, collection: &str) -> BTreeMap<String, Captures> {
    seed_urls(root, collection)
        .into_iter()
        .map(|url| {
            let path = root.join("timemaps").join(format!("{}.link", urlsafe(&url)));
            let caps = fs::read_to_string(path).map(|b| raw_mementos(&b)).unwrap_or_default();
            (url, caps)
        })
        .collect()
}

pub fn has_page(root: &Path, url: &str) -> bool {
    root.join("pages").join(format!("{}.html", urlsafe(url))).exists()
}

/// The source-derived part of a resource, keyed by url, with its captures.
pub fn comparable(store: &aw_core::domain::Store, group: aw_core::domain::GroupId) -> BTreeMap<String, (serde_json::Value, Captures)> {
    store
        .resources_in_group(group)
        .unwrap()
        .into_iter()
        .map(|r| {
            let meta = serde_json::json!({
                "original_url": r.original_url,
                "title": r.title,
                "description": r.description,
                "subjects": r.subjects,
                "collector": r.collector,
                "creator": r.creator,
                "publisher": r.publisher,
                "language": r.language,
                "format": r.format,
                "resource_type": r.resource_type,
                "media_type": r.media_type,
                "source": r.source,
            });
            let caps = store
                .captures(r.id)
                .unwrap()
                .into_iter()
                .map(|c| (c.capture_datetime, c.capture_uri))
                .collect();
            (r.url, (meta, caps))
        })
        .collect()
}
