//! Group export as JSON Lines or CSV, and conversion of a JSON Lines export
//! back into a fixture corpus.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::{format_iso, Timestamp};
use crate::domain::{DomainError, GroupId, ResourceView, Store, UserId};
use crate::ingest::{urlsafe, CollectionSourceRecord, SeedSourceRecord};
use crate::memento::{capture_span, MementoEntry, RelMarker, TimeMapDocument};

pub const EXPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Jsonl,
    Csv,
}

impl ExportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ExportFormat::Jsonl => "jsonl",
            ExportFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(ExportFormat::Jsonl),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format {other:?} (expected jsonl or csv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportManifest {
    pub group_id: GroupId,
    pub format: ExportFormat,
    pub resource_count: usize,
    pub capture_count: usize,
    pub generated_at: Timestamp,
    pub schema_version: u32,
}

/// `{out}.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    resource_id: u64,
    group_id: u64,
    subgroup_id: Option<u64>,
    url: &'a str,
    original_url: &'a str,
    title: &'a str,
    description: &'a str,
    subjects: String,
    collector: &'a str,
    creator: &'a str,
    publisher: &'a str,
    language: &'a str,
    format: &'a str,
    resource_type: &'a str,
    media_type: &'static str,
    source: &'static str,
    tags: String,
    comment_count: usize,
    capture_count: usize,
    first_capture: String,
    last_capture: String,
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> ExportError + '_ {
    move |source| ExportError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Writes every resource of `group` to `out` plus a manifest beside it and
/// records the export in the activity log.
pub fn export_group(
    store: &Store,
    group: GroupId,
    format: ExportFormat,
    out: &Path,
    actor: UserId,
) -> Result<ExportManifest, ExportError> {
    let resources = store.resources_in_group(group)?;
    let views = resources
        .iter()
        .map(|r| store.resource_view(r.id))
        .collect::<Result<Vec<_>, _>>()?;
    let capture_count = views.iter().map(|v| v.captures.len()).sum();

    let file = File::create(out).map_err(io_err(out))?;
    let mut w = BufWriter::new(file);
    match format {
        ExportFormat::Jsonl => {
            for view in &views {
                serde_json::to_writer(&mut w, view).map_err(|e| io_err(out)(e.into()))?;
                w.write_all(b"\n").map_err(io_err(out))?;
            }
        }
        ExportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            for v in &views {
                let r = &v.resource;
                let span = capture_span(&v.captures);
                let ts = |t: Option<Timestamp>| t.map(|t| format_iso(&t)).unwrap_or_default();
                csv.serialize(CsvRow {
                    resource_id: r.id.0,
                    group_id: r.group_id.0,
                    subgroup_id: r.subgroup_id.map(|g| g.0),
                    url: &r.url,
                    original_url: &r.original_url,
                    title: &r.title,
                    description: &r.description,
                    subjects: r.subjects.join("; "),
                    collector: &r.collector,
                    creator: &r.creator,
                    publisher: &r.publisher,
                    language: &r.language,
                    format: &r.format,
                    resource_type: &r.resource_type,
                    media_type: r.media_type.as_str(),
                    source: r.source.as_str(),
                    tags: v.tags.iter().map(|t| t.tag.as_str()).collect::<Vec<_>>().join("; "),
                    comment_count: v.comments.len(),
                    capture_count: v.captures.len(),
                    first_capture: ts(span.first),
                    last_capture: ts(span.last),
                })
                .map_err(|e| io_err(out)(e.into()))?;
            }
            csv.flush().map_err(io_err(out))?;
        }
    }
    w.flush().map_err(io_err(out))?;
    drop(w);

    let manifest = ExportManifest {
        group_id: group,
        format,
        resource_count: views.len(),
        capture_count,
        generated_at: store.now(),
        schema_version: EXPORT_SCHEMA_VERSION,
    };
    let mpath = manifest_path(out);
    let body = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    fs::write(&mpath, body).map_err(io_err(&mpath))?;

    let mut info = BTreeMap::new();
    info.insert("format".to_owned(), format.as_str().to_owned());
    info.insert("resource_count".to_owned(), manifest.resource_count.to_string());
    info.insert("capture_count".to_owned(), capture_count.to_string());
    info.insert("out".to_owned(), out.display().to_string());
    store.log_export(group, actor, info)?;
    Ok(manifest)
}

pub fn read_jsonl_export(path: &Path) -> Result<Vec<ResourceView>, ExportError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ExportError::Format {
            path: path.to_owned(),
            line: n + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Lays out exported resources as a one-collection fixture corpus under
/// `dir`, so the ingestion pipeline can read them back. Captures become
/// TimeMaps; tags and comments have no place in the corpus and are dropped.
pub fn write_fixture_corpus(
    views: &[ResourceView],
    collection: &CollectionSourceRecord,
    dir: &Path,
) -> Result<(), ExportError> {
    for sub in ["seeds", "timemaps"] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(io_err(&p))?;
    }
    let cpath = dir.join("collections.jsonl");
    let mut line = serde_json::to_string(collection).expect("record serializes");
    line.push('\n');
    fs::write(&cpath, line).map_err(io_err(&cpath))?;

    let spath = dir.join("seeds").join(format!("{}.jsonl", collection.external_id));
    let mut seeds = String::new();
    for v in views {
        let r = &v.resource;
        let seed = SeedSourceRecord {
            url: r.original_url.clone(),
            title: r.title.clone(),
            description: r.description.clone(),
            subjects: r.subjects.clone(),
            collector: r.collector.clone(),
            creator: r.creator.clone(),
            publisher: r.publisher.clone(),
            language: r.language.clone(),
            format: r.format.clone(),
            resource_type: r.resource_type.clone(),
        };
        seeds.push_str(&serde_json::to_string(&seed).expect("record serializes"));
        seeds.push('\n');
        if v.captures.is_empty() {
            continue;
        }
        let doc = TimeMapDocument {
            mementos: v
                .captures
                .iter()
                .map(|c| MementoEntry {
                    uri: c.capture_uri.clone(),
                    datetime: c.capture_datetime,
                    rel_markers: [RelMarker::Memento].into(),
                })
                .collect(),
            ..TimeMapDocument::empty(&r.original_url)
        };
        let tpath = dir.join("timemaps").join(format!("{}.link", urlsafe(&r.original_url)));
        fs::write(&tpath, doc.to_link_format()).map_err(io_err(&tpath))?;
    }
    fs::write(&spath, seeds).map_err(io_err(&spath))?;
    Ok(())
}
