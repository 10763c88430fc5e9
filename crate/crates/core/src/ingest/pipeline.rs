//! Full and incremental collection ingestion.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::Serialize;

use super::adapter::{CollectionSourceRecord, SeedSourceRecord, SourceAdapter};
use super::fallback::apply_html_meta_fallback;
use super::lease::LeaseTable;
use super::IngestError;
use crate::clock::Timestamp;
use crate::domain::{
    Availability, CrawlCursor, GroupId, IngestedCollection, IngestedSeed, MediaType, NewCapture,
    NewResource, Provenance, ResourceSource, Store,
};

pub const DEFAULT_PARALLELISM: usize = 4;
pub const DEFAULT_WINDOW_DAYS: u32 = 90;

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub parallelism: usize,
    pub leases: LeaseTable,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            parallelism: DEFAULT_PARALLELISM,
            leases: LeaseTable::global().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedError {
    pub url: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CollectionReport {
    pub external_id: String,
    pub group_id: Option<GroupId>,
    pub created: bool,
    pub metadata_updated: bool,
    pub seeds_seen: usize,
    pub resources_added: usize,
    pub resources_updated: usize,
    pub captures_added: usize,
    pub seed_errors: Vec<SeedError>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UpdateReport {
    pub collections: Vec<CollectionReport>,
}

impl UpdateReport {
    pub fn resources_added(&self) -> usize {
        self.collections.iter().map(|c| c.resources_added).sum()
    }

    pub fn captures_added(&self) -> usize {
        self.collections.iter().map(|c| c.captures_added).sum()
    }
}

/// External ids whose latest capture falls within the window (inclusive), plus
/// collections that have never had a capture.
pub fn select_collections_for_update(
    cursors: &[CrawlCursor],
    now: Timestamp,
    window_days: u32,
) -> Vec<String> {
    let cutoff = now - chrono::Duration::days(i64::from(window_days));
    cursors
        .iter()
        .filter(|c| c.latest_capture_at.is_none_or(|t| t >= cutoff))
        .map(|c| c.external_id.clone())
        .collect()
}

fn to_ingested(seed: SeedSourceRecord, captures: Vec<NewCapture>) -> IngestedSeed {
    let media_type = MediaType::parse(&seed.resource_type).unwrap_or(MediaType::Webpage);
    IngestedSeed {
        resource: NewResource {
            original_url: seed.url,
            subgroup_id: None,
            title: seed.title,
            description: seed.description,
            subjects: seed.subjects,
            collector: seed.collector,
            creator: seed.creator,
            publisher: seed.publisher,
            language: seed.language,
            format: seed.format,
            resource_type: seed.resource_type,
            media_type,
            source: ResourceSource::ArchiveCollection,
            availability: Availability::Unknown,
        },
        captures,
    }
}

fn harvest_seed(adapter: &dyn SourceAdapter, seed: SeedSourceRecord) -> Result<IngestedSeed, SeedError> {
    let url = seed.url.clone();
    let err = |e: IngestError| SeedError {
        url: url.clone(),
        message: e.to_string(),
    };
    // A page that cannot be fetched only means no fallback metadata.
    let page = adapter.fetch_page(&seed.url).unwrap_or(None);
    let seed = apply_html_meta_fallback(seed, page.as_deref());
    let timemap = adapter.fetch_timemap(&seed.url).map_err(err)?;
    let captures = timemap
        .mementos
        .into_iter()
        .map(|m| NewCapture {
            capture_datetime: m.datetime,
            capture_uri: m.uri,
            provenance: Provenance::IngestedArchive,
        })
        .collect();
    Ok(to_ingested(seed, captures))
}

/// Fetches seeds with up to `parallelism` workers; results keep seed order.
fn harvest(
    adapter: &dyn SourceAdapter,
    seeds: Vec<SeedSourceRecord>,
    parallelism: usize,
) -> Vec<Result<IngestedSeed, SeedError>> {
    let n = seeds.len();
    let workers = parallelism.clamp(1, n.max(1));
    let slots: Vec<Mutex<Option<SeedSourceRecord>>> =
        seeds.into_iter().map(|s| Mutex::new(Some(s))).collect();
    let results: Vec<Mutex<Option<Result<IngestedSeed, SeedError>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let seed = slots[i].lock().expect("slot poisoned").take().expect("taken once");
                let out = harvest_seed(adapter, seed);
                *results[i].lock().expect("slot poisoned") = Some(out);
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.into_inner().expect("slot poisoned").expect("every seed harvested"))
        .collect()
}

fn sync_one(
    store: &Store,
    adapter: &dyn SourceAdapter,
    record: &CollectionSourceRecord,
    options: &IngestOptions,
) -> Result<CollectionReport, IngestError> {
    let _lease = options.leases.acquire(&record.external_id)?;
    let seeds = adapter.list_seeds(&record.external_id)?;
    let seeds_seen = seeds.len();
    let mut seed_errors = Vec::new();
    let mut harvested = Vec::with_capacity(seeds.len());
    for result in harvest(adapter, seeds, options.parallelism) {
        match result {
            Ok(seed) => harvested.push(seed),
            Err(e) => seed_errors.push(e),
        }
    }
    let collection = IngestedCollection {
        external_id: record.external_id.clone(),
        title: record.title.clone(),
        institution: record.institution.clone(),
        description: record.description.clone(),
        subjects: record.subjects.clone(),
        collectors: record.collectors.clone(),
        portal_link: record.portal_link.clone(),
    };
    let delta = store.sync_ingested_collection(&collection, harvested)?;
    seed_errors.extend(
        delta
            .rejected
            .into_iter()
            .map(|(url, message)| SeedError { url, message }),
    );
    Ok(CollectionReport {
        external_id: record.external_id.clone(),
        group_id: delta.group_id,
        created: delta.created,
        metadata_updated: delta.metadata_updated,
        seeds_seen,
        resources_added: delta.resources_added,
        resources_updated: delta.resources_updated,
        captures_added: delta.captures_added,
        seed_errors,
    })
}

fn find_record(
    records: &[CollectionSourceRecord],
    external_id: &str,
) -> Result<CollectionSourceRecord, IngestError> {
    records
        .iter()
        .find(|r| r.external_id == external_id)
        .cloned()
        .ok_or_else(|| IngestError::UnknownCollection(external_id.to_owned()))
}

/// Creates or refreshes the read-only group mirroring `external_id`.
/// Re-running against unchanged source data changes nothing.
pub fn ingest_collection(
    store: &Store,
    adapter: &dyn SourceAdapter,
    external_id: &str,
    options: &IngestOptions,
) -> Result<CollectionReport, IngestError> {
    let record = find_record(&adapter.list_collections()?, external_id)?;
    sync_one(store, adapter, &record, options)
}

/// Refreshes previously ingested collections. Every id must already have a
/// group; otherwise nothing is updated.
pub fn run_incremental_update(
    store: &Store,
    adapter: &dyn SourceAdapter,
    external_ids: &[String],
    options: &IngestOptions,
) -> Result<UpdateReport, IngestError> {
    let records = adapter.list_collections()?;
    let mut selected = Vec::with_capacity(external_ids.len());
    for id in external_ids {
        if store.group_by_external_id(id).is_none() {
            return Err(IngestError::UnknownCollection(id.clone()));
        }
        selected.push(find_record(&records, id)?);
    }
    let mut report = UpdateReport::default();
    for record in &selected {
        report.collections.push(sync_one(store, adapter, record, options)?);
    }
    Ok(report)
}
