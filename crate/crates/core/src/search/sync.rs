//! Keeping the index in step with the store.

use std::collections::BTreeMap;

use super::document::{Facet, IndexDocument};
use super::index::SearchIndex;
use crate::domain::{DomainError, IndexEvent, ResourceId, Store};
use crate::memento::CaptureSpan;

/// Builds the index document for a resource, or `None` if it no longer exists.
pub fn document_for(store: &Store, id: ResourceId) -> Result<Option<IndexDocument>, DomainError> {
    let view = match store.resource_view(id) {
        Ok(v) => v,
        Err(DomainError::UnknownResource(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let r = &view.resource;
    let group = store.group(r.group_id)?;

    let mut facets: BTreeMap<Facet, Vec<String>> = BTreeMap::new();
    let mut put = |facet: Facet, value: &str| {
        let value = facet.normalize_value(value);
        if !value.is_empty() {
            let slot = facets.entry(facet).or_default();
            if !slot.contains(&value) {
                slot.push(value);
            }
        }
    };
    put(Facet::Group, &r.group_id.to_string());
    if let Some(sub) = r.subgroup_id {
        put(Facet::Group, &sub.to_string());
    }
    if r.collector.trim().is_empty() {
        for c in &group.collectors {
            put(Facet::Collector, c);
        }
    } else {
        put(Facet::Collector, &r.collector);
    }
    put(Facet::Creator, &r.creator);
    put(Facet::Language, &r.language);
    put(Facet::MediaType, r.media_type.as_str());
    for t in &view.tags {
        put(Facet::Tag, &t.tag);
    }
    put(Facet::SourceService, r.source.as_str());

    Ok(Some(IndexDocument {
        resource_id: r.id,
        group_id: r.group_id,
        subgroup_id: r.subgroup_id,
        url: r.url.clone(),
        title: r.title.clone(),
        description: r.description.clone(),
        subjects: r.subjects.clone(),
        comments_text: view.comments.iter().map(|c| c.text.clone()).collect(),
        tags: view.tags.iter().map(|t| t.tag.clone()).collect(),
        facets,
        captures: CaptureSpan::of(view.captures.iter().map(|c| c.capture_datetime)),
        public: group.public,
    }))
}

/// Applies pending store events to the index in one batch. Returns the number
/// of events consumed.
pub fn sync_index(store: &Store, index: &SearchIndex) -> Result<usize, DomainError> {
    let events = store.drain_index_events();
    let mut latest: BTreeMap<ResourceId, bool> = BTreeMap::new();
    for e in &events {
        match e {
            IndexEvent::Upsert(id) => latest.insert(*id, true),
            IndexEvent::Remove(id) => latest.insert(*id, false),
        };
    }
    let mut upserts = Vec::new();
    let mut removals = Vec::new();
    for (id, upsert) in latest {
        match upsert.then(|| document_for(store, id)).transpose()?.flatten() {
            Some(doc) => upserts.push(doc),
            None => removals.push(id),
        }
    }
    index.apply(upserts, &removals);
    Ok(events.len())
}

/// Rebuilds the whole index from the store, which is authoritative.
pub fn rebuild_index(store: &Store, index: &SearchIndex) -> Result<usize, DomainError> {
    store.drain_index_events();
    let mut docs = Vec::new();
    for id in store.resource_ids() {
        if let Some(doc) = document_for(store, id)? {
            docs.push(doc);
        }
    }
    let n = docs.len();
    index.replace_all(docs);
    Ok(n)
}
