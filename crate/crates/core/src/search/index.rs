//! Inverted index, ranking and facet counting.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::sync::{Arc, RwLock};

use super::document::{Facet, Field, IndexDocument};
use super::query::{FacetCounts, QuerySpec, ResultSource, SearchPage, SearchResult, Snippet, Visibility};
use super::tokenize::{query_terms, tokenize, tokenize_with_offsets};
use super::SearchError;
use crate::domain::ResourceId;

pub const INDEX_VERSION: u32 = 1;
pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;

const SNIPPET_BYTES: usize = 240;

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub doc: IndexDocument,
    /// Term frequency per field, in `Field::ALL` order.
    tf: HashMap<String, [u32; 5]>,
    /// Weighted document length.
    dl: u64,
}

impl Entry {
    fn new(doc: IndexDocument) -> Self {
        let mut tf: HashMap<String, [u32; 5]> = HashMap::new();
        let mut dl = 0u64;
        for (i, field) in Field::ALL.into_iter().enumerate() {
            let tokens = tokenize(&doc.field_text(field));
            dl += u64::from(field.weight()) * tokens.len() as u64;
            for t in tokens {
                tf.entry(t).or_default()[i] += 1;
            }
        }
        Self { doc, tf, dl }
    }

    fn weighted_tf(&self, term: &str) -> f64 {
        self.tf.get(term).map_or(0.0, |counts| {
            Field::ALL
                .iter()
                .zip(counts)
                .map(|(f, c)| f64::from(f.weight() * c))
                .sum()
        })
    }
}

#[derive(Debug, Clone, Default)]
struct Snapshot {
    docs: HashMap<ResourceId, Arc<Entry>>,
    postings: HashMap<String, BTreeSet<ResourceId>>,
    total_dl: u64,
}

impl Snapshot {
    fn remove(&mut self, id: ResourceId) {
        if let Some(old) = self.docs.remove(&id) {
            self.total_dl -= old.dl;
            for term in old.tf.keys() {
                if let Some(set) = self.postings.get_mut(term) {
                    set.remove(&id);
                    if set.is_empty() {
                        self.postings.remove(term);
                    }
                }
            }
        }
    }

    fn insert(&mut self, doc: IndexDocument) {
        let id = doc.resource_id;
        self.remove(id);
        let entry = Entry::new(doc);
        self.total_dl += entry.dl;
        for term in entry.tf.keys() {
            self.postings.entry(term.clone()).or_default().insert(id);
        }
        self.docs.insert(id, Arc::new(entry));
    }

    fn idf(&self, term: &str) -> f64 {
        let n = self.docs.len() as f64;
        let df = self.postings.get(term).map_or(0, BTreeSet::len) as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn avgdl(&self) -> f64 {
        if self.docs.is_empty() {
            0.0
        } else {
            self.total_dl as f64 / self.docs.len() as f64
        }
    }
}

fn passes(doc: &IndexDocument, filters: &BTreeMap<Facet, String>, skip: Option<Facet>) -> bool {
    filters
        .iter()
        .filter(|(f, _)| Some(**f) != skip)
        .all(|(f, v)| doc.facet_values(*f).iter().any(|x| x == v))
}

/// A scored archive candidate.
#[derive(Debug, Clone)]
pub(crate) struct Hit {
    pub entry: Arc<Entry>,
    pub score: f64,
    pub components: Vec<(String, f64)>,
}

/// In-memory index. Queries run against an immutable snapshot; writers build
/// a new snapshot and swap it in.
#[derive(Debug, Default)]
pub struct SearchIndex {
    current: RwLock<Arc<Snapshot>>,
}

impl SearchIndex {
    pub fn new() -> Self {
        Self::default()
    }

    fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("index lock poisoned").clone()
    }

    /// Applies a batch of upserts and removals as one swap.
    pub fn apply(&self, upserts: Vec<IndexDocument>, removals: &[ResourceId]) {
        if upserts.is_empty() && removals.is_empty() {
            return;
        }
        let mut guard = self.current.write().expect("index lock poisoned");
        let mut next = Snapshot::clone(&guard);
        for id in removals {
            next.remove(*id);
        }
        for doc in upserts {
            next.insert(doc);
        }
        *guard = Arc::new(next);
    }

    pub fn index_resource(&self, doc: IndexDocument) {
        self.apply(vec![doc], &[]);
    }

    /// Idempotent.
    pub fn deindex_resource(&self, id: ResourceId) {
        self.apply(Vec::new(), &[id]);
    }

    /// Replaces the whole index contents.
    pub fn replace_all(&self, docs: Vec<IndexDocument>) {
        let mut next = Snapshot::default();
        for doc in docs {
            next.insert(doc);
        }
        *self.current.write().expect("index lock poisoned") = Arc::new(next);
    }

    pub fn len(&self) -> usize {
        self.snapshot().docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn document(&self, id: ResourceId) -> Option<IndexDocument> {
        self.snapshot().docs.get(&id).map(|e| e.doc.clone())
    }

    pub fn documents(&self) -> Vec<IndexDocument> {
        let snap = self.snapshot();
        let mut docs: Vec<_> = snap.docs.values().map(|e| e.doc.clone()).collect();
        docs.sort_by_key(|d| d.resource_id);
        docs
    }

    /// Every visible document passing the filters and matching at least one
    /// term, ranked. An empty term list matches everything, unscored.
    pub(crate) fn ranked(&self, q: &QuerySpec, visibility: &Visibility) -> Result<(Vec<Hit>, FacetCounts), SearchError> {
        q.validate()?;
        let snap = self.snapshot();
        let terms = query_terms(&q.terms);
        let filters = q.effective_filters();

        let matched: Vec<&Arc<Entry>> = if terms.is_empty() {
            snap.docs.values().collect()
        } else {
            let mut ids = BTreeSet::new();
            for t in &terms {
                if let Some(set) = snap.postings.get(t) {
                    ids.extend(set.iter().copied());
                }
            }
            ids.iter().map(|id| &snap.docs[id]).collect()
        };
        let matched: Vec<&Arc<Entry>> = matched
            .into_iter()
            .filter(|e| visibility.allows(e.doc.public, e.doc.group_id))
            .collect();

        let mut counts: FacetCounts = BTreeMap::new();
        for facet in Facet::ALL {
            let mut by_value: BTreeMap<String, usize> = BTreeMap::new();
            for e in &matched {
                if !passes(&e.doc, &filters, Some(facet)) {
                    continue;
                }
                let values: BTreeSet<&String> = e.doc.facet_values(facet).iter().collect();
                for v in values {
                    *by_value.entry(v.clone()).or_default() += 1;
                }
            }
            if !by_value.is_empty() {
                counts.insert(facet, by_value);
            }
        }

        let avgdl = snap.avgdl();
        let idfs: Vec<f64> = terms.iter().map(|t| snap.idf(t)).collect();
        let mut hits: Vec<Hit> = matched
            .into_iter()
            .filter(|e| passes(&e.doc, &filters, None))
            .map(|e| {
                let norm = if avgdl > 0.0 {
                    1.0 - B + B * e.dl as f64 / avgdl
                } else {
                    1.0
                };
                let mut components = Vec::new();
                let mut score = 0.0;
                for (t, idf) in terms.iter().zip(&idfs) {
                    let tf = e.weighted_tf(t);
                    if tf > 0.0 {
                        let part = idf * tf * (K1 + 1.0) / (tf + K1 * norm);
                        score += part;
                        components.push((t.clone(), part));
                    }
                }
                Hit {
                    entry: Arc::clone(e),
                    score,
                    components,
                }
            })
            .collect();
        hits.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(Ordering::Equal)
                .then_with(|| match (a.entry.doc.latest_capture_at(), b.entry.doc.latest_capture_at()) {
                    (Some(x), Some(y)) => y.cmp(&x),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => Ordering::Equal,
                })
                .then_with(|| a.entry.doc.resource_id.cmp(&b.entry.doc.resource_id))
        });
        Ok((hits, counts))
    }

    pub fn execute_search(&self, q: &QuerySpec, visibility: &Visibility) -> Result<SearchPage, SearchError> {
        let (hits, facet_counts) = self.ranked(q, visibility)?;
        let terms = query_terms(&q.terms);
        let total = hits.len();
        let results = hits
            .into_iter()
            .skip(q.offset())
            .take(q.page_size)
            .map(|h| archive_result(h, &terms))
            .collect();
        Ok(SearchPage {
            results,
            facet_counts,
            total,
            page: q.page,
            page_size: q.page_size,
            live_unavailable: false,
            warnings: Vec::new(),
        })
    }

    pub fn facet_counts(&self, q: &QuerySpec, visibility: &Visibility) -> Result<FacetCounts, SearchError> {
        Ok(self.ranked(q, visibility)?.1)
    }

    /// Writes the documents and a version marker to `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), SearchError> {
        let io = |e: std::io::Error| SearchError::Storage(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let docs = serde_json::to_vec(&self.documents())
            .map_err(|e| SearchError::Storage(e.to_string()))?;
        let tmp = dir.join("documents.json.tmp");
        fs::write(&tmp, docs).map_err(io)?;
        fs::rename(&tmp, dir.join("documents.json")).map_err(io)?;
        fs::write(dir.join("VERSION"), INDEX_VERSION.to_string()).map_err(io)?;
        Ok(())
    }

    /// Loads an index written by [`SearchIndex::save`]. A missing or different
    /// version marker is an error; callers rebuild from the store.
    pub fn load(dir: &Path) -> Result<Self, SearchError> {
        let version = fs::read_to_string(dir.join("VERSION"))
            .map_err(|e| SearchError::Storage(format!("{}: {e}", dir.display())))?;
        if version.trim() != INDEX_VERSION.to_string() {
            return Err(SearchError::Storage(format!(
                "index version {} does not match {INDEX_VERSION}",
                version.trim()
            )));
        }
        let bytes = fs::read(dir.join("documents.json"))
            .map_err(|e| SearchError::Storage(format!("{}: {e}", dir.display())))?;
        let docs: Vec<IndexDocument> =
            serde_json::from_slice(&bytes).map_err(|e| SearchError::Storage(e.to_string()))?;
        let index = SearchIndex::new();
        index.replace_all(docs);
        Ok(index)
    }
}

pub(crate) fn archive_result(hit: Hit, terms: &[String]) -> SearchResult {
    let doc = &hit.entry.doc;
    SearchResult {
        source: ResultSource::Archive {
            resource_id: doc.resource_id,
            group_id: doc.group_id,
            subgroup_id: doc.subgroup_id,
            url: doc.url.clone(),
            title: doc.title.clone(),
            captures: doc.captures,
        },
        score: hit.score,
        score_components: hit.components,
        snippet: snippet(doc, terms),
    }
}

fn floor_boundary(s: &str, mut i: usize) -> usize {
    while i > 0 && !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

/// The first field containing a query term, windowed around the first match.
fn snippet(doc: &IndexDocument, terms: &[String]) -> Option<Snippet> {
    if terms.is_empty() {
        return None;
    }
    for field in Field::ALL {
        let text = doc.field_text(field);
        let matches: Vec<(usize, usize)> = tokenize_with_offsets(&text)
            .into_iter()
            .filter(|(t, _, _)| terms.contains(t))
            .map(|(_, s, e)| (s, e))
            .collect();
        let Some(&(first, _)) = matches.first() else {
            continue;
        };
        let start = if text.len() <= SNIPPET_BYTES {
            0
        } else {
            floor_boundary(&text, first.saturating_sub(SNIPPET_BYTES / 4))
        };
        let end = floor_boundary(&text, (start + SNIPPET_BYTES).min(text.len()));
        let highlights = matches
            .into_iter()
            .filter(|&(s, e)| s >= start && e <= end)
            .map(|(s, e)| (s - start, e - start))
            .collect();
        return Some(Snippet {
            field: field.as_str().to_owned(),
            text: text[start..end].to_owned(),
            highlights,
        });
    }
    None
}
