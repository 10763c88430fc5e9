//! Brute-force reference implementations used to check the index.

use std::collections::{BTreeMap, BTreeSet};

use aw_core::domain::ResourceId;
use aw_core::search::tokenize::query_terms;
use aw_core::search::{tokenize, Facet, FacetCounts, IndexDocument, QuerySpec, Visibility};

const K1: f64 = 1.2;
const B: f64 = 0.75;

fn fields(doc: &IndexDocument) -> [(f64, String); 5] {
    [
        (3.0, doc.title.clone()),
        (2.0, doc.tags.join(" ; ")),
        (2.0, doc.subjects.join(" ; ")),
        (1.0, doc.description.clone()),
        (1.0, doc.comments_text.join(" ; ")),
    ]
}

fn weighted_bag(doc: &IndexDocument) -> (BTreeMap<String, f64>, f64) {
    let mut bag = BTreeMap::new();
    let mut len = 0.0;
    for (w, text) in fields(doc) {
        for tok in tokenize(&text) {
            *bag.entry(tok).or_insert(0.0) += w;
            len += w;
        }
    }
    (bag, len)
}

fn filters_of(q: &QuerySpec) -> BTreeMap<Facet, String> {
    let mut f: BTreeMap<Facet, String> = q
        .filters
        .iter()
        .map(|(k, v)| (*k, k.normalize_value(v)))
        .collect();
    if let Some(m) = q.media_type {
        f.insert(Facet::MediaType, m.as_str().to_owned());
    }
    f
}

fn passes(doc: &IndexDocument, filters: &BTreeMap<Facet, String>, skip: Option<Facet>) -> bool {
    filters
        .iter()
        .filter(|(k, _)| Some(**k) != skip)
        .all(|(k, v)| doc.facet_values(*k).contains(v))
}

fn candidates<'a>(
    docs: &'a [IndexDocument],
    bags: &[(BTreeMap<String, f64>, f64)],
    terms: &[String],
    vis: &Visibility,
) -> Vec<usize> {
    (0..docs.len())
        .filter(|&i| vis.allows(docs[i].public, docs[i].group_id))
        .filter(|&i| terms.is_empty() || terms.iter().any(|t| bags[i].0.contains_key(t)))
        .collect()
}

/// Ranked `(id, score)` list: BM25 over the weighted field bag, statistics
/// taken over the whole corpus, ties by latest capture (newest first, none
/// last) then id.
pub fn rank(docs: &[IndexDocument], q: &QuerySpec, vis: &Visibility) -> Vec<(ResourceId, f64)> {
    let bags: Vec<_> = docs.iter().map(weighted_bag).collect();
    let terms = query_terms(&q.terms);
    let n = docs.len() as f64;
    let avgdl = if docs.is_empty() {
        0.0
    } else {
        bags.iter().map(|b| b.1).sum::<f64>() / n
    };
    let filters = filters_of(q);
    let mut out: Vec<(usize, f64)> = candidates(docs, &bags, &terms, vis)
        .into_iter()
        .filter(|&i| passes(&docs[i], &filters, None))
        .map(|i| {
            let (bag, dl) = &bags[i];
            let mut score = 0.0;
            for t in &terms {
                let df = bags.iter().filter(|b| b.0.contains_key(t)).count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let tf = bag.get(t).copied().unwrap_or(0.0);
                if tf > 0.0 {
                    let norm = if avgdl > 0.0 { 1.0 - B + B * dl / avgdl } else { 1.0 };
                    score += idf * tf * (K1 + 1.0) / (tf + K1 * norm);
                }
            }
            (i, score)
        })
        .collect();
    out.sort_by(|&(a, sa), &(b, sb)| {
        sb.partial_cmp(&sa)
            .unwrap()
            .then_with(|| {
                let (la, lb) = (docs[a].captures.last, docs[b].captures.last);
                match (la, lb) {
                    (Some(x), Some(y)) => y.cmp(&x),
                    (Some(_), None) => std::cmp::Ordering::Less,
                    (None, Some(_)) => std::cmp::Ordering::Greater,
                    (None, None) => std::cmp::Ordering::Equal,
                }
            })
            .then_with(|| docs[a].resource_id.cmp(&docs[b].resource_id))
    });
    out.into_iter().map(|(i, s)| (docs[i].resource_id, s)).collect()
}

/// Per facet, counts over candidates passing every filter except that
/// facet's own.
pub fn facet_counts(docs: &[IndexDocument], q: &QuerySpec, vis: &Visibility) -> FacetCounts {
    let bags: Vec<_> = docs.iter().map(weighted_bag).collect();
    let terms = query_terms(&q.terms);
    let filters = filters_of(q);
    let cands = candidates(docs, &bags, &terms, vis);
    let mut out = FacetCounts::new();
    for facet in Facet::ALL {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for &i in &cands {
            if passes(&docs[i], &filters, Some(facet)) {
                let distinct: BTreeSet<&String> = docs[i].facet_values(facet).iter().collect();
                for v in distinct {
                    *counts.entry(v.clone()).or_default() += 1;
                }
            }
        }
        if !counts.is_empty() {
            out.insert(facet, counts);
        }
    }
    out
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
