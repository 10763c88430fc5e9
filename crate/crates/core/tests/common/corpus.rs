//! Random index documents over a small vocabulary so queries overlap.

use std::collections::BTreeMap;

use aw_core::clock::utc;
use aw_core::domain::{GroupId, ResourceId};
use aw_core::memento::CaptureSpan;
use aw_core::search::{Facet, IndexDocument, LiveResult, QuerySpec};
use chrono::Duration;
use rand::rngs::StdRng;
use rand::RngExt;

pub const WORDS: &[&str] = &[
    "human", "rights", "tibet", "art", "archive", "women", "jodi", "climate", "justice", "photo",
    "gallery", "news", "monthly", "report", "video", "Ünïcode", "data", "ngo",
];
pub const COLLECTORS: &[&str] = &["Columbia", "NMWA", "Toronto"];
pub const LANGS: &[&str] = &["English", "French", "Tibetan"];
pub const MEDIA: &[&str] = &["webpage", "image", "video", "file"];
pub const TAGS: &[&str] = &["photo gallery", "archive monthly", "tibet", "ngo"];

fn words(rng: &mut StdRng, max: usize) -> String {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn some<'a>(rng: &mut StdRng, pool: &[&'a str], max: usize) -> Vec<String> {
    let n = rng.random_range(0..=max);
    let mut v: Vec<String> = (0..n)
        .map(|_| pool[rng.random_range(0..pool.len())].to_owned())
        .collect();
    v.sort();
    v.dedup();
    v
}

pub fn random_doc(rng: &mut StdRng, id: u64, groups: u64) -> IndexDocument {
    let group = GroupId(rng.random_range(1..=groups));
    let collector = COLLECTORS[rng.random_range(0..COLLECTORS.len())].to_owned();
    let tags = some(rng, TAGS, 2);
    let mut facets = BTreeMap::new();
    facets.insert(Facet::Group, vec![group.to_string()]);
    facets.insert(Facet::Collector, vec![collector]);
    facets.insert(Facet::Language, vec![LANGS[rng.random_range(0..LANGS.len())].to_owned()]);
    facets.insert(Facet::MediaType, vec![MEDIA[rng.random_range(0..MEDIA.len())].to_owned()]);
    if !tags.is_empty() {
        facets.insert(Facet::Tag, tags.clone());
    }
    facets.insert(Facet::SourceService, vec!["archive_collection".to_owned()]);
    let captures = if rng.random_bool(0.2) {
        CaptureSpan::default()
    } else {
        // Few distinct days so capture ties happen.
        let last = utc(2015, 1, 1, 0, 0, 0) + Duration::days(rng.random_range(0..4));
        CaptureSpan {
            first: Some(last - Duration::days(30)),
            last: Some(last),
            count: rng.random_range(1..5),
        }
    };
    IndexDocument {
        resource_id: ResourceId(id),
        group_id: group,
        subgroup_id: None,
        url: format!("http://site{id}.example.org/"),
        title: words(rng, 4),
        description: words(rng, 10),
        subjects: some(rng, WORDS, 3),
        comments_text: (0..rng.random_range(0..3)).map(|_| words(rng, 5)).collect(),
        tags,
        facets,
        captures,
        public: rng.random_bool(0.7),
    }
}

pub fn random_corpus(rng: &mut StdRng, n: usize, groups: u64) -> Vec<IndexDocument> {
    (1..=n as u64).map(|id| random_doc(rng, id, groups)).collect()
}

pub fn random_query(rng: &mut StdRng, groups: u64) -> QuerySpec {
    let mut q = QuerySpec::new(&words(rng, 3));
    if rng.random_bool(0.3) {
        q = q.filter(Facet::Collector, COLLECTORS[rng.random_range(0..COLLECTORS.len())]);
    }
    if rng.random_bool(0.2) {
        q = q.filter(Facet::Group, &rng.random_range(1..=groups).to_string());
    }
    if rng.random_bool(0.2) {
        q = q.filter(Facet::Tag, TAGS[rng.random_range(0..TAGS.len())]);
    }
    if rng.random_bool(0.2) {
        q.media_type = aw_core::domain::MediaType::parse(MEDIA[rng.random_range(0..MEDIA.len())]);
    }
    q
}

/// Live results that partly collide with indexed urls, with spelling
/// variants the normalizer folds together.
pub fn random_live(rng: &mut StdRng, corpus_size: u64) -> Vec<LiveResult> {
    (0..rng.random_range(0..12))
        .map(|_| {
            let url = match rng.random_range(0..3) {
                0 => format!("http://SITE{}.example.org:80/", rng.random_range(1..=corpus_size.max(1))),
                1 => format!("http://site{}.example.org/#top", rng.random_range(1..=corpus_size.max(1))),
                _ => format!("http://live{}.example.net/", rng.random_range(0..6)),
            };
            LiveResult {
                title: url.clone(),
                snippet: "live result".into(),
                url,
            }
        })
        .collect()
}
