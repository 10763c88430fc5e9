//! Deterministic synthetic fixture corpora.
//!
//! The generated corpus mirrors the published shape of the source service:
//! about 200 collections, a human-rights collection with 711 seeds, and a
//! women-artists collection whose `http://jodi.org/` seed has 1418 captures
//! between 2009-04-16 and 2016-03-31.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use chrono::Duration;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use crate::clock::{format_timestamp14, utc, Timestamp};
use crate::ingest::{urlsafe, CollectionSourceRecord, SeedSourceRecord};
use crate::memento::{MementoEntry, RelMarker, TimeMapDocument};

pub const HRWA_ID: &str = "1068";
pub const HRWA_SEEDS: usize = 711;
pub const WOMEN_ARTISTS_ID: &str = "2973";
pub const JODI_URL: &str = "http://jodi.org/";
pub const JODI_CAPTURES: usize = 1418;
pub const TIBET_URL: &str = "http://www.tibetinfonet.net/";

pub fn jodi_first() -> Timestamp {
    utc(2009, 4, 16, 10, 12, 3)
}

pub fn jodi_last() -> Timestamp {
    utc(2016, 3, 31, 21, 40, 11)
}

fn memento_uri(collection: &str, at: Timestamp, url: &str) -> String {
    format!(
        "https://wayback.archive-it.org/{collection}/{}/{url}",
        format_timestamp14(&at)
    )
}

/// Builds a TimeMap from ascending capture times, marking first and last.
pub fn timemap_for(collection: &str, url: &str, times: &[Timestamp]) -> TimeMapDocument {
    let n = times.len();
    let mementos = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut rel_markers: BTreeSet<RelMarker> = [RelMarker::Memento].into();
            if i == 0 {
                rel_markers.insert(RelMarker::First);
            }
            if i + 1 == n {
                rel_markers.insert(RelMarker::Last);
            }
            MementoEntry {
                uri: memento_uri(collection, t, url),
                datetime: t,
                rel_markers,
            }
        })
        .collect();
    TimeMapDocument {
        original_uri: url.to_owned(),
        timegate_uri: Some(format!("https://wayback.archive-it.org/{collection}/{url}")),
        self_uri: Some(format!(
            "https://wayback.archive-it.org/{collection}/timemap/link/{url}"
        )),
        mementos,
    }
}

/// 1418 capture times spread evenly over the jodi.org span.
pub fn jodi_capture_times() -> Vec<Timestamp> {
    let (first, last) = (jodi_first(), jodi_last());
    let span = (last - first).num_seconds();
    let steps = (JODI_CAPTURES - 1) as i64;
    (0..JODI_CAPTURES as i64)
        .map(|i| first + Duration::seconds(span * i / steps))
        .collect()
}

pub fn jodi_timemap() -> TimeMapDocument {
    timemap_for(WOMEN_ARTISTS_ID, JODI_URL, &jodi_capture_times())
}

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub rng_seed: u64,
    pub collections: usize,
    pub include_hrwa: bool,
    pub include_women_artists: bool,
    /// Seeds per ordinary collection are drawn from `0..=max_seeds`.
    pub max_seeds: usize,
    pub max_captures: usize,
    /// No generated capture is later than this.
    pub latest_capture: Timestamp,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            rng_seed: 2016,
            collections: 200,
            include_hrwa: true,
            include_women_artists: true,
            max_seeds: 12,
            max_captures: 8,
            latest_capture: utc(2016, 6, 30, 0, 0, 0),
        }
    }
}

impl CorpusSpec {
    pub fn small(collections: usize) -> Self {
        Self {
            collections,
            include_hrwa: false,
            include_women_artists: false,
            max_seeds: 5,
            max_captures: 4,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusSummary {
    pub collection_ids: Vec<String>,
    /// Seed count per collection.
    pub seeds: BTreeMap<String, usize>,
    /// Capture count per collection.
    pub captures: BTreeMap<String, usize>,
}

impl CorpusSummary {
    pub fn total_seeds(&self) -> usize {
        self.seeds.values().sum()
    }

    pub fn total_captures(&self) -> usize {
        self.captures.values().sum()
    }
}

const TOPICS: &[&str] = &[
    "Human rights", "Tibet", "Women artists", "New media art", "Environment", "Elections",
    "Public health", "Refugees", "Climate change", "Labor", "Education", "Indigenous peoples",
];
const INSTITUTIONS: &[&str] = &[
    "Columbia University Libraries", "National Museum of Women in the Arts",
    "University of Toronto", "Stanford University Libraries", "Library of Congress",
];
const LANGUAGES: &[&str] = &["English", "French", "Spanish", "German", "Tibetan", "Arabic"];
const TYPES: &[&str] = &["", "webpage", "video", "image", "file"];

struct Writer<'a> {
    root: &'a Path,
    rng: StdRng,
    earliest: Timestamp,
    latest: Timestamp,
    summary: CorpusSummary,
    collections: Vec<CollectionSourceRecord>,
}

impl Writer<'_> {
    fn pick<'s>(&mut self, items: &[&'s str]) -> &'s str {
        items[self.rng.random_range(0..items.len())]
    }

    fn random_times(&mut self, n: usize) -> Vec<Timestamp> {
        let span = (self.latest - self.earliest).num_seconds();
        let mut times: Vec<Timestamp> = (0..n)
            .map(|_| self.earliest + Duration::seconds(self.rng.random_range(0..=span)))
            .collect();
        times.sort();
        times.dedup();
        times
    }

    fn write_timemap(&self, collection: &str, url: &str, times: &[Timestamp]) -> io::Result<()> {
        if times.is_empty() {
            return Ok(());
        }
        let doc = timemap_for(collection, url, times);
        fs::write(
            self.root.join("timemaps").join(format!("{}.link", urlsafe(url))),
            doc.to_link_format(),
        )
    }

    fn seed(&mut self, collection: &str, n: usize, topic: &str) -> SeedSourceRecord {
        let url = format!("http://www.c{collection}-site{n}.org/");
        let language = self.pick(LANGUAGES).to_owned();
        let resource_type = self.pick(TYPES).to_owned();
        SeedSourceRecord {
            title: format!("{topic} site {n} of collection {collection}"),
            description: format!(
                "Website archived for the {} collection on {}.",
                topic.to_lowercase(),
                self.pick(TOPICS).to_lowercase()
            ),
            subjects: vec![topic.to_owned(), self.pick(TOPICS).to_owned()],
            collector: self.pick(INSTITUTIONS).to_owned(),
            creator: format!("Organization {}", self.rng.random_range(1..400)),
            publisher: String::new(),
            language,
            format: "text/html".into(),
            resource_type,
            url,
        }
    }

    /// Some seeds carry no title, language or subjects and rely on their
    /// HTML page instead.
    fn strip_for_fallback(&mut self, seed: &mut SeedSourceRecord) -> io::Result<()> {
        let page = format!(
            "<!DOCTYPE html><html lang=\"en\"><head><title>{}</title>\
             <meta name=\"keywords\" content=\"{}\"></head><body></body></html>",
            seed.title,
            seed.subjects.join(", ")
        );
        fs::write(
            self.root.join("pages").join(format!("{}.html", urlsafe(&seed.url))),
            page,
        )?;
        seed.title.clear();
        seed.language.clear();
        seed.subjects.clear();
        Ok(())
    }

    fn write_collection(
        &mut self,
        record: CollectionSourceRecord,
        seeds: Vec<(SeedSourceRecord, Vec<Timestamp>)>,
    ) -> io::Result<()> {
        let id = record.external_id.clone();
        let mut lines = String::new();
        let mut captures = 0;
        for (seed, times) in &seeds {
            lines.push_str(&serde_json::to_string(seed).expect("seed serializes"));
            lines.push('\n');
            self.write_timemap(&id, &seed.url, times)?;
            captures += times.len();
        }
        fs::write(self.root.join("seeds").join(format!("{id}.jsonl")), lines)?;
        self.summary.collection_ids.push(id.clone());
        self.summary.seeds.insert(id.clone(), seeds.len());
        self.summary.captures.insert(id, captures);
        self.collections.push(record);
        Ok(())
    }

    fn ordinary(&mut self, id: String, seeds: usize, max_captures: usize) -> io::Result<()> {
        let topic = self.pick(TOPICS);
        let record = CollectionSourceRecord {
            title: format!("{topic} collection {id}"),
            institution: self.pick(INSTITUTIONS).to_owned(),
            description: format!("Websites about {}.", topic.to_lowercase()),
            subjects: vec![topic.to_owned()],
            collectors: vec![self.pick(INSTITUTIONS).to_owned()],
            portal_link: format!("https://archive-it.org/collections/{id}"),
            external_id: id.clone(),
        };
        let mut list = Vec::with_capacity(seeds);
        for n in 0..seeds {
            let mut seed = self.seed(&id, n, topic);
            if self.rng.random_bool(0.1) {
                self.strip_for_fallback(&mut seed)?;
            }
            let k = self.rng.random_range(0..=max_captures);
            let times = self.random_times(k);
            list.push((seed, times));
        }
        self.write_collection(record, list)
    }

    fn hrwa(&mut self) -> io::Result<()> {
        let record = CollectionSourceRecord {
            external_id: HRWA_ID.into(),
            title: "Human Rights Web Archive".into(),
            institution: "Columbia University Libraries".into(),
            description: "Archived websites related to human rights created by non-governmental \
                          organizations, national human rights institutions, tribunals and individuals."
                .into(),
            subjects: vec!["Human rights".into()],
            collectors: vec!["Columbia University Libraries".into()],
            portal_link: format!("https://archive-it.org/collections/{HRWA_ID}"),
        };
        let mut list = Vec::with_capacity(HRWA_SEEDS);
        let tibet = SeedSourceRecord {
            url: TIBET_URL.into(),
            title: "TibetInfoNet".into(),
            description: "Monitored the situation in Tibet.".into(),
            subjects: vec!["Human rights".into(), "Tibet".into()],
            collector: "Columbia University Libraries".into(),
            language: "English".into(),
            format: "text/html".into(),
            ..SeedSourceRecord::default()
        };
        let tibet_times = vec![
            utc(2008, 5, 1, 0, 0, 0),
            utc(2010, 2, 14, 8, 30, 0),
            utc(2012, 11, 3, 17, 5, 0),
            utc(2015, 7, 31, 0, 0, 0),
        ];
        list.push((tibet, tibet_times));
        for n in 1..HRWA_SEEDS {
            let mut seed = self.seed(HRWA_ID, n, "Human rights");
            seed.title = format!("Human rights organization {n}");
            if self.rng.random_bool(0.05) {
                self.strip_for_fallback(&mut seed)?;
            }
            let k = self.rng.random_range(0..=6);
            let times = self.random_times(k);
            list.push((seed, times));
        }
        self.write_collection(record, list)
    }

    fn women_artists(&mut self) -> io::Result<()> {
        let record = CollectionSourceRecord {
            external_id: WOMEN_ARTISTS_ID.into(),
            title: "Contemporary Women Artists on the Web".into(),
            institution: "National Museum of Women in the Arts".into(),
            description: "Websites of women artists working in conceptual or new media art, \
                          artist profiles and women artist organizations."
                .into(),
            subjects: vec!["Women artists".into(), "New media art".into()],
            collectors: vec!["National Museum of Women in the Arts".into()],
            portal_link: format!("https://archive-it.org/collections/{WOMEN_ARTISTS_ID}"),
        };
        let jodi = SeedSourceRecord {
            url: JODI_URL.into(),
            title: "JODI".into(),
            description: "Art collective of Joan Heemskerk and Dirk Paesmans.".into(),
            subjects: vec!["New media art".into(), "Net art".into()],
            collector: "National Museum of Women in the Arts".into(),
            creator: "Joan Heemskerk; Dirk Paesmans".into(),
            language: "English".into(),
            format: "text/html".into(),
            ..SeedSourceRecord::default()
        };
        let mut list = vec![(jodi, jodi_capture_times())];
        for n in 1..20 {
            let seed = self.seed(WOMEN_ARTISTS_ID, n, "Women artists");
            let k = self.rng.random_range(0..=4);
            let times = self.random_times(k);
            list.push((seed, times));
        }
        self.write_collection(record, list)
    }
}

/// Writes the corpus layout read by the fixture adapter under `root`.
pub fn write_corpus(root: &Path, spec: &CorpusSpec) -> io::Result<CorpusSummary> {
    for sub in ["seeds", "timemaps", "pages"] {
        fs::create_dir_all(root.join(sub))?;
    }
    let mut w = Writer {
        root,
        rng: StdRng::seed_from_u64(spec.rng_seed),
        earliest: utc(2006, 1, 1, 0, 0, 0),
        latest: spec.latest_capture,
        summary: CorpusSummary::default(),
        collections: Vec::new(),
    };
    let mut remaining = spec.collections;
    if spec.include_hrwa && remaining > 0 {
        w.hrwa()?;
        remaining -= 1;
    }
    if spec.include_women_artists && remaining > 0 {
        w.women_artists()?;
        remaining -= 1;
    }
    for i in 0..remaining {
        let seeds = w.rng.random_range(0..=spec.max_seeds);
        w.ordinary((3000 + i).to_string(), seeds, spec.max_captures)?;
    }
    write_collections(root, &w.collections)?;
    Ok(w.summary)
}

fn write_collections(root: &Path, records: &[CollectionSourceRecord]) -> io::Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    fs::write(root.join("collections.jsonl"), out)
}

/// Turns an existing corpus into its next revision: `collection` gains
/// `new_seeds` seeds without captures and `new_captures` captures spread over
/// its existing seeds, each later than anything already there and no later
/// than `at`.
pub fn extend_collection(
    root: &Path,
    collection: &str,
    new_seeds: usize,
    new_captures: usize,
    at: Timestamp,
) -> io::Result<()> {
    let seeds_path = root.join("seeds").join(format!("{collection}.jsonl"));
    let text = fs::read_to_string(&seeds_path)?;
    let seeds: Vec<SeedSourceRecord> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(io::Error::other))
        .collect::<Result<_, _>>()?;
    if new_captures > 0 && seeds.is_empty() {
        return Err(io::Error::other("no seeds to attach new captures to"));
    }
    for k in 0..new_captures {
        let seed = &seeds[k % seeds.len()];
        let path = root.join("timemaps").join(format!("{}.link", urlsafe(&seed.url)));
        let mut times: Vec<Timestamp> = match fs::read(&path) {
            Ok(body) => crate::memento::parse_timemap(&body, crate::memento::LINK_FORMAT)
                .map_err(io::Error::other)?
                .mementos
                .into_iter()
                .map(|m| m.datetime)
                .collect(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e),
        };
        times.push(at - Duration::seconds(k as i64));
        times.sort();
        times.dedup();
        fs::write(&path, timemap_for(collection, &seed.url, &times).to_link_format())?;
    }
    let mut out = text.trim_end().to_owned();
    if !out.is_empty() {
        out.push('\n');
    }
    for n in 0..new_seeds {
        let seed = SeedSourceRecord {
            url: format!("http://www.c{collection}-added{n}.org/"),
            title: format!("Added site {n}"),
            format: "text/html".into(),
            ..SeedSourceRecord::default()
        };
        out.push_str(&serde_json::to_string(&seed).expect("seed serializes"));
        out.push('\n');
    }
    fs::write(seeds_path, out)
}
