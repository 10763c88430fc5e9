use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aw_core::clock::Timestamp;
use aw_core::domain::{GroupOrigin, Store};
use aw_core::export::{manifest_path, read_jsonl_export};
use aw_core::fixtures::{extend_collection, write_corpus, CorpusSpec, HRWA_ID};
use aw_core::ingest::{run_incremental_update, urlsafe, IngestOptions, LeaseTable};
use aw_core::memento::{parse_timemap, LINK_FORMAT};
use aw_core::search::{QuerySpec, SearchIndex, Visibility};
use chrono::{Duration, Utc};
use tempfile::TempDir;

struct Env {
    dir: TempDir,
}

impl Env {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(
            dir.path().join("awctl.toml"),
            "storage_path = \"store\"\nindex_path = \"index\"\nfetch_parallelism = 4\n",
        )
        .unwrap();
        Self { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn corpus(&self, spec: &CorpusSpec) -> PathBuf {
        let root = self.path("corpus");
        write_corpus(&root, spec).unwrap();
        root
    }

    fn run(&self, args: &[&str]) -> Output {
        let config = self.path("awctl.toml");
        Command::new(env!("CARGO_BIN_EXE_awctl"))
            .arg("--config")
            .arg(&config)
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "awctl {args:?} exited {:?}: {}{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    }

    fn store(&self) -> Store {
        Store::open(self.path("store")).unwrap()
    }
}

fn code(out: &Output) -> Option<i32> {
    out.status.code()
}

fn small() -> CorpusSpec {
    CorpusSpec::small(6)
}

/// `(resources added, captures added)` per collection, read from report lines
/// such as `c0001: group 3 refreshed, 4 seeds, +1 resources, 0 updated, +2 captures, 0 seed errors`.
fn deltas(stdout: &str) -> BTreeMap<String, (usize, usize)> {
    stdout
        .lines()
        .filter(|l| l.contains(" seeds, +"))
        .map(|l| {
            let (id, rest) = l.split_once(": ").unwrap();
            let count = |suffix: &str| -> usize {
                rest.split(", ")
                    .find_map(|p| p.strip_suffix(suffix))
                    .and_then(|p| p.strip_prefix('+'))
                    .unwrap()
                    .parse()
                    .unwrap()
            };
            (id.to_owned(), (count(" resources"), count(" captures")))
        })
        .collect()
}

#[test]
fn ingest_full_corpus_creates_read_only_groups() {
    let env = Env::new();
    let corpus = env.corpus(&CorpusSpec::default());
    let out = env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    assert!(out.contains("200 collections ingested, 0 failed, 0 seed errors"), "{out}");

    let store = env.store();
    let groups = store.groups();
    assert_eq!(groups.len(), 200);
    assert!(groups.iter().all(|g| g.origin == GroupOrigin::Ingested && g.read_only));
    let hr = store.group_by_external_id(HRWA_ID).unwrap();
    assert_eq!(store.resources_in_group(hr.id).unwrap().len(), 711);
    drop(store);

    let again = env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    assert!(deltas(&again).values().all(|d| *d == (0, 0)));
}

#[test]
fn collection_filter_ingests_only_that_collection() {
    let env = Env::new();
    let corpus = env.corpus(&small());
    let ids: Vec<String> = latest_captures(&corpus).into_keys().collect();
    let pick = ids[2].as_str();
    let out = env.ok(&["ingest", "--source", corpus.to_str().unwrap(), "--collection", pick]);
    assert_eq!(deltas(&out).into_keys().collect::<Vec<_>>(), vec![pick]);
    let groups = env.store().groups();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].source_ref.as_ref().unwrap().external_id, pick);
}

#[test]
fn missing_corpus_is_an_input_error_without_state_change() {
    let env = Env::new();
    let out = env.run(&["ingest", "--source", env.path("absent").to_str().unwrap()]);
    assert_eq!(code(&out), Some(2));
    assert!(!env.path("store").exists());

    fs::create_dir(env.path("broken")).unwrap();
    fs::write(env.path("broken/collections.jsonl"), "{not json\n").unwrap();
    let out = env.run(&["ingest", "--source", env.path("broken").to_str().unwrap()]);
    assert_eq!(code(&out), Some(2));
    assert!(!env.path("store").exists());
}

#[test]
fn unknown_collection_is_not_found() {
    let env = Env::new();
    let corpus = env.corpus(&small());
    let out = env.run(&["ingest", "--source", corpus.to_str().unwrap(), "--collection", "no-such-id"]);
    assert_eq!(code(&out), Some(3));
    assert!(!env.path("store").exists());
}

#[test]
fn bad_config_is_an_input_error() {
    let env = Env::new();
    fs::write(env.path("awctl.toml"), "storage = \"x\"\n").unwrap();
    assert_eq!(code(&env.run(&["reindex"])), Some(2));
}

#[test]
fn update_with_stale_cursors_selects_nothing() {
    let env = Env::new();
    let corpus = env.corpus(&small());
    env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    let out = env.ok(&["update"]);
    let never_captured = env.store().cursors().iter().filter(|c| c.latest_capture_at.is_none()).count();
    assert!(out.starts_with(&format!("{never_captured} collections selected")), "{out}");
}

/// Latest capture per collection read straight from the fixture files.
fn latest_captures(root: &Path) -> BTreeMap<String, Option<Timestamp>> {
    let mut out = BTreeMap::new();
    for line in fs::read_to_string(root.join("collections.jsonl")).unwrap().lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        let id = rec["external_id"].as_str().unwrap().to_owned();
        let seeds = fs::read_to_string(root.join("seeds").join(format!("{id}.jsonl"))).unwrap_or_default();
        let mut latest = None;
        for seed in seeds.lines().filter(|l| !l.trim().is_empty()) {
            let url = serde_json::from_str::<serde_json::Value>(seed).unwrap()["url"].as_str().unwrap().to_owned();
            let Ok(body) = fs::read(root.join("timemaps").join(format!("{}.link", urlsafe(&url)))) else {
                continue;
            };
            let doc = parse_timemap(&body, LINK_FORMAT).unwrap();
            latest = latest.max(doc.mementos.iter().map(|m| m.datetime).max());
        }
        out.insert(id, latest);
    }
    out
}

/// A collection with at least one seed.
fn seeded(root: &Path) -> String {
    latest_captures(root)
        .into_keys()
        .find(|id| !fs::read_to_string(root.join("seeds").join(format!("{id}.jsonl"))).unwrap().trim().is_empty())
        .unwrap()
}

#[test]
fn window_days_narrows_selection() {
    let env = Env::new();
    let now = Utc::now();
    let corpus = env.corpus(&CorpusSpec {
        latest_capture: now - Duration::days(400),
        ..CorpusSpec::small(12)
    });
    extend_collection(&corpus, &seeded(&corpus), 0, 1, now - Duration::days(60)).unwrap();
    env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    let latest = latest_captures(&corpus);
    let expected = |days: i64| -> BTreeSet<String> {
        latest
            .iter()
            .filter(|(_, t)| t.is_none_or(|t| now - t <= Duration::days(days)))
            .map(|(id, _)| id.clone())
            .collect()
    };
    let selected = |days: &str| -> BTreeSet<String> {
        deltas(&env.ok(&["update", "--window-days", days])).into_keys().collect()
    };
    let narrow = selected("30");
    let wide = selected("90");
    assert_eq!(narrow, expected(30));
    assert_eq!(wide, expected(90));
    assert!(narrow.len() < wide.len(), "{narrow:?} vs {wide:?}");
}

#[test]
fn update_deltas_match_library_report() {
    let env = Env::new();
    let now = Utc::now();
    let corpus = env.corpus(&CorpusSpec {
        latest_capture: now - Duration::days(400),
        ..CorpusSpec::small(4)
    });
    let target = seeded(&corpus);
    extend_collection(&corpus, &target, 0, 1, now - Duration::days(20)).unwrap();
    env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    extend_collection(&corpus, &target, 3, 5, now - Duration::days(1)).unwrap();

    let copy = TempDir::new().unwrap();
    for entry in fs::read_dir(env.path("store")).unwrap() {
        let entry = entry.unwrap();
        if entry.file_name() != "LOCK" {
            fs::copy(entry.path(), copy.path().join(entry.file_name())).unwrap();
        }
    }
    let reference = Store::open(copy.path()).unwrap();
    let opts = IngestOptions {
        parallelism: 4,
        leases: LeaseTable::default(),
    };
    let report = run_incremental_update(&reference, &aw_core::ingest::FixtureAdapter::new(&corpus), &[target.clone()], &opts).unwrap();

    let printed = deltas(&env.ok(&["update"]));
    let lib = &report.collections[0];
    assert_eq!(printed[&target], (lib.resources_added, lib.captures_added));
    assert_eq!(printed[&target], (3, 5));
}

#[test]
fn reindex_rebuilds_from_store() {
    let env = Env::new();
    let corpus = env.corpus(&CorpusSpec {
        collections: 3,
        include_women_artists: false,
        ..CorpusSpec::default()
    });
    env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    let queries = ["human rights", "tibet", "women", "news", "archive"];
    let run = || -> Vec<Vec<(String, u64)>> {
        let index = SearchIndex::load(&env.path("index")).unwrap();
        queries
            .iter()
            .map(|q| {
                index
                    .execute_search(&QuerySpec::new(q).page(1, 50), &Visibility::All)
                    .unwrap()
                    .results
                    .iter()
                    .map(|r| (r.url().to_owned(), r.score.to_bits()))
                    .collect()
            })
            .collect()
    };
    let before = run();
    assert!(before[0].len() > 0);

    let out = env.ok(&["reindex"]);
    let resources = env.store().resource_ids().len();
    assert_eq!(out.trim(), format!("{resources} documents indexed, {resources} resources in store"));
    assert_eq!(run(), before);

    fs::write(env.path("index/documents.json"), b"\x00garbage").unwrap();
    fs::write(env.path("index/VERSION"), b"999").unwrap();
    assert!(SearchIndex::load(&env.path("index")).is_err());
    env.ok(&["reindex"]);
    assert_eq!(SearchIndex::load(&env.path("index")).unwrap().len(), resources);
    assert_eq!(run(), before);
}

#[test]
fn export_hrwa_as_jsonl_and_csv() {
    let env = Env::new();
    let corpus = env.corpus(&CorpusSpec {
        collections: 1,
        include_women_artists: false,
        ..CorpusSpec::default()
    });
    env.ok(&["ingest", "--source", corpus.to_str().unwrap()]);
    let group = env.store().group_by_external_id(HRWA_ID).unwrap().id.to_string();

    let jsonl = env.path("hrwa.jsonl");
    let out = env.run(&["export", "--group", &group, "--format", "jsonl", "--out", jsonl.to_str().unwrap()]);
    assert_eq!(code(&out), Some(2), "export needs an admin account to attribute it to");
    env.ok(&["user", "add", "operator", "--password", "s3cret-pass", "--role", "admin"]);
    env.ok(&["export", "--group", &group, "--format", "jsonl", "--out", jsonl.to_str().unwrap()]);

    assert_eq!(fs::read_to_string(&jsonl).unwrap().lines().count(), 711);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(manifest_path(&jsonl)).unwrap()).unwrap();
    assert_eq!(manifest["resource_count"], 711);
    assert_eq!(manifest["format"], "jsonl");

    let csv = env.path("hrwa.csv");
    env.ok(&["export", "--group", &group, "--format", "csv", "--out", csv.to_str().unwrap()]);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "resource_id").unwrap();
    let csv_ids: BTreeSet<String> = lines.map(|l| l.split(',').nth(col).unwrap().to_owned()).collect();
    let jsonl_ids: BTreeSet<String> = read_jsonl_export(&jsonl).unwrap().iter().map(|v| v.resource.id.to_string()).collect();
    assert_eq!(csv_ids.len(), 711);
    assert_eq!(csv_ids, jsonl_ids);
}

#[test]
fn export_unknown_group_is_not_found() {
    let env = Env::new();
    env.ok(&["user", "add", "operator", "--password", "s3cret-pass", "--role", "admin"]);
    let out = env.run(&["export", "--group", "424242", "--format", "csv", "--out", env.path("x.csv").to_str().unwrap()]);
    assert_eq!(code(&out), Some(3));
    assert!(!env.path("x.csv").exists());
}

#[test]
fn export_empty_group_writes_valid_manifest() {
    let env = Env::new();
    env.ok(&["user", "add", "operator", "--password", "s3cret-pass", "--role", "admin"]);
    let group = {
        let store = env.store();
        let admin = store.users()[0].id;
        store.create_group("Empty", "", admin).unwrap().id.to_string()
    };
    let out = env.path("empty.jsonl");
    env.ok(&["export", "--group", &group, "--format", "jsonl", "--out", out.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(manifest_path(&out)).unwrap()).unwrap();
    assert_eq!(manifest["resource_count"], 0);
    assert_eq!(manifest["capture_count"], 0);
}

#[test]
fn duplicate_user_is_rejected() {
    let env = Env::new();
    env.ok(&["user", "add", "ana", "--password", "s3cret-pass"]);
    assert_eq!(code(&env.run(&["user", "add", "ana", "--password", "other-pass"])), Some(2));
}
