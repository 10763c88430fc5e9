mod common;

use std::collections::BTreeSet;
use std::fs;

use aw_core::domain::*;
use aw_core::export::*;
use aw_core::fixtures::{write_corpus, CorpusSpec, HRWA_ID, HRWA_SEEDS};
use aw_core::ingest::{ingest_collection, CollectionSourceRecord, FixtureAdapter, IngestOptions, LeaseTable};
use common::domain::{capture, resource, user};
use common::fixture::comparable;
use common::{memory_store, t0};
use tempfile::TempDir;

fn opts() -> IngestOptions {
    IngestOptions {
        parallelism: 4,
        leases: LeaseTable::default(),
    }
}

fn hrwa_store() -> (std::sync::Arc<Store>, GroupId) {
    let corpus = TempDir::new().unwrap();
    let spec = CorpusSpec {
        collections: 1,
        include_women_artists: false,
        ..CorpusSpec::default()
    };
    write_corpus(corpus.path(), &spec).unwrap();
    let (store, _) = memory_store();
    let report = ingest_collection(&store, &FixtureAdapter::new(corpus.path()), HRWA_ID, &opts()).unwrap();
    (store, report.group_id.unwrap())
}

#[test]
fn jsonl_export_of_hrwa_has_711_lines_and_manifest() {
    let (store, g) = hrwa_store();
    let admin = user(&store, "admin", Role::Admin);
    let out = TempDir::new().unwrap();
    let path = out.path().join("hrwa.jsonl");
    let manifest = export_group(&store, g, ExportFormat::Jsonl, &path, admin).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), HRWA_SEEDS);
    assert_eq!(manifest.resource_count, HRWA_SEEDS);
    let captures: usize = store
        .resources_in_group(g)
        .unwrap()
        .iter()
        .map(|r| store.captures(r.id).unwrap().len())
        .sum();
    assert_eq!(manifest.capture_count, captures);
    assert_eq!(manifest.generated_at, t0());
    let on_disk: ExportManifest = serde_json::from_slice(&fs::read(manifest_path(&path)).unwrap()).unwrap();
    assert_eq!(on_disk, manifest);

    let entry = store.activity().pop().unwrap();
    assert_eq!(entry.action_type, ActionType::ExportPerformed);
    assert_eq!(entry.details["resource_count"], "711");
}

#[test]
fn jsonl_round_trip_reproduces_metadata_and_captures() {
    let (store, g) = hrwa_store();
    let admin = user(&store, "admin", Role::Admin);
    let out = TempDir::new().unwrap();
    let path = out.path().join("hrwa.jsonl");
    export_group(&store, g, ExportFormat::Jsonl, &path, admin).unwrap();
    let views = read_jsonl_export(&path).unwrap();
    assert_eq!(views.len(), HRWA_SEEDS);

    let group = store.group(g).unwrap();
    let record = CollectionSourceRecord {
        external_id: "reimport".into(),
        title: group.title.clone(),
        ..Default::default()
    };
    let corpus = out.path().join("corpus");
    write_fixture_corpus(&views, &record, &corpus).unwrap();
    let (fresh, _) = memory_store();
    let report = ingest_collection(&fresh, &FixtureAdapter::new(&corpus), "reimport", &opts()).unwrap();
    assert!(report.seed_errors.is_empty());
    assert_eq!(comparable(&fresh, report.group_id.unwrap()), comparable(&store, g));
}

#[test]
fn csv_and_jsonl_cover_the_same_resources() {
    let (store, _) = memory_store();
    let u = user(&store, "u", Role::Curator);
    let g = store.create_group("g", "", u).unwrap().id;
    for i in 0..5 {
        let caps = (0..i)
            .map(|k| capture(t0() - chrono::Duration::days(k as i64 + 1), &format!("https://w/{i}/{k}")))
            .collect();
        let r = store
            .add_resource(g, resource(&format!("http://site{i}.example/")), caps, u)
            .unwrap();
        store.annotate_resource(r.id, Annotate::AddTag(format!("tag {i}")), u).unwrap();
    }
    let out = TempDir::new().unwrap();
    let jpath = out.path().join("g.jsonl");
    let cpath = out.path().join("g.csv");
    let jm = export_group(&store, g, ExportFormat::Jsonl, &jpath, u).unwrap();
    let cm = export_group(&store, g, ExportFormat::Csv, &cpath, u).unwrap();
    assert_eq!((jm.resource_count, jm.capture_count), (cm.resource_count, cm.capture_count));
    assert_eq!(jm.capture_count, 10);

    let json_ids: BTreeSet<u64> = read_jsonl_export(&jpath).unwrap().iter().map(|v| v.resource.id.0).collect();
    let mut reader = csv::Reader::from_path(&cpath).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (id_col, tags_col, count_col) = (col("resource_id"), col("tags"), col("capture_count"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let csv_ids: BTreeSet<u64> = rows.iter().map(|r| r[id_col].parse().unwrap()).collect();
    assert_eq!(json_ids, csv_ids);
    assert_eq!(rows.len(), cm.resource_count);
    assert_eq!(&rows[3][tags_col], "tag 3");
    assert_eq!(&rows[3][count_col], "3");
}

#[test]
fn empty_group_gives_empty_file() {
    let (store, _) = memory_store();
    let u = user(&store, "u", Role::Curator);
    let g = store.create_group("g", "", u).unwrap().id;
    let out = TempDir::new().unwrap();
    let path = out.path().join("empty.jsonl");
    let m = export_group(&store, g, ExportFormat::Jsonl, &path, u).unwrap();
    assert_eq!((m.resource_count, m.capture_count), (0, 0));
    assert!(fs::read(&path).unwrap().is_empty());
}

#[test]
fn unknown_group_and_bad_lines() {
    let (store, _) = memory_store();
    let u = user(&store, "u", Role::Curator);
    let out = TempDir::new().unwrap();
    let path = out.path().join("x.jsonl");
    assert!(matches!(
        export_group(&store, GroupId(404), ExportFormat::Jsonl, &path, u),
        Err(ExportError::Domain(DomainError::UnknownGroup(_)))
    ));
    fs::write(&path, "{\"resource\":1}\n").unwrap();
    assert!(matches!(read_jsonl_export(&path), Err(ExportError::Format { line: 1, .. })));
    assert_eq!("csv".parse::<ExportFormat>().unwrap(), ExportFormat::Csv);
    assert!("xml".parse::<ExportFormat>().is_err());
}
