mod common;

use std::sync::Arc;

use aw_core::domain::*;
use aw_core::search::{rebuild_index, QuerySpec, SearchIndex, Visibility};
use common::domain::{capture, ingested, resource, user};
use common::{clock, t0};
use tempfile::TempDir;

fn options(checkpoint_every: usize) -> StoreOptions {
    StoreOptions {
        sync_writes: false,
        checkpoint_every,
    }
}

fn populate(store: &Store) -> GroupId {
    let u = user(store, "cur", Role::Curator);
    let hr = ingested(store, "1068", &["http://a.example/".into(), "http://b.example/".into()]);
    let g = store.create_group("mine", "", u).unwrap().id;
    let r = store
        .add_resource(g, resource("http://www.tibetinfonet.net/"), vec![capture(t0(), "https://w/1")], u)
        .unwrap();
    store.annotate_resource(r.id, Annotate::AddTag("tibet".into()), u).unwrap();
    store.annotate_resource(r.id, Annotate::Comment("archive monthly".into()), u).unwrap();
    store.copy_group(hr, u).unwrap();
    store.create_subgroup(g, "photos", u).unwrap();
    g
}

#[test]
fn reopened_store_has_identical_state() {
    for checkpoint_every in [1, 3, 1000] {
        let dir = TempDir::new().unwrap();
        let before = {
            let store = Store::open_with(dir.path(), clock(), options(checkpoint_every)).unwrap();
            populate(&store);
            store.snapshot_bytes()
        };
        let store = Store::open_with(dir.path(), clock(), options(checkpoint_every)).unwrap();
        assert_eq!(store.snapshot_bytes(), before, "checkpoint_every={checkpoint_every}");
        // Ids keep increasing after reopen.
        let u = store.find_groups("mine")[0].created_by;
        let g = store.create_group("later", "", u).unwrap();
        assert!(store.groups().iter().all(|other| other.id <= g.id));
    }
}

#[test]
fn failed_operations_leave_files_untouched() {
    let dir = TempDir::new().unwrap();
    let store = Store::open_with(dir.path(), clock(), options(1000)).unwrap();
    let g = populate(&store);
    let wal = std::fs::read(dir.path().join("wal.jsonl")).unwrap();
    let u = store.find_groups("mine")[0].created_by;
    assert!(store.add_resource(g, resource("http://www.tibetinfonet.net/"), vec![], u).is_err());
    assert!(store.create_group("", "", u).is_err());
    assert_eq!(std::fs::read(dir.path().join("wal.jsonl")).unwrap(), wal);
}

#[test]
fn index_is_rebuilt_from_a_reopened_store() {
    let dir = TempDir::new().unwrap();
    {
        let store = Store::open_with(dir.path(), clock(), options(2)).unwrap();
        populate(&store);
    }
    let store = Arc::new(Store::open_with(dir.path(), clock(), options(2)).unwrap());
    let index = SearchIndex::new();
    let n = rebuild_index(&store, &index).unwrap();
    assert_eq!(n, store.resource_ids().len());
    let page = index.execute_search(&QuerySpec::new("tibet"), &Visibility::All).unwrap();
    assert_eq!(page.total, 1);

    let saved = TempDir::new().unwrap();
    index.save(saved.path()).unwrap();
    let loaded = SearchIndex::load(saved.path()).unwrap();
    assert_eq!(loaded.documents(), index.documents());
}
