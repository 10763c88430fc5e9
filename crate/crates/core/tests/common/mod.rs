#![allow(dead_code)]

pub mod corpus;
pub mod fixture;
pub mod oracle;

use std::sync::Arc;

use aw_core::clock::{utc, ManualClock, Timestamp};
use aw_core::domain::{Role, Store};
use aw_core::memento::StubTransport;
use aw_core::search::SearchIndex;
use aw_core::service::{ApiRequest, ApiResponse, App};
use serde_json::Value;

pub fn t0() -> Timestamp {
    utc(2016, 6, 30, 12, 0, 0)
}

pub fn clock() -> Arc<ManualClock> {
    Arc::new(ManualClock::new(t0()))
}

pub fn memory_store() -> (Arc<Store>, Arc<ManualClock>) {
    let clock = clock();
    (Arc::new(Store::in_memory(clock.clone())), clock)
}

pub struct TestApp {
    pub app: App,
    pub clock: Arc<ManualClock>,
    pub transport: Arc<StubTransport>,
    pub admin: String,
    pub curator: String,
    pub member: String,
    pub outsider: String,
}

pub const PASSWORD: &str = "correct horse battery staple";

impl TestApp {
    pub fn new() -> Self {
        Self::build(|app| app)
    }

    /// Like `new`, with `configure` applied to the app before users exist.
    pub fn build(configure: impl FnOnce(App) -> App) -> Self {
        let (store, clock) = memory_store();
        let transport = Arc::new(StubTransport::new());
        let app = configure(App::new(store, Arc::new(SearchIndex::new()), transport.clone()));
        Self::with_app(app, clock, transport)
    }

    pub fn with_app(app: App, clock: Arc<ManualClock>, transport: Arc<StubTransport>) -> Self {
        let mut tokens = Vec::new();
        for (name, role) in [
            ("ada", Role::Admin),
            ("cato", Role::Curator),
            ("mia", Role::Member),
            ("otto", Role::Member),
        ] {
            app.register_user(name, name, role, PASSWORD).unwrap();
            tokens.push(app.open_session(name, PASSWORD).unwrap().token);
        }
        let mut it = tokens.into_iter();
        Self {
            app,
            clock,
            transport,
            admin: it.next().unwrap(),
            curator: it.next().unwrap(),
            member: it.next().unwrap(),
            outsider: it.next().unwrap(),
        }
    }

    pub fn call(&self, req: ApiRequest) -> ApiResponse {
        self.app.dispatch(req)
    }

    /// Dispatches and asserts a 2xx status, returning the body.
    pub fn ok(&self, req: ApiRequest) -> Value {
        let desc = format!("{:?} {}", req.method, req.path);
        let res = self.app.dispatch(req);
        assert!(res.is_success(), "{desc} -> {} {}", res.status, res.body);
        res.body
    }

    pub fn id(&self, body: &Value) -> u64 {
        body["id"].as_u64().expect("body has an id")
    }
}

pub mod domain {
    use aw_core::clock::Timestamp;
    use aw_core::domain::*;

    pub fn user(store: &Store, name: &str, role: Role) -> UserId {
        store.create_user(name, name, role, "unused-hash".into()).unwrap().id
    }

    pub fn resource(url: &str) -> NewResource {
        NewResource {
            title: format!("Title of {url}"),
            ..NewResource::for_url(url)
        }
    }

    pub fn capture(at: Timestamp, uri: &str) -> NewCapture {
        NewCapture {
            capture_datetime: at,
            capture_uri: uri.to_owned(),
            provenance: Provenance::IngestedArchive,
        }
    }

    pub fn collection(external_id: &str) -> IngestedCollection {
        IngestedCollection {
            external_id: external_id.into(),
            title: format!("Collection {external_id}"),
            institution: "Columbia University Libraries".into(),
            description: "Human rights websites".into(),
            subjects: vec!["Human rights".into()],
            collectors: vec!["Columbia University Libraries".into()],
            portal_link: format!("https://archive-it.org/collections/{external_id}"),
        }
    }

    /// A read-only group mirroring `external_id` holding `urls`, each with
    /// one capture.
    pub fn ingested(store: &Store, external_id: &str, urls: &[String]) -> GroupId {
        let at = super::t0() - chrono::Duration::days(400);
        let seeds = urls
            .iter()
            .map(|u| IngestedSeed {
                resource: NewResource {
                    subjects: vec!["Human rights".into()],
                    ..resource(u)
                },
                captures: vec![capture(at, &format!("https://wayback.example/{external_id}/{u}"))],
            })
            .collect();
        store
            .sync_ingested_collection(&collection(external_id), seeds)
            .unwrap()
            .group_id
            .unwrap()
    }
}
