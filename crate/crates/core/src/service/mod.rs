//! The JSON API: sessions, authorization and request dispatch. Transport
//! agnostic; the HTTP server wraps [`App::dispatch`].

pub mod auth;
pub mod error;
mod routes;
pub mod session;

use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub use auth::{authorize, Action, Grant};
pub use error::ApiError;
pub use session::{hash_password, verify_password, SessionTable, SessionToken};

use crate::domain::{Role, Store, UserAccount};
use crate::ingest::{ScreenshotProvider, StubScreenshotProvider};
use crate::ingest::thumbnail::ScreenshotError;
use crate::memento::Transport;
use crate::search::{sync_index, DisabledProvider, LiveWebProvider, SearchIndex};

pub const MAX_BODY_BYTES: usize = 20 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub cdx_base_url: String,
    pub save_base_url: String,
    pub thumbnail_timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            cdx_base_url: "https://web.archive.org/cdx/search/cdx".into(),
            save_base_url: "https://web.archive.org".into(),
            thumbnail_timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Get,
    Post,
    Put,
    Patch,
    Delete,
}

impl Method {
    pub fn parse(raw: &str) -> Option<Self> {
        Some(match raw.to_ascii_uppercase().as_str() {
            "GET" => Method::Get,
            "POST" => Method::Post,
            "PUT" => Method::Put,
            "PATCH" => Method::Patch,
            "DELETE" => Method::Delete,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiRequest {
    pub method: Method,
    /// Path without query string; segments may be percent-encoded.
    pub path: String,
    pub query: Vec<(String, String)>,
    pub token: Option<String>,
    pub body: Vec<u8>,
}

impl ApiRequest {
    pub fn new(method: Method, path: &str) -> Self {
        Self {
            method,
            path: path.to_owned(),
            query: Vec::new(),
            token: None,
            body: Vec::new(),
        }
    }

    pub fn get(path: &str) -> Self {
        Self::new(Method::Get, path)
    }

    pub fn post(path: &str) -> Self {
        Self::new(Method::Post, path)
    }

    pub fn patch(path: &str) -> Self {
        Self::new(Method::Patch, path)
    }

    pub fn delete(path: &str) -> Self {
        Self::new(Method::Delete, path)
    }

    pub fn param(mut self, key: &str, value: &str) -> Self {
        self.query.push((key.to_owned(), value.to_owned()));
        self
    }

    pub fn bearer(mut self, token: &str) -> Self {
        self.token = Some(token.to_owned());
        self
    }

    pub fn json(mut self, body: Value) -> Self {
        self.body = serde_json::to_vec(&body).expect("json value serializes");
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: Value,
}

impl ApiResponse {
    pub fn ok(body: impl Serialize) -> Self {
        Self::with_status(200, body)
    }

    pub fn created(body: impl Serialize) -> Self {
        Self::with_status(201, body)
    }

    pub fn no_content() -> Self {
        Self {
            status: 204,
            body: Value::Null,
        }
    }

    fn with_status(status: u16, body: impl Serialize) -> Self {
        match serde_json::to_value(body) {
            Ok(body) => Self { status, body },
            Err(e) => ApiError::internal(&e).into(),
        }
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    /// The `code` of an error response.
    pub fn error_code(&self) -> Option<&str> {
        self.body.get("code").and_then(Value::as_str)
    }
}

impl From<ApiError> for ApiResponse {
    fn from(e: ApiError) -> Self {
        Self {
            status: e.http_status,
            body: serde_json::json!({ "code": e.code, "message": e.message }),
        }
    }
}

struct NoScreenshots;

impl ScreenshotProvider for NoScreenshots {
    fn screenshot(&self, _url: &str, _timeout: Duration) -> Result<Vec<u8>, ScreenshotError> {
        Err(ScreenshotError::Failed("no screenshot provider configured".into()))
    }
}

pub struct App {
    store: Arc<Store>,
    index: Arc<SearchIndex>,
    transport: Arc<dyn Transport>,
    provider: Arc<dyn LiveWebProvider>,
    screenshots: Arc<dyn ScreenshotProvider>,
    sessions: SessionTable,
    config: ServiceConfig,
    dummy_hash: String,
    index_sync: Mutex<()>,
}

impl App {
    pub fn new(store: Arc<Store>, index: Arc<SearchIndex>, transport: Arc<dyn Transport>) -> Self {
        let dummy_hash = hash_password(&session::new_token()).expect("hashing a random token");
        Self {
            store,
            index,
            transport,
            provider: Arc::new(DisabledProvider),
            screenshots: Arc::new(NoScreenshots),
            sessions: SessionTable::default(),
            config: ServiceConfig::default(),
            dummy_hash,
            index_sync: Mutex::new(()),
        }
    }

    pub fn with_provider(mut self, provider: Arc<dyn LiveWebProvider>) -> Self {
        self.provider = provider;
        self
    }

    pub fn with_screenshots(mut self, screenshots: Arc<dyn ScreenshotProvider>) -> Self {
        self.screenshots = screenshots;
        self
    }

    /// Uses a provider that returns the given image for every page.
    pub fn with_fixed_screenshot(self, bytes: Vec<u8>) -> Self {
        self.with_screenshots(Arc::new(StubScreenshotProvider { result: Ok(bytes) }))
    }

    pub fn with_config(mut self, config: ServiceConfig) -> Self {
        self.config = config;
        self
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }

    pub fn index(&self) -> &Arc<SearchIndex> {
        &self.index
    }

    pub fn register_user(
        &self,
        username: &str,
        display_name: &str,
        role: Role,
        password: &str,
    ) -> Result<UserAccount, ApiError> {
        let hash = hash_password(password)?;
        Ok(self.store.create_user(username, display_name, role, hash)?)
    }

    /// Verifies credentials. Unknown users cost the same hash verification
    /// as known ones.
    pub fn open_session(&self, username: &str, password: &str) -> Result<SessionToken, ApiError> {
        let found = self.store.credentials(username);
        let stored = found.as_ref().map_or(self.dummy_hash.as_str(), |(_, h)| h.as_str());
        let valid = verify_password(password, stored);
        match found {
            Some((account, _)) if valid => Ok(self.sessions.issue(account.id, self.store.now())),
            _ => Err(ApiError::invalid_credentials()),
        }
    }

    pub fn session(&self, token: &str) -> Option<SessionToken> {
        self.sessions.resolve(token, self.store.now())
    }

    /// Applies pending store changes to the search index.
    pub fn refresh_index(&self) {
        let _guard = self.index_sync.lock().expect("index sync poisoned");
        if let Err(e) = sync_index(&self.store, &self.index) {
            tracing::error!(error = %e, "index refresh failed");
        }
    }

    pub fn dispatch(&self, req: ApiRequest) -> ApiResponse {
        let resp = match routes::handle(self, &req) {
            Ok(resp) => resp,
            Err(e) => e.into(),
        };
        self.refresh_index();
        resp
    }
}
