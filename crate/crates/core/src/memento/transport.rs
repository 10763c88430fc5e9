//! HTTP transport abstraction. Production code uses [`HttpTransport`] wrapped
//! in [`PoliteTransport`]; tests inject [`StubTransport`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_POLITENESS: Duration = Duration::from_millis(500);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn new(status: u16, body: impl Into<Vec<u8>>) -> Self {
        Self {
            status,
            headers: Vec::new(),
            body: body.into(),
        }
    }

    pub fn with_header(mut self, name: &str, value: &str) -> Self {
        self.headers.push((name.to_owned(), value.to_owned()));
        self
    }

    /// Case-insensitive header lookup.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("request to {url} timed out")]
    Timeout { url: String },
    #[error("request to {url} failed: {message}")]
    Connection { url: String, message: String },
    #[error("{url} answered with status {status}")]
    Status { url: String, status: u16 },
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError>;
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        (**self).get(url)
    }
}

/// Blocking HTTP client.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("archive-curator/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| TransportError::Connection {
                url: String::new(),
                message: e.to_string(),
            })?;
        Ok(Self { client })
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let fail = |e: reqwest::Error| {
            if e.is_timeout() {
                TransportError::Timeout { url: url.to_owned() }
            } else {
                TransportError::Connection {
                    url: url.to_owned(),
                    message: e.to_string(),
                }
            }
        };
        let resp = self.client.get(url).send().map_err(fail)?;
        let status = resp.status().as_u16();
        let headers = resp
            .headers()
            .iter()
            .filter_map(|(k, v)| Some((k.as_str().to_owned(), v.to_str().ok()?.to_owned())))
            .collect();
        let body = resp.bytes().map_err(fail)?.to_vec();
        Ok(HttpResponse {
            status,
            headers,
            body,
        })
    }
}

/// Serializes requests per host and spaces them by a fixed delay.
pub struct PoliteTransport<T> {
    inner: T,
    delay: Duration,
    hosts: Mutex<HashMap<String, Arc<Mutex<Option<Instant>>>>>,
}

impl<T: Transport> PoliteTransport<T> {
    pub fn new(inner: T, delay: Duration) -> Self {
        Self {
            inner,
            delay,
            hosts: Mutex::new(HashMap::new()),
        }
    }

    fn slot(&self, url: &str) -> Arc<Mutex<Option<Instant>>> {
        let host = url::Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_owned))
            .unwrap_or_default();
        self.hosts
            .lock()
            .expect("host table poisoned")
            .entry(host)
            .or_default()
            .clone()
    }
}

impl<T: Transport> Transport for PoliteTransport<T> {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let slot = self.slot(url);
        let mut last = slot.lock().expect("host slot poisoned");
        if let Some(prev) = *last {
            let ready = prev + self.delay;
            let now = Instant::now();
            if ready > now {
                thread::sleep(ready - now);
            }
        }
        let out = self.inner.get(url);
        *last = Some(Instant::now());
        out
    }
}

type Handler = dyn Fn(&str) -> Option<Result<HttpResponse, TransportError>> + Send + Sync;

/// Canned responses keyed by exact URL. Unrouted URLs answer 404.
#[derive(Default)]
pub struct StubTransport {
    routes: Mutex<HashMap<String, Result<HttpResponse, TransportError>>>,
    fallback: Option<Box<Handler>>,
    log: Mutex<Vec<String>>,
}

impl StubTransport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Consulted for URLs without an exact route.
    pub fn with_handler(
        handler: impl Fn(&str) -> Option<Result<HttpResponse, TransportError>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            fallback: Some(Box::new(handler)),
            ..Self::default()
        }
    }

    pub fn route(&self, url: &str, response: HttpResponse) -> &Self {
        self.routes
            .lock()
            .expect("routes poisoned")
            .insert(url.to_owned(), Ok(response));
        self
    }

    pub fn fail(&self, url: &str, error: TransportError) -> &Self {
        self.routes
            .lock()
            .expect("routes poisoned")
            .insert(url.to_owned(), Err(error));
        self
    }

    pub fn requests(&self) -> Vec<String> {
        self.log.lock().expect("log poisoned").clone()
    }
}

impl Transport for StubTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        self.log.lock().expect("log poisoned").push(url.to_owned());
        if let Some(hit) = self.routes.lock().expect("routes poisoned").get(url) {
            return hit.clone();
        }
        self.fallback
            .as_ref()
            .and_then(|f| f(url))
            .unwrap_or_else(|| Ok(HttpResponse::new(404, Vec::new())))
    }
}
