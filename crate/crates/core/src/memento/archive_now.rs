//! On-demand archiving through a Save Page Now style endpoint.

use serde::{Deserialize, Serialize};

use super::transport::Transport;
use super::MementoError;
use crate::clock::{parse_timestamp14, Timestamp};
use crate::urlnorm::{is_http_url, InvalidUrl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchiveOutcome {
    Accepted,
    RateLimited,
    Failed,
}

impl ArchiveOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            ArchiveOutcome::Accepted => "accepted",
            ArchiveOutcome::RateLimited => "rate_limited",
            ArchiveOutcome::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveReceipt {
    pub requested_url: String,
    pub request_uri: String,
    pub outcome: ArchiveOutcome,
    pub capture_uri: Option<String>,
    pub at: Timestamp,
}

impl ArchiveReceipt {
    /// Capture time encoded in a `/web/{14 digits}/` capture URI, else the
    /// request time.
    pub fn capture_datetime(&self) -> Timestamp {
        self.capture_uri
            .as_deref()
            .and_then(|uri| {
                uri.split('/')
                    .find(|seg| seg.len() == 14 && seg.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(parse_timestamp14)
            })
            .unwrap_or(self.at)
    }
}

pub fn request_archive_now(
    url: &str,
    transport: &dyn Transport,
    save_base: &str,
    at: Timestamp,
) -> Result<ArchiveReceipt, MementoError> {
    if !is_http_url(url) {
        return Err(InvalidUrl {
            raw: url.to_owned(),
            reason: "archiving needs an http(s) URL".into(),
        }
        .into());
    }
    let request_uri = format!("{}/save/{}", save_base.trim_end_matches('/'), url);
    let resp = transport.get(&request_uri)?;
    let outcome = match resp.status {
        200..=299 => ArchiveOutcome::Accepted,
        429 => ArchiveOutcome::RateLimited,
        _ => ArchiveOutcome::Failed,
    };
    let capture_uri = match outcome {
        ArchiveOutcome::Accepted => resp.header("content-location").map(|loc| {
            url::Url::parse(save_base)
                .and_then(|base| base.join(loc))
                .map(|u| u.to_string())
                .unwrap_or_else(|_| loc.to_owned())
        }),
        _ => None,
    };
    Ok(ArchiveReceipt {
        requested_url: url.to_owned(),
        request_uri,
        outcome,
        capture_uri,
        at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::utc;
    use crate::memento::transport::{HttpResponse, StubTransport};

    const SAVE: &str = "https://web.archive.example";

    #[test]
    fn accepted_resolves_content_location() {
        let stub = StubTransport::new();
        stub.route(
            "https://web.archive.example/save/http://example.org/",
            HttpResponse::new(200, "")
                .with_header("Content-Location", "/web/20240102030405/http://example.org/"),
        );
        let at = utc(2024, 1, 2, 3, 4, 10);
        let r = request_archive_now("http://example.org/", &stub, SAVE, at).unwrap();
        assert_eq!(r.outcome, ArchiveOutcome::Accepted);
        assert_eq!(
            r.capture_uri.as_deref(),
            Some("https://web.archive.example/web/20240102030405/http://example.org/")
        );
        assert_eq!(r.capture_datetime(), utc(2024, 1, 2, 3, 4, 5));
    }

    #[test]
    fn too_many_requests_is_rate_limited() {
        let stub = StubTransport::with_handler(|_| Some(Ok(HttpResponse::new(429, ""))));
        let r = request_archive_now("http://example.org/", &stub, SAVE, utc(2024, 1, 1, 0, 0, 0)).unwrap();
        assert_eq!(r.outcome, ArchiveOutcome::RateLimited);
        assert_eq!(r.capture_uri, None);
    }

    #[test]
    fn other_statuses_fail() {
        let stub = StubTransport::with_handler(|_| Some(Ok(HttpResponse::new(502, ""))));
        let r = request_archive_now("http://example.org/", &stub, SAVE, utc(2024, 1, 1, 0, 0, 0)).unwrap();
        assert_eq!(r.outcome, ArchiveOutcome::Failed);
    }

    #[test]
    fn non_http_scheme_is_invalid() {
        let stub = StubTransport::new();
        assert!(matches!(
            request_archive_now("ftp://x", &stub, SAVE, utc(2024, 1, 1, 0, 0, 0)),
            Err(MementoError::InvalidUrl(_))
        ));
        assert!(stub.requests().is_empty());
    }
}
