//! Thumbnails taken when a resource is added to a group.

use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::domain::{Availability, Resource};

pub const GONE_MESSAGE: &str = "The page is no longer available on the web";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScreenshotError {
    #[error("screenshot of {0} timed out")]
    Timeout(String),
    #[error("screenshot failed: {0}")]
    Failed(String),
}

pub trait ScreenshotProvider: Send + Sync {
    /// PNG bytes of the rendered page.
    fn screenshot(&self, url: &str, timeout: Duration) -> Result<Vec<u8>, ScreenshotError>;
}

/// Returns fixed bytes, or a fixed error.
#[derive(Debug, Clone)]
pub struct StubScreenshotProvider {
    pub result: Result<Vec<u8>, ScreenshotError>,
}

impl ScreenshotProvider for StubScreenshotProvider {
    fn screenshot(&self, _url: &str, _timeout: Duration) -> Result<Vec<u8>, ScreenshotError> {
        self.result.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Thumbnail {
    Image {
        reference: String,
        #[serde(skip)]
        bytes: Vec<u8>,
    },
    Placeholder {
        message: &'static str,
    },
}

impl Thumbnail {
    pub fn reference(&self) -> Option<&str> {
        match self {
            Thumbnail::Image { reference, .. } => Some(reference),
            Thumbnail::Placeholder { .. } => None,
        }
    }
}

/// Screenshots live pages; anything else gets the placeholder. Provider
/// failures fall back to the placeholder with unknown availability.
pub fn resolve_thumbnail(
    resource: &Resource,
    provider: &dyn ScreenshotProvider,
    timeout: Duration,
) -> (Thumbnail, Availability) {
    let placeholder = Thumbnail::Placeholder {
        message: GONE_MESSAGE,
    };
    if resource.availability != Availability::Live {
        return (placeholder, resource.availability);
    }
    match provider.screenshot(&resource.url, timeout) {
        Ok(bytes) => {
            let reference = format!("sha256:{}", hex::encode(Sha256::digest(&bytes)));
            (Thumbnail::Image { reference, bytes }, Availability::Live)
        }
        Err(e) => {
            tracing::warn!(url = %resource.url, error = %e, "thumbnail unavailable");
            (placeholder, Availability::Unknown)
        }
    }
}
