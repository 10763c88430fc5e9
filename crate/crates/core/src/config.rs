//! Operator configuration shared by the CLI and the server.
//!
//! The file is TOML; every key is optional:
//!
//! ```toml
//! storage_path = "data/store"
//! index_path = "data/index"
//! cdx_base_url = "https://web.archive.org/cdx/search/cdx"
//! timemap_base_url = "https://web.archive.org/web"
//! save_base_url = "https://web.archive.org"
//! live_provider = "fixture"          # fixture | endpoint | none
//! provider_endpoint = "https://search.example/api"
//! provider_fixture = "live.json"
//! politeness_delay_ms = 500
//! fetch_parallelism = 4
//! update_window_days = 90
//! ```
//!
//! Relative paths resolve against the directory holding the file.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{DEFAULT_PARALLELISM, DEFAULT_WINDOW_DAYS};
use crate::memento::{HttpTransport, PoliteTransport, Transport, TransportError, DEFAULT_TIMEOUT};
use crate::service::ServiceConfig;
use crate::search::{DisabledProvider, FixtureProvider, HttpProvider, LiveWebProvider};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LiveProviderKind {
    Fixture,
    Endpoint,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub storage_path: PathBuf,
    pub index_path: PathBuf,
    pub cdx_base_url: String,
    pub timemap_base_url: String,
    pub save_base_url: String,
    pub live_provider: LiveProviderKind,
    pub provider_endpoint: Option<String>,
    pub provider_fixture: Option<PathBuf>,
    pub politeness_delay_ms: u64,
    pub fetch_parallelism: usize,
    pub update_window_days: u32,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            storage_path: PathBuf::from("data/store"),
            index_path: PathBuf::from("data/index"),
            cdx_base_url: "https://web.archive.org/cdx/search/cdx".into(),
            timemap_base_url: "https://web.archive.org/web".into(),
            save_base_url: "https://web.archive.org".into(),
            live_provider: LiveProviderKind::None,
            provider_endpoint: None,
            provider_fixture: None,
            politeness_delay_ms: 500,
            fetch_parallelism: DEFAULT_PARALLELISM,
            update_window_days: DEFAULT_WINDOW_DAYS,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Self::parse(&text).map_err(|message| ConfigError::Invalid {
            path: path.to_owned(),
            message,
        })?;
        if let Some(dir) = path.parent() {
            config.resolve_relative(dir);
        }
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let config: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.fetch_parallelism == 0 {
            return Err("fetch_parallelism must be at least 1".into());
        }
        match self.live_provider {
            LiveProviderKind::Endpoint if self.provider_endpoint.is_none() => {
                Err("live_provider = \"endpoint\" needs provider_endpoint".into())
            }
            LiveProviderKind::Fixture if self.provider_fixture.is_none() => {
                Err("live_provider = \"fixture\" needs provider_fixture".into())
            }
            _ => Ok(()),
        }
    }

    fn resolve_relative(&mut self, base: &Path) {
        for p in [&mut self.storage_path, &mut self.index_path] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(p) = self.provider_fixture.as_mut().filter(|p| p.is_relative()) {
            *p = base.join(&*p);
        }
    }

    pub fn service_config(&self) -> ServiceConfig {
        ServiceConfig {
            cdx_base_url: self.cdx_base_url.clone(),
            save_base_url: self.save_base_url.clone(),
            ..ServiceConfig::default()
        }
    }

    pub fn politeness_delay(&self) -> Duration {
        Duration::from_millis(self.politeness_delay_ms)
    }

    /// HTTP transport with the configured per-host delay.
    pub fn transport(&self) -> Result<Arc<dyn Transport>, TransportError> {
        Ok(Arc::new(PoliteTransport::new(
            HttpTransport::new(DEFAULT_TIMEOUT)?,
            self.politeness_delay(),
        )))
    }

    pub fn live_provider(
        &self,
        transport: Arc<dyn Transport>,
    ) -> Result<Arc<dyn LiveWebProvider>, String> {
        Ok(match self.live_provider {
            LiveProviderKind::None => Arc::new(DisabledProvider),
            LiveProviderKind::Fixture => {
                let path = self.provider_fixture.as_ref().ok_or("provider_fixture unset")?;
                Arc::new(FixtureProvider::from_file(path).map_err(|e| e.to_string())?)
            }
            LiveProviderKind::Endpoint => {
                let endpoint = self.provider_endpoint.as_ref().ok_or("provider_endpoint unset")?;
                Arc::new(HttpProvider::new(endpoint, transport))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn keys_override_defaults() {
        let c = Config::parse("fetch_parallelism = 8\nupdate_window_days = 30\nlive_provider = \"none\"").unwrap();
        assert_eq!(c.fetch_parallelism, 8);
        assert_eq!(c.update_window_days, 30);
    }

    #[test]
    fn unknown_keys_and_bad_combinations_rejected() {
        assert!(Config::parse("storage = \"x\"").is_err());
        assert!(Config::parse("live_provider = \"endpoint\"").is_err());
        assert!(Config::parse("fetch_parallelism = 0").is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("aw.toml");
        std::fs::write(&path, "storage_path = \"s\"\nindex_path = \"/abs/i\"").unwrap();
        let c = Config::load(&path).unwrap();
        assert_eq!(c.storage_path, dir.path().join("s"));
        assert_eq!(c.index_path, PathBuf::from("/abs/i"));
    }
}
