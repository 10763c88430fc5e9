//! UTC timestamps at second precision and an injectable clock.

use std::sync::atomic::{AtomicI64, Ordering};

use chrono::{DateTime, NaiveDateTime, SubsecRound, TimeZone, Utc};

/// Every persisted timestamp is UTC, truncated to whole seconds.
pub type Timestamp = DateTime<Utc>;

pub fn truncate(ts: Timestamp) -> Timestamp {
    ts.trunc_subsecs(0)
}

/// Builds a timestamp from calendar fields; panics on out-of-range input.
pub fn utc(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> Timestamp {
    Utc.with_ymd_and_hms(y, mo, d, h, mi, s)
        .single()
        .expect("valid calendar timestamp")
}

pub trait Clock: Send + Sync {
    fn now(&self) -> Timestamp;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> Timestamp {
        truncate(Utc::now())
    }
}

/// A clock that only moves when told to. Used by tests and replays.
#[derive(Debug)]
pub struct ManualClock {
    secs: AtomicI64,
}

impl ManualClock {
    pub fn new(start: Timestamp) -> Self {
        Self {
            secs: AtomicI64::new(start.timestamp()),
        }
    }

    pub fn set(&self, ts: Timestamp) {
        self.secs.store(ts.timestamp(), Ordering::SeqCst);
    }

    pub fn advance(&self, by: chrono::Duration) {
        self.secs.fetch_add(by.num_seconds(), Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Timestamp {
        Utc.timestamp_opt(self.secs.load(Ordering::SeqCst), 0)
            .single()
            .expect("clock within chrono range")
    }
}

/// Parses an RFC 1123 date as used in link-format `datetime` parameters,
/// e.g. `Thu, 16 Apr 2009 10:00:00 GMT`.
pub fn parse_rfc1123(raw: &str) -> Option<Timestamp> {
    let raw = raw.trim();
    let body = raw
        .strip_suffix("GMT")
        .or_else(|| raw.strip_suffix("UTC"))?
        .trim_end();
    NaiveDateTime::parse_from_str(body, "%a, %d %b %Y %H:%M:%S")
        .ok()
        .map(|naive| Utc.from_utc_datetime(&naive))
}

pub fn format_rfc1123(ts: &Timestamp) -> String {
    ts.format("%a, %d %b %Y %H:%M:%S GMT").to_string()
}

/// Parses the 14-digit `yyyyMMddHHmmss` form used by CDX servers.
pub fn parse_timestamp14(raw: &str) -> Option<Timestamp> {
    if raw.len() != 14 || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    NaiveDateTime::parse_from_str(raw, "%Y%m%d%H%M%S")
        .ok()
        .map(|naive| Utc.from_utc_datetime(&naive))
}

pub fn format_timestamp14(ts: &Timestamp) -> String {
    ts.format("%Y%m%d%H%M%S").to_string()
}

/// Canonical ISO 8601 rendering (`2009-04-16T10:00:00Z`).
pub fn format_iso(ts: &Timestamp) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn parse_iso(raw: &str) -> Option<Timestamp> {
    DateTime::parse_from_rfc3339(raw.trim())
        .ok()
        .map(|dt| truncate(dt.with_timezone(&Utc)))
}
