//! Capture timelines: month buckets and capture spans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clock::Timestamp;
use crate::domain::CaptureRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthBucket {
    /// `YYYY-MM`, UTC.
    pub month: String,
    pub count: usize,
}

pub fn aggregate_by_month(datetimes: impl IntoIterator<Item = Timestamp>) -> Vec<MonthBucket> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in datetimes {
        *counts.entry(t.format("%Y-%m").to_string()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(month, count)| MonthBucket { month, count })
        .collect()
}

pub fn aggregate_captures_by_month(captures: &[CaptureRecord]) -> Vec<MonthBucket> {
    aggregate_by_month(captures.iter().map(|c| c.capture_datetime))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureSpan {
    pub first: Option<Timestamp>,
    pub last: Option<Timestamp>,
    pub count: usize,
}

impl CaptureSpan {
    pub fn of(datetimes: impl IntoIterator<Item = Timestamp>) -> Self {
        datetimes.into_iter().fold(Self::default(), |acc, t| Self {
            first: Some(acc.first.map_or(t, |f| f.min(t))),
            last: Some(acc.last.map_or(t, |l| l.max(t))),
            count: acc.count + 1,
        })
    }
}

pub fn capture_span(captures: &[CaptureRecord]) -> CaptureSpan {
    CaptureSpan::of(captures.iter().map(|c| c.capture_datetime))
}
