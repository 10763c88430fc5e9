//! Wayback CDX server responses and archive-status lookups.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::transport::{Transport, TransportError};
use super::MementoError;
use crate::clock::{parse_timestamp14, Timestamp};
use crate::urlnorm::{is_http_url, InvalidUrl};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdxCaptureLine {
    pub urlkey: String,
    pub timestamp14: String,
    pub original: String,
    pub mimetype: String,
    pub statuscode: String,
    pub digest: String,
    /// Absent when the server reports `-` or the column was not requested.
    pub length: Option<u64>,
}

impl CdxCaptureLine {
    pub fn datetime(&self) -> Timestamp {
        parse_timestamp14(&self.timestamp14).expect("validated while parsing")
    }
}

fn cell(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Null => Some(String::new()),
        _ => None,
    }
}

pub fn parse_cdx_response(body: &[u8]) -> Result<Vec<CdxCaptureLine>, MementoError> {
    let bad = |m: String| MementoError::MalformedResponse(m);
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    let value: Value = serde_json::from_slice(body).map_err(|e| bad(e.to_string()))?;
    let rows = value
        .as_array()
        .ok_or_else(|| bad("top level is not an array".into()))?;
    let mut rows = rows.iter().map(|row| {
        row.as_array()
            .ok_or_else(|| bad("row is not an array".into()))?
            .iter()
            .map(|v| cell(v).ok_or_else(|| bad(format!("unexpected cell {v}"))))
            .collect::<Result<Vec<String>, _>>()
    });
    let Some(header) = rows.next().transpose()? else {
        return Ok(Vec::new());
    };
    let col = |name: &str| header.iter().position(|h| h == name);
    let required = |name: &str| col(name).ok_or_else(|| MementoError::UnknownHeaderField(name.into()));
    let ts_col = required("timestamp")?;
    let orig_col = required("original")?;
    let (urlkey, mime, status, digest, length) = (
        col("urlkey"),
        col("mimetype"),
        col("statuscode"),
        col("digest"),
        col("length"),
    );

    let mut out = Vec::new();
    for (n, row) in rows.enumerate() {
        let row = row?;
        if row.len() != header.len() {
            return Err(bad(format!(
                "row {} has {} cells, header has {}",
                n + 1,
                row.len(),
                header.len()
            )));
        }
        let get = |i: Option<usize>| i.map(|i| row[i].clone()).unwrap_or_default();
        let ts = row[ts_col].clone();
        if ts.len() != 14 || !ts.bytes().all(|b| b.is_ascii_digit()) || parse_timestamp14(&ts).is_none()
        {
            return Err(bad(format!("row {} has invalid timestamp {ts:?}", n + 1)));
        }
        let length = match get(length).as_str() {
            "" | "-" => None,
            raw => Some(
                raw.parse()
                    .map_err(|_| bad(format!("row {} has invalid length {raw:?}", n + 1)))?,
            ),
        };
        out.push(CdxCaptureLine {
            urlkey: get(urlkey),
            timestamp14: ts,
            original: row[orig_col].clone(),
            mimetype: get(mime),
            statuscode: get(status),
            digest: get(digest),
            length,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexStatus {
    NeverIndexed,
    Indexed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveStatus {
    pub status: IndexStatus,
    pub first_capture: Option<Timestamp>,
    pub last_capture: Option<Timestamp>,
}

impl ArchiveStatus {
    pub fn never_indexed() -> Self {
        Self {
            status: IndexStatus::NeverIndexed,
            first_capture: None,
            last_capture: None,
        }
    }
}

/// `limit=1` asks for the earliest capture, `limit=-1` for the latest.
pub fn cdx_query_url(cdx_base: &str, url: &str, limit: i32) -> String {
    let encoded: String = url::form_urlencoded::byte_serialize(url.as_bytes()).collect();
    format!("{cdx_base}?url={encoded}&output=json&limit={limit}&fl=timestamp,original,statuscode")
}

fn query(cdx_base: &str, url: &str, limit: i32, transport: &dyn Transport) -> Result<Vec<CdxCaptureLine>, MementoError> {
    let q = cdx_query_url(cdx_base, url, limit);
    let resp = transport.get(&q)?;
    if !resp.is_success() {
        return Err(TransportError::Status {
            url: q,
            status: resp.status,
        }
        .into());
    }
    parse_cdx_response(&resp.body)
}

/// Whether and when `url` has been captured, from two bounded CDX queries.
pub fn archive_status(url: &str, transport: &dyn Transport, cdx_base: &str) -> Result<ArchiveStatus, MementoError> {
    if !is_http_url(url) {
        return Err(InvalidUrl {
            raw: url.to_owned(),
            reason: "not an absolute http(s) URL".into(),
        }
        .into());
    }
    let earliest = query(cdx_base, url, 1, transport)?;
    let Some(first) = earliest.iter().map(CdxCaptureLine::datetime).min() else {
        return Ok(ArchiveStatus::never_indexed());
    };
    let latest = query(cdx_base, url, -1, transport)?;
    let last = latest
        .iter()
        .map(CdxCaptureLine::datetime)
        .max()
        .unwrap_or(first)
        .max(first);
    Ok(ArchiveStatus {
        status: IndexStatus::Indexed,
        first_capture: Some(first),
        last_capture: Some(last),
    })
}
