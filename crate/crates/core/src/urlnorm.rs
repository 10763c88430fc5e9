//! Seed URL normalization. A seed's identity within a group is its
//! normalized URL.

use url::Url;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid url {raw:?}: {reason}")]
pub struct InvalidUrl {
    pub raw: String,
    pub reason: String,
}

impl InvalidUrl {
    fn new(raw: &str, reason: impl Into<String>) -> Self {
        Self {
            raw: raw.to_owned(),
            reason: reason.into(),
        }
    }
}

/// Normalizes an absolute http(s) URL.
///
/// Scheme and host are lower-cased, default ports dropped, dot-segments
/// resolved and the fragment removed. The query string is kept as given.
/// Percent-escapes in the path get upper-case hex digits. A trailing slash is
/// kept, and an empty path becomes `/`.
pub fn normalize_url(raw: &str) -> Result<String, InvalidUrl> {
    let trimmed = raw.trim();
    let mut url = Url::parse(trimmed).map_err(|e| InvalidUrl::new(raw, e.to_string()))?;
    match url.scheme() {
        "http" | "https" => {}
        other => return Err(InvalidUrl::new(raw, format!("unsupported scheme {other}"))),
    }
    if url.host_str().is_none_or(str::is_empty) {
        return Err(InvalidUrl::new(raw, "missing host"));
    }
    url.set_fragment(None);
    let path = uppercase_percent_escapes(url.path());
    url.set_path(&path);
    Ok(url.into())
}

fn uppercase_percent_escapes(input: &str) -> String {
    let bytes = input.as_bytes();
    let mut out = String::with_capacity(input.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%'
            && i + 2 < bytes.len()
            && bytes[i + 1].is_ascii_hexdigit()
            && bytes[i + 2].is_ascii_hexdigit()
        {
            out.push('%');
            out.push(bytes[i + 1].to_ascii_uppercase() as char);
            out.push(bytes[i + 2].to_ascii_uppercase() as char);
            i += 3;
        } else {
            let ch = input[i..].chars().next().expect("char boundary");
            out.push(ch);
            i += ch.len_utf8();
        }
    }
    out
}

/// True for absolute http/https URLs with a host.
pub fn is_http_url(raw: &str) -> bool {
    normalize_url(raw).is_ok()
}
