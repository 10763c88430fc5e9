//! Tokenizer for `application/link-format` bodies: comma-separated
//! `<uri>; name="value"; name=token` entries.

use super::MementoError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkEntry {
    pub uri: String,
    pub params: Vec<(String, String)>,
}

impl LinkEntry {
    pub fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    /// Space-separated relation types of the `rel` parameter, lowercased.
    pub fn rels(&self) -> Vec<String> {
        self.param("rel")
            .map(|r| r.split_whitespace().map(str::to_ascii_lowercase).collect())
            .unwrap_or_default()
    }
}

fn malformed(msg: impl Into<String>) -> MementoError {
    MementoError::MalformedLinkFormat(msg.into())
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn take_until(&mut self, stop: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(|c| !stop(c)) {
            self.bump();
        }
        &self.text[start..self.pos]
    }
}

pub fn parse_links(body: &str) -> Result<Vec<LinkEntry>, MementoError> {
    let mut cur = Cursor { text: body, pos: 0 };
    let mut entries = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(',') => {
                cur.bump();
                continue;
            }
            Some('<') => {}
            Some(c) => return Err(malformed(format!("expected '<' at offset {}, found {c:?}", cur.pos))),
        }
        cur.bump();
        let uri = cur.take_until(|c| c == '>' || c == '<');
        if cur.bump() != Some('>') {
            return Err(malformed(format!("unterminated '<' before offset {}", cur.pos)));
        }
        let uri = uri.trim().to_owned();
        let mut params = Vec::new();
        loop {
            cur.skip_ws();
            match cur.peek() {
                Some(';') => {
                    cur.bump();
                }
                Some(',') | None => break,
                Some(c) => {
                    return Err(malformed(format!(
                        "unexpected {c:?} at offset {} after link target",
                        cur.pos
                    )))
                }
            }
            cur.skip_ws();
            let name = cur
                .take_until(|c| c == '=' || c == ';' || c == ',' || c.is_whitespace())
                .to_ascii_lowercase();
            if name.is_empty() {
                // Tolerate a trailing ';'.
                continue;
            }
            cur.skip_ws();
            if cur.peek() != Some('=') {
                params.push((name, String::new()));
                continue;
            }
            cur.bump();
            cur.skip_ws();
            let value = if cur.peek() == Some('"') {
                cur.bump();
                let mut value = String::new();
                loop {
                    match cur.bump() {
                        None => return Err(malformed("unterminated quoted string")),
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some(c) => value.push(c),
                            None => return Err(malformed("unterminated quoted string")),
                        },
                        Some(c) => value.push(c),
                    }
                }
                value
            } else {
                cur.take_until(|c| c == ';' || c == ',' || c.is_whitespace())
                    .to_owned()
            };
            params.push((name, value));
        }
        entries.push(LinkEntry { uri, params });
    }
    Ok(entries)
}

pub fn write_link(entry: &LinkEntry) -> String {
    let mut out = format!("<{}>", entry.uri);
    for (k, v) in &entry.params {
        let escaped = v.replace('\\', "\\\\").replace('"', "\\\"");
        out.push_str(&format!("; {k}=\"{escaped}\""));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quoted_and_token_params() {
        let links = parse_links(
            "<http://a/>; rel=\"original\",\n<http://t/>; rel=timemap; type=\"application/link-format\"",
        )
        .unwrap();
        assert_eq!(links.len(), 2);
        assert_eq!(links[0].uri, "http://a/");
        assert_eq!(links[0].rels(), vec!["original"]);
        assert_eq!(links[1].param("rel"), Some("timemap"));
        assert_eq!(links[1].param("TYPE"), Some("application/link-format"));
    }

    #[test]
    fn commas_inside_quotes_and_uris_are_kept() {
        let links =
            parse_links("<http://a/x,y>; datetime=\"Thu, 16 Apr 2009 10:00:00 GMT\"").unwrap();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].uri, "http://a/x,y");
        assert_eq!(links[0].param("datetime"), Some("Thu, 16 Apr 2009 10:00:00 GMT"));
    }

    #[test]
    fn unbalanced_delimiters_are_errors() {
        assert!(parse_links("<http://a/; rel=\"x\"").is_err());
        assert!(parse_links("<http://a/>; rel=\"x").is_err());
        assert!(parse_links("http://a/>; rel=x").is_err());
    }

    #[test]
    fn empty_body_has_no_links() {
        assert!(parse_links("  \n").unwrap().is_empty());
    }

    #[test]
    fn write_then_parse_round_trips() {
        let e = LinkEntry {
            uri: "http://a/".into(),
            params: vec![("rel".into(), "first memento".into()), ("x".into(), "q\"uote".into())],
        };
        assert_eq!(parse_links(&write_link(&e)).unwrap(), vec![e]);
    }
}
