//! Filling empty seed metadata from the seed's HTML page.

use scraper::{Html, Selector};

use super::adapter::SeedSourceRecord;

/// Fills an empty title from `<title>`, an empty language from the root
/// element's `lang`, and empty subjects from `<meta name="keywords">`.
/// Non-empty fields are left alone.
pub fn apply_html_meta_fallback(mut seed: SeedSourceRecord, html: Option<&[u8]>) -> SeedSourceRecord {
    let needs_title = seed.title.trim().is_empty();
    let needs_lang = seed.language.trim().is_empty();
    let needs_subjects = seed.subjects.iter().all(|s| s.trim().is_empty());
    if !(needs_title || needs_lang || needs_subjects) {
        return seed;
    }
    let Some(text) = html.and_then(|b| std::str::from_utf8(b).ok()) else {
        return seed;
    };
    let doc = Html::parse_document(text);

    if needs_title {
        let sel = Selector::parse("title").expect("static selector");
        if let Some(title) = doc.select(&sel).next() {
            let t = title.text().collect::<String>();
            let t = t.split_whitespace().collect::<Vec<_>>().join(" ");
            if !t.is_empty() {
                seed.title = t;
            }
        }
    }
    if needs_lang {
        if let Some(lang) = doc.root_element().value().attr("lang") {
            let lang = lang.trim();
            if !lang.is_empty() {
                seed.language = lang.to_owned();
            }
        }
    }
    if needs_subjects {
        let sel = Selector::parse("meta[name]").expect("static selector");
        let keywords = doc
            .select(&sel)
            .find(|m| m.value().attr("name").is_some_and(|n| n.eq_ignore_ascii_case("keywords")))
            .and_then(|m| m.value().attr("content"));
        if let Some(content) = keywords {
            let subjects: Vec<String> = content
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect();
            if !subjects.is_empty() {
                seed.subjects = subjects;
            }
        }
    }
    seed
}
