//! Archive hits followed by live-web hits.

use std::collections::HashSet;

use super::index::{archive_result, SearchIndex};
use super::provider::LiveWebProvider;
use super::query::{QuerySpec, ResultSource, SearchPage, SearchResult, Snippet, Visibility};
use super::tokenize::{query_terms, tokenize_with_offsets};
use super::{Facet, SearchError};
use crate::urlnorm::normalize_url;

/// How many live results to request per query.
pub const LIVE_RESULT_LIMIT: usize = 50;

/// Runs the archive search, then appends live results whose normalized URL
/// is not among the archive hits. The combined list is paginated as a whole.
/// A failing provider degrades to archive-only results with a warning.
///
/// Live results carry no facets, so they are omitted while any facet filter
/// other than media type is active.
pub fn federated_search(
    q: &QuerySpec,
    index: &SearchIndex,
    visibility: &Visibility,
    provider: &dyn LiveWebProvider,
) -> Result<SearchPage, SearchError> {
    let (hits, facet_counts) = index.ranked(q, visibility)?;
    let terms = query_terms(&q.terms);
    let archive_urls: HashSet<String> = hits.iter().map(|h| h.entry.doc.url.clone()).collect();

    let mut warnings = Vec::new();
    let mut live_unavailable = false;
    let mut live = Vec::new();
    let facet_filtered = q.filters.keys().any(|f| *f != Facet::MediaType);
    if !terms.is_empty() && !facet_filtered {
        match provider.search(&q.terms, q.media_type, LIVE_RESULT_LIMIT) {
            Ok(results) => {
                let mut seen = HashSet::new();
                for r in results {
                    let Ok(norm) = normalize_url(&r.url) else {
                        continue;
                    };
                    if archive_urls.contains(&norm) || !seen.insert(norm) {
                        continue;
                    }
                    live.push(r);
                }
            }
            Err(e) => {
                live_unavailable = true;
                warnings.push(e.to_string());
            }
        }
    }

    let archive_count = hits.len();
    let total = archive_count + live.len();
    let offset = q.offset();
    let mut results: Vec<SearchResult> = hits
        .into_iter()
        .skip(offset)
        .take(q.page_size)
        .map(|h| archive_result(h, &terms))
        .collect();
    let live_skip = offset.saturating_sub(archive_count);
    let room = q.page_size - results.len();
    results.extend(live.into_iter().skip(live_skip).take(room).map(|r| {
        let highlights = tokenize_with_offsets(&r.snippet)
            .into_iter()
            .filter(|(t, _, _)| terms.contains(t))
            .map(|(_, s, e)| (s, e))
            .collect();
        SearchResult {
            source: ResultSource::LiveWeb {
                url: r.url,
                title: r.title,
            },
            score: 0.0,
            score_components: Vec::new(),
            snippet: (!r.snippet.is_empty()).then(|| Snippet {
                field: "snippet".into(),
                text: r.snippet,
                highlights,
            }),
        }
    }));

    Ok(SearchPage {
        results,
        facet_counts,
        total,
        page: q.page,
        page_size: q.page_size,
        live_unavailable,
        warnings,
    })
}
