//! Arxiv ingestion: query the export API, parse its Atom feed and turn
//! entries into physical entities for faceted navigation.

mod client;
mod feed;

use std::collections::BTreeSet;

use dataedron_core::keyword::{tf_idf, top_w, Document, Tagger};
use dataedron_core::{Multiset, PhysicalEntity};
use thiserror::Error;

pub use client::{
    encode_search_query, fixture_slug, query_url, ArxivClient, Clock, FixtureTransport, HttpTransport, MockClock,
    RateLimiter, Response, SystemClock, Transport, TransportError, DEFAULT_ENDPOINT, MAX_RETRIES, MIN_INTERVAL,
};
pub use feed::{canonical_id, normalize_whitespace, parse_feed, ArxivEntry, ParsedFeed};

pub const PUBID: &str = "pubid";
pub const AUTHORS: &str = "authors";
pub const KEYWORDS: &str = "keywords";
pub const CATEGORIES: &str = "categories";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArxivError {
    #[error("network failure after {attempts} attempts: {message}")]
    Network { attempts: u32, message: String },
    #[error("upstream returned HTTP {0}")]
    Status(u16),
    #[error("malformed feed: {0}")]
    Feed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Builds one entity per entry. Keyword scores are computed over the whole
/// batch, so the result depends on every entry passed in.
pub fn to_entities(entries: &[ArxivEntry], w: usize, tagger: &Tagger) -> Vec<PhysicalEntity> {
    let mut seen = BTreeSet::new();
    let entries: Vec<&ArxivEntry> = entries.iter().filter(|e| seen.insert(e.id.as_str())).collect();
    let docs: Vec<Document> = entries
        .iter()
        .map(|e| Document::new(e.id.clone(), e.abstract_text.clone()))
        .collect();
    let scored = tf_idf(&docs, tagger);
    entries
        .iter()
        .zip(scored)
        .map(|(e, s)| {
            PhysicalEntity::new(e.id.clone())
                .with(PUBID, Multiset::from_items([e.id.as_str()]))
                .with(AUTHORS, Multiset::from_items(e.authors.iter().map(String::as_str)))
                .with(
                    CATEGORIES,
                    Multiset::from_items(e.categories.iter().map(String::as_str)),
                )
                .with(KEYWORDS, top_w(&s, w))
        })
        .collect()
}

/// Splits text into sentences on `.`, `!` and `?` followed by whitespace.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if matches!(b, b'.' | b'!' | b'?') && bytes.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()) {
            let s = text[start..=i].trim();
            if !s.is_empty() {
                out.push(s);
            }
            start = i + 1;
        }
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

/// First sentence of `abstract_text` mentioning any query term as a whole
/// word (case-insensitive), else the first sentence.
pub fn contextual_sentence(abstract_text: &str, terms: &[String]) -> String {
    let terms: Vec<String> = terms.iter().map(|t| t.to_lowercase()).collect();
    let all = sentences(abstract_text);
    let hit = all.iter().find(|s| {
        let lower = s.to_lowercase();
        let words: Vec<&str> = lower.split(|c: char| !c.is_alphanumeric()).collect();
        terms.iter().any(|t| {
            let parts: Vec<&str> = t
                .split(|c: char| !c.is_alphanumeric())
                .filter(|p| !p.is_empty())
                .collect();
            !parts.is_empty() && words.windows(parts.len()).any(|w| w == parts.as_slice())
        })
    });
    hit.or(all.first()).map(|s| s.to_string()).unwrap_or_default()
}
