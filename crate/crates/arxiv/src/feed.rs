//! Atom feed parsing for the Arxiv query API.

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::name::{Namespace, ResolveResult};
use quick_xml::NsReader;
use serde::{Deserialize, Serialize};

use crate::ArxivError;

const ATOM_NS: &[u8] = b"http://www.w3.org/2005/Atom";

/// One publication as returned by the API.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArxivEntry {
    /// Canonical id, e.g. `2101.00001v1`.
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub authors: Vec<String>,
    pub categories: Vec<String>,
    pub abs_url: String,
    pub pdf_url: Option<String>,
    pub published: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedFeed {
    pub entries: Vec<ArxivEntry>,
    /// Entries dropped because they had no usable id or repeated an earlier one.
    pub skipped: usize,
}

/// Strips the abstract-page prefix from an Atom id.
pub fn canonical_id(raw: &str) -> String {
    let raw = raw.trim();
    for prefix in [
        "http://arxiv.org/abs/",
        "https://arxiv.org/abs/",
        "http://export.arxiv.org/abs/",
        "https://export.arxiv.org/abs/",
    ] {
        if let Some(rest) = raw.strip_prefix(prefix) {
            return rest.to_owned();
        }
    }
    raw.to_owned()
}

/// Collapses runs of whitespace into single spaces and trims.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Default)]
struct EntryBuilder {
    id: String,
    title: String,
    summary: String,
    published: String,
    authors: Vec<String>,
    categories: Vec<String>,
    abs_url: Option<String>,
    pdf_url: Option<String>,
}

impl EntryBuilder {
    fn finish(self) -> Option<ArxivEntry> {
        let id = canonical_id(&self.id);
        if id.is_empty() {
            return None;
        }
        let abs_url = self.abs_url.unwrap_or_else(|| format!("http://arxiv.org/abs/{id}"));
        Some(ArxivEntry {
            id,
            title: normalize_whitespace(&self.title),
            abstract_text: normalize_whitespace(&self.summary),
            authors: self.authors,
            categories: self.categories,
            abs_url,
            pdf_url: self.pdf_url,
            published: self.published.trim().to_owned(),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Id,
    Title,
    Summary,
    Published,
    AuthorName,
}

fn attr(reader: &NsReader<&[u8]>, e: &BytesStart<'_>, name: &str) -> Result<Option<String>, ArxivError> {
    for a in e.attributes() {
        let a = a.map_err(|err| ArxivError::Feed(err.to_string()))?;
        let (ns, local) = reader.resolve_attribute(a.key);
        if matches!(ns, ResolveResult::Unbound) && local.as_ref() == name.as_bytes() {
            let v = a
                .decode_and_unescape_value(reader.decoder())
                .map_err(|err| ArxivError::Feed(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

/// Parses an Atom document. Entries without an id, or repeating an earlier
/// id, are skipped and counted.
pub fn parse_feed(bytes: &[u8]) -> Result<ParsedFeed, ArxivError> {
    let mut reader = NsReader::from_reader(bytes);
    let mut buf = Vec::new();
    let mut out = ParsedFeed::default();
    let mut saw_feed = false;

    let mut entry: Option<EntryBuilder> = None;
    let mut in_author = false;
    let mut field: Option<Field> = None;
    let mut depth_in_field = 0usize;

    loop {
        let (atom, event) = match reader.read_resolved_event_into(&mut buf) {
            Ok((ns, event)) => (matches!(ns, ResolveResult::Bound(Namespace(n)) if n == ATOM_NS), event),
            Err(e) => return Err(ArxivError::Feed(format!("{e} at byte {}", reader.buffer_position()))),
        };
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                if field.is_some() {
                    if !empty {
                        depth_in_field += 1;
                    }
                    buf.clear();
                    continue;
                }
                let local = e.local_name();
                let local = local.as_ref();
                if !atom {
                    buf.clear();
                    continue;
                }
                match (local, entry.as_mut()) {
                    (b"feed", None) => saw_feed = true,
                    (b"entry", None) if !empty => entry = Some(EntryBuilder::default()),
                    (b"entry", None) => out.skipped += 1,
                    (b"author", Some(_)) if !empty => in_author = true,
                    (b"name", Some(_)) if in_author && !empty => field = Some(Field::AuthorName),
                    (b"id", Some(_)) if !in_author && !empty => field = Some(Field::Id),
                    (b"title", Some(_)) if !in_author && !empty => field = Some(Field::Title),
                    (b"summary", Some(_)) if !empty => field = Some(Field::Summary),
                    (b"published", Some(_)) if !empty => field = Some(Field::Published),
                    (b"category", Some(b)) => {
                        if let Some(term) = attr(&reader, e, "term")? {
                            let term = term.trim().to_owned();
                            if !term.is_empty() {
                                b.categories.push(term);
                            }
                        }
                    }
                    (b"link", Some(b)) => {
                        let href = attr(&reader, e, "href")?;
                        let rel = attr(&reader, e, "rel")?;
                        let title = attr(&reader, e, "title")?;
                        if let Some(href) = href {
                            if title.as_deref() == Some("pdf") {
                                b.pdf_url = Some(href);
                            } else if rel.as_deref().unwrap_or("alternate") == "alternate" && b.abs_url.is_none() {
                                b.abs_url = Some(href);
                            }
                        }
                    }
                    _ => {}
                }
                if field == Some(Field::AuthorName) {
                    if let Some(b) = entry.as_mut() {
                        b.authors.push(String::new());
                    }
                }
            }
            Event::End(ref e) => {
                if field.is_some() {
                    if depth_in_field > 0 {
                        depth_in_field -= 1;
                    } else {
                        field = None;
                    }
                    buf.clear();
                    continue;
                }
                if atom {
                    match e.local_name().as_ref() {
                        b"author" => in_author = false,
                        b"entry" => {
                            if let Some(b) = entry.take() {
                                match b.finish() {
                                    Some(en) if !out.entries.iter().any(|x| x.id == en.id) => out.entries.push(en),
                                    _ => out.skipped += 1,
                                }
                            }
                            in_author = false;
                        }
                        _ => {}
                    }
                }
            }
            Event::Text(ref t) => {
                if let (Some(f), Some(b)) = (field, entry.as_mut()) {
                    let text = t.decode().map_err(|e| ArxivError::Feed(e.to_string()))?;
                    push_text(b, f, &text);
                }
            }
            Event::CData(ref t) => {
                if let (Some(f), Some(b)) = (field, entry.as_mut()) {
                    let text = t.decode().map_err(|e| ArxivError::Feed(e.to_string()))?;
                    push_text(b, f, &text);
                }
            }
            Event::GeneralRef(ref r) => {
                if let (Some(f), Some(b)) = (field, entry.as_mut()) {
                    let resolved = match r.resolve_char_ref().map_err(|e| ArxivError::Feed(e.to_string()))? {
                        Some(c) => c.to_string(),
                        None => {
                            let name = r.decode().map_err(|e| ArxivError::Feed(e.to_string()))?;
                            resolve_predefined_entity(&name)
                                .ok_or_else(|| ArxivError::Feed(format!("unknown entity `&{name};`")))?
                                .to_owned()
                        }
                    };
                    push_text(b, f, &resolved);
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if entry.is_some() {
        return Err(ArxivError::Feed("unexpected end of document inside entry".into()));
    }
    if !saw_feed {
        return Err(ArxivError::Feed("not an Atom feed".into()));
    }
    for e in &mut out.entries {
        for a in &mut e.authors {
            *a = normalize_whitespace(a);
        }
        e.authors.retain(|a| !a.is_empty());
    }
    Ok(out)
}

fn push_text(b: &mut EntryBuilder, f: Field, text: &str) {
    let target = match f {
        Field::Id => &mut b.id,
        Field::Title => &mut b.title,
        Field::Summary => &mut b.summary,
        Field::Published => &mut b.published,
        Field::AuthorName => match b.authors.last_mut() {
            Some(a) => a,
            None => return,
        },
    };
    target.push_str(text);
}
