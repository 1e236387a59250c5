//! Boolean queries: AST, parser, canonical printer, translation to the Arxiv
//! `search_query` syntax, and the query-history hb-graph.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or      := and ("OR" and)*
//! and     := unary ("AND" unary)*
//! unary   := "NOT" unary | primary
//! primary := WORD | "\"" WORD+ "\"" | "(" or ")"
//! ```
//!
//! Operators are case-sensitive. Two operands with no operator between them
//! are rejected.

use std::collections::BTreeMap;
use std::fmt;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hbgraph::HbGraph;
use crate::mset::Multiset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Query {
    Term(String),
    Phrase(Vec<String>),
    And(Box<Query>, Box<Query>),
    Or(Box<Query>, Box<Query>),
    Not(Box<Query>),
    Group(Box<Query>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnbalancedParen,
    DanglingOperator,
    UnterminatedQuote,
    MissingOperator,
    ExpectedOperand,
    EmptyPhrase,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Empty => "empty query",
            ParseErrorKind::UnbalancedParen => "unbalanced parenthesis",
            ParseErrorKind::DanglingOperator => "dangling operator",
            ParseErrorKind::UnterminatedQuote => "unterminated quote",
            ParseErrorKind::MissingOperator => "missing operator between terms",
            ParseErrorKind::ExpectedOperand => "expected a term",
            ParseErrorKind::EmptyPhrase => "empty phrase",
        })
    }
}

/// A parse failure at a byte offset of the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid word `{0}`")]
    InvalidWord(String),
    #[error("unsupported top-level NOT")]
    TopLevelNot,
    #[error("unsupported NOT in `{0}`: only `x AND NOT y` translates")]
    UnsupportedNot(String),
}

const OPERATORS: [&str; 3] = ["AND", "OR", "NOT"];

fn is_word_char(c: char) -> bool {
    !(c.is_whitespace() || c == '(' || c == ')' || c == '"')
}

fn valid_word(w: &str) -> bool {
    !w.is_empty() && w.chars().all(is_word_char)
}

impl Query {
    /// A single word; rejects operator keywords and reserved characters.
    pub fn term(word: impl Into<String>) -> Result<Self, QueryError> {
        let word = word.into();
        if valid_word(&word) && !OPERATORS.contains(&word.as_str()) {
            Ok(Query::Term(word))
        } else {
            Err(QueryError::InvalidWord(word))
        }
    }

    pub fn phrase<I, S>(words: I) -> Result<Self, QueryError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        if words.is_empty() {
            return Err(QueryError::InvalidWord(String::new()));
        }
        if let Some(w) = words.iter().find(|w| !valid_word(w)) {
            return Err(QueryError::InvalidWord(w.clone()));
        }
        Ok(Query::Phrase(words))
    }

    pub fn and(self, other: Query) -> Self {
        Query::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Query) -> Self {
        Query::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Query::Not(Box::new(self))
    }

    pub fn group(self) -> Self {
        Query::Group(Box::new(self))
    }

    /// Removes every `Group` node.
    pub fn normalize(&self) -> Query {
        match self {
            Query::Group(q) => q.normalize(),
            Query::Term(_) | Query::Phrase(_) => self.clone(),
            Query::And(a, b) => a.normalize().and(b.normalize()),
            Query::Or(a, b) => a.normalize().or(b.normalize()),
            Query::Not(q) => q.normalize().not(),
        }
    }

    fn strip_groups(&self) -> &Query {
        match self {
            Query::Group(q) => q.strip_groups(),
            q => q,
        }
    }

    /// Fully parenthesised canonical form.
    pub fn print(&self) -> String {
        self.to_string()
    }

    /// Occurrences of each term or phrase (phrase words joined by a space).
    pub fn term_counts(&self) -> Multiset {
        fn walk(q: &Query, out: &mut Vec<String>) {
            match q {
                Query::Term(t) => out.push(t.clone()),
                Query::Phrase(ws) => out.push(ws.join(" ")),
                Query::And(a, b) | Query::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Query::Not(q) | Query::Group(q) => walk(q, out),
            }
        }
        let mut items = Vec::new();
        walk(self, &mut items);
        Multiset::from_items(items)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Term(t) => f.write_str(t),
            Query::Phrase(ws) => write!(f, "\"{}\"", ws.join(" ")),
            Query::And(a, b) => write!(f, "({a} AND {b})"),
            Query::Or(a, b) => write!(f, "({a} OR {b})"),
            Query::Not(q) => write!(f, "(NOT {q})"),
            Query::Group(q) => write!(f, "{q}"),
        }
    }
}

impl std::str::FromStr for Query {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Phrase(Vec<String>),
    LParen,
    RParen,
    And,
    Or,
    Not,
}

impl Tok {
    fn is_operator(&self) -> bool {
        matches!(self, Tok::And | Tok::Or | Tok::Not)
    }
}

fn err(kind: ParseErrorKind, offset: usize) -> ParseError {
    ParseError { kind, offset }
}

fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push((Tok::LParen, i));
        } else if c == ')' {
            chars.next();
            out.push((Tok::RParen, i));
        } else if c == '"' {
            chars.next();
            let start = i + 1;
            let end = loop {
                match chars.next() {
                    Some((j, '"')) => break j,
                    Some(_) => {}
                    None => return Err(err(ParseErrorKind::UnterminatedQuote, i)),
                }
            };
            let words: Vec<String> = input[start..end].split_whitespace().map(str::to_owned).collect();
            if words.is_empty() {
                return Err(err(ParseErrorKind::EmptyPhrase, i));
            }
            out.push((Tok::Phrase(words), i));
        } else {
            let mut end = input.len();
            while let Some(&(j, c)) = chars.peek() {
                if !is_word_char(c) {
                    end = j;
                    break;
                }
                chars.next();
            }
            let tok = match &input[i..end] {
                "AND" => Tok::And,
                "OR" => Tok::Or,
                "NOT" => Tok::Not,
                w => Tok::Word(w.to_owned()),
            };
            out.push((tok, i));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn previous(&self) -> Option<&(Tok, usize)> {
        self.pos.checked_sub(1).and_then(|p| self.toks.get(p))
    }

    fn parse_or(&mut self) -> Result<Query, ParseError> {
        let mut left = self.parse_and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            left = left.or(self.parse_and()?);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Query, ParseError> {
        let mut left = self.parse_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            left = left.and(self.parse_unary()?);
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Query, ParseError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(self.parse_unary()?.not());
        }
        self.parse_primary()
    }

    /// Error for a missing operand at the current position.
    fn missing_operand(&self) -> ParseError {
        let prev = self.previous();
        match self.toks.get(self.pos) {
            None => match prev {
                Some((Tok::LParen, at)) => err(ParseErrorKind::UnbalancedParen, *at),
                Some((t, _)) if t.is_operator() => err(ParseErrorKind::DanglingOperator, self.len),
                _ => err(ParseErrorKind::ExpectedOperand, self.len),
            },
            Some((Tok::RParen, at)) => match prev {
                Some((t, _)) if t.is_operator() => err(ParseErrorKind::DanglingOperator, *at),
                Some((Tok::LParen, _)) => err(ParseErrorKind::ExpectedOperand, *at),
                _ => err(ParseErrorKind::UnbalancedParen, *at),
            },
            Some((_, at)) => err(ParseErrorKind::DanglingOperator, *at),
        }
    }

    fn parse_primary(&mut self) -> Result<Query, ParseError> {
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Word(w), _)) => {
                self.pos += 1;
                Ok(Query::Term(w))
            }
            Some((Tok::Phrase(ws), _)) => {
                self.pos += 1;
                Ok(Query::Phrase(ws))
            }
            Some((Tok::LParen, open)) => {
                self.pos += 1;
                let inner = self.parse_or()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    Ok(inner.group())
                } else if self.peek().is_none() {
                    Err(err(ParseErrorKind::UnbalancedParen, open))
                } else {
                    Err(err(ParseErrorKind::MissingOperator, self.toks[self.pos].1))
                }
            }
            _ => Err(self.missing_operand()),
        }
    }
}

/// Parses a query string; errors carry the byte offset of the problem.
pub fn parse(input: &str) -> Result<Query, ParseError> {
    let toks = tokenize(input)?;
    if toks.is_empty() {
        return Err(err(ParseErrorKind::Empty, 0));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        len: input.len(),
    };
    let q = p.parse_or()?;
    match p.toks.get(p.pos) {
        None => Ok(q),
        Some((Tok::RParen, at)) => Err(err(ParseErrorKind::UnbalancedParen, *at)),
        Some((_, at)) => Err(err(ParseErrorKind::MissingOperator, *at)),
    }
}

/// How a clicked vertex joins the current query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Combinator {
    And,
    Or,
    #[serde(rename = "ANDNOT")]
    AndNot,
}

pub fn combine(current: Query, op: Combinator, addition: Query) -> Query {
    match op {
        Combinator::And => current.and(addition),
        Combinator::Or => current.or(addition),
        Combinator::AndNot => current.and(addition.not()),
    }
}

/// Characters left bare inside a term.
const TERM_SAFE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

fn encode_word(w: &str) -> String {
    utf8_percent_encode(w, TERM_SAFE).to_string()
}

/// Translates to the Arxiv `search_query` syntax. `NOT` only translates as
/// the right operand of `AND`, which becomes the binary `ANDNOT`.
pub fn to_external_query(q: &Query) -> Result<String, QueryError> {
    fn go(q: &Query, root: bool) -> Result<String, QueryError> {
        match q {
            Query::Group(inner) => go(inner, root),
            Query::Term(t) => Ok(format!("all:{}", encode_word(t))),
            Query::Phrase(ws) => Ok(format!(
                "all:%22{}%22",
                ws.iter().map(|w| encode_word(w)).collect::<Vec<_>>().join("+")
            )),
            Query::And(a, b) => match b.strip_groups() {
                Query::Not(negated) => Ok(format!("({} ANDNOT {})", go(a, false)?, go(negated, false)?)),
                _ => Ok(format!("({} AND {})", go(a, false)?, go(b, false)?)),
            },
            Query::Or(a, b) => Ok(format!("({} OR {})", go(a, false)?, go(b, false)?)),
            Query::Not(_) if root => Err(QueryError::TopLevelNot),
            Query::Not(_) => Err(QueryError::UnsupportedNot(q.print())),
        }
    }
    go(q, true)
}

/// One executed query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub id: String,
    /// Unix time in milliseconds.
    pub ts: u64,
    /// Canonical printed form.
    pub query: String,
    pub entries: BTreeMap<String, f64>,
}

/// Executed queries as an hb-graph over terms: one hb-edge per query whose
/// multiplicities count term occurrences.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryHistory {
    namespace: String,
    records: Vec<HistoryRecord>,
    graph: HbGraph,
}

impl QueryHistory {
    /// Empty history; `namespace` prefixes this history's edge ids when it is
    /// merged into another one.
    pub fn new(namespace: impl Into<String>) -> Self {
        Self {
            namespace: namespace.into(),
            ..Self::default()
        }
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn graph(&self) -> &HbGraph {
        &self.graph
    }

    pub fn records(&self) -> &[HistoryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn fresh_id(&self, base: &str) -> String {
        if self.graph.edge(base).is_none() {
            return base.to_owned();
        }
        (1..)
            .map(|k| format!("{base}~{k}"))
            .find(|id| self.graph.edge(id).is_none())
            .expect("unbounded suffixes")
    }

    fn push(&mut self, record: HistoryRecord) {
        let edge = Multiset::from_pairs(record.entries.clone()).expect("counts are positive");
        self.graph
            .push_edge(record.id.clone(), edge)
            .expect("record ids are fresh");
        self.records.push(record);
    }

    /// Records an executed query; returns the new edge id.
    pub fn append(&mut self, query: &Query, ts_millis: u64) -> String {
        let id = self.fresh_id(&format!("q{ts_millis}"));
        self.push(HistoryRecord {
            id: id.clone(),
            ts: ts_millis,
            query: query.print(),
            entries: query.term_counts().entries().clone(),
        });
        id
    }

    /// Appends every query of `other`. Its ids gain `other`'s namespace as a
    /// prefix (when not already namespaced) and a `~k` suffix on collision.
    pub fn merge(&mut self, other: &QueryHistory) {
        for r in &other.records {
            let base = if other.namespace.is_empty() || r.id.contains('/') {
                r.id.clone()
            } else {
                format!("{}/{}", other.namespace, r.id)
            };
            let mut r = r.clone();
            r.id = self.fresh_id(&base);
            self.push(r);
        }
    }

    /// JSON lines, one record per line.
    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }

    pub fn from_jsonl(namespace: impl Into<String>, text: &str) -> Result<Self, serde_json::Error> {
        let mut h = QueryHistory::new(namespace);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let r: HistoryRecord = serde_json::from_str(line)?;
            h.add_record(r).map_err(serde::de::Error::custom)?;
        }
        Ok(h)
    }

    fn add_record(&mut self, r: HistoryRecord) -> Result<(), String> {
        if self.graph.edge(&r.id).is_some() {
            return Err(format!("duplicate history id `{}`", r.id));
        }
        Multiset::from_pairs(r.entries.clone()).map_err(|e| e.to_string())?;
        self.push(r);
        Ok(())
    }
}

impl Serialize for QueryHistory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QueryHistory", 3)?;
        st.serialize_field("namespace", &self.namespace)?;
        st.serialize_field("hbgraph", &self.graph)?;
        st.serialize_field("queries", &self.records)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for QueryHistory {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            namespace: String,
            queries: Vec<HistoryRecord>,
        }
        let raw = Raw::deserialize(d)?;
        let mut h = QueryHistory::new(raw.namespace);
        for r in raw.queries {
            h.add_record(r).map_err(serde::de::Error::custom)?;
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(w: &str) -> Query {
        Query::term(w).unwrap()
    }

    fn perr(input: &str) -> ParseError {
        parse(input).unwrap_err()
    }

    #[test]
    fn parses_grouped_query() {
        assert_eq!(
            parse("graph AND (mining OR search)").unwrap(),
            t("graph").and(t("mining").or(t("search")).group())
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("NOT a OR b").unwrap(), t("a").not().or(t("b")));
        assert_eq!(parse("a OR b AND c").unwrap(), t("a").or(t("b").and(t("c"))));
        assert_eq!(parse("NOT a AND b").unwrap(), t("a").not().and(t("b")));
        assert_eq!(parse("a AND b AND c").unwrap(), t("a").and(t("b")).and(t("c")));
        assert_eq!(parse("NOT NOT a").unwrap(), t("a").not().not());
    }

    #[test]
    fn phrases_and_lowercase_operators() {
        assert_eq!(
            parse("\"deep  learning\" AND and").unwrap(),
            Query::phrase(["deep", "learning"]).unwrap().and(t("and"))
        );
    }

    #[test]
    fn error_positions() {
        assert_eq!(perr("a AND"), err(ParseErrorKind::DanglingOperator, 5));
        assert_eq!(perr("AND x"), err(ParseErrorKind::DanglingOperator, 0));
        assert_eq!(perr("a AND OR b"), err(ParseErrorKind::DanglingOperator, 6));
        assert_eq!(perr(""), err(ParseErrorKind::Empty, 0));
        assert_eq!(perr("   "), err(ParseErrorKind::Empty, 0));
        assert_eq!(perr("(a OR b"), err(ParseErrorKind::UnbalancedParen, 0));
        assert_eq!(perr("a OR b)"), err(ParseErrorKind::UnbalancedParen, 6));
        assert_eq!(perr("("), err(ParseErrorKind::UnbalancedParen, 0));
        assert_eq!(perr("()"), err(ParseErrorKind::ExpectedOperand, 1));
        assert_eq!(perr("(a AND)"), err(ParseErrorKind::DanglingOperator, 6));
        assert_eq!(perr("a \"open"), err(ParseErrorKind::UnterminatedQuote, 2));
        assert_eq!(perr("a b"), err(ParseErrorKind::MissingOperator, 2));
        assert_eq!(perr("(a b)"), err(ParseErrorKind::MissingOperator, 3));
        assert_eq!(perr("a \"\""), err(ParseErrorKind::EmptyPhrase, 2));
        assert_eq!(perr("a NOT b"), err(ParseErrorKind::MissingOperator, 2));
        assert_eq!(perr("a AND").to_string(), "dangling operator at offset 5");
    }

    #[test]
    fn canonical_printing() {
        assert_eq!(t("a").and(t("b").or(t("c"))).print(), "(a AND (b OR c))");
        assert_eq!(
            Query::phrase(["deep", "learning"]).unwrap().print(),
            "\"deep learning\""
        );
        assert_eq!(t("a").not().print(), "(NOT a)");
        assert_eq!(t("a").group().print(), "a");
    }

    #[test]
    fn term_validation() {
        assert!(Query::term("AND").is_err());
        assert!(Query::term("a b").is_err());
        assert!(Query::term("a(").is_err());
        assert!(Query::term("").is_err());
        assert!(Query::phrase(Vec::<String>::new()).is_err());
        assert!(Query::phrase(["ok", "no\"pe"]).is_err());
    }

    #[test]
    fn combinations() {
        assert_eq!(combine(t("a"), Combinator::And, t("b")), t("a").and(t("b")));
        assert_eq!(combine(t("a"), Combinator::Or, t("b")), t("a").or(t("b")));
        assert_eq!(combine(t("a"), Combinator::AndNot, t("b")), t("a").and(t("b").not()));
        let chained = combine(combine(t("a"), Combinator::And, t("b")), Combinator::Or, t("c"));
        assert_eq!(chained, t("a").and(t("b")).or(t("c")));
        assert_eq!(chained.print(), "((a AND b) OR c)");
    }

    #[test]
    fn external_translation() {
        assert_eq!(to_external_query(&t("graph")).unwrap(), "all:graph");
        assert_eq!(
            to_external_query(&t("a").and(t("b").not())).unwrap(),
            "(all:a ANDNOT all:b)"
        );
        assert_eq!(
            to_external_query(&Query::phrase(["deep", "learning"]).unwrap()).unwrap(),
            "all:%22deep+learning%22"
        );
        assert_eq!(
            to_external_query(&parse("graph AND (mining OR search)").unwrap()).unwrap(),
            "(all:graph AND (all:mining OR all:search))"
        );
        assert_eq!(
            to_external_query(&parse("a AND (NOT b)").unwrap()).unwrap(),
            "(all:a ANDNOT all:b)"
        );
        assert_eq!(to_external_query(&t("c++")).unwrap(), "all:c%2B%2B");
        assert_eq!(to_external_query(&t("a").not()), Err(QueryError::TopLevelNot));
        assert_eq!(
            to_external_query(&t("a").not()).unwrap_err().to_string(),
            "unsupported top-level NOT"
        );
        assert_eq!(
            to_external_query(&t("a").not().or(t("b"))),
            Err(QueryError::UnsupportedNot("(NOT a)".into()))
        );
    }

    #[test]
    fn history_append_counts_terms() {
        let mut h = QueryHistory::new("s1");
        let id = h.append(&parse("a AND (b OR a)").unwrap(), 1000);
        assert_eq!(id, "q1000");
        let e = h.graph().edge(&id).unwrap();
        assert_eq!(e, &Multiset::from_pairs([("a", 2.0), ("b", 1.0)]).unwrap());
        assert_eq!(h.records()[0].query, "(a AND (b OR a))");
        assert_eq!(h.append(&t("a"), 1000), "q1000~1");
    }

    #[test]
    fn history_merge() {
        let mut h = QueryHistory::new("s1");
        h.append(&t("a"), 1);
        let before = h.clone();
        h.merge(&QueryHistory::new("s2"));
        assert_eq!(h, before);

        let mut other = QueryHistory::new("s2");
        other.append(&t("b"), 1);
        other.append(&t("c"), 2);
        h.merge(&other);
        assert_eq!(h.len(), 3);
        assert_eq!(h.graph().edge_ids().collect::<Vec<_>>(), vec!["q1", "s2/q1", "s2/q2"]);
        h.merge(&other);
        assert_eq!(h.graph().edge_ids().last(), Some("s2/q2~1"));
    }

    #[test]
    fn history_jsonl_round_trip() {
        let mut h = QueryHistory::new("s");
        h.append(&parse("graph AND \"deep learning\"").unwrap(), 42);
        let text = h.to_jsonl();
        assert_eq!(
            text,
            "{\"id\":\"q42\",\"ts\":42,\"query\":\"(graph AND \\\"deep learning\\\")\",\"entries\":{\"deep learning\":1.0,\"graph\":1.0}}\n"
        );
        assert_eq!(QueryHistory::from_jsonl("s", &text).unwrap(), h);
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<QueryHistory>(&json).unwrap(), h);
    }

    fn arb_word() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9+.-]{0,5}"
    }

    fn arb_query() -> impl Strategy<Value = Query> {
        let leaf = prop_oneof![
            arb_word().prop_map(Query::Term),
            prop::collection::vec(arb_word(), 1..3).prop_map(Query::Phrase),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                inner.clone().prop_map(Query::not),
                inner.prop_map(Query::group),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(q in arb_query()) {
            let back = parse(&q.print()).unwrap();
            prop_assert_eq!(back.normalize(), q.normalize());
        }

        #[test]
        fn merge_preserves_edge_multisets(a in 0u64..4, b in 0u64..4) {
            let mut h1 = QueryHistory::new("x");
            let mut h2 = QueryHistory::new("y");
            for i in 0..a { h1.append(&Query::Term(format!("t{i}")), i); }
            for i in 0..b { h2.append(&Query::Term(format!("t{i}")), i); }
            let mut merged = h1.clone();
            merged.merge(&h2);
            prop_assert_eq!(merged.len() as u64, a + b);
            let edges: Vec<_> = merged.graph().edges().map(|(_, e)| e.clone()).collect();
            let expected: Vec<_> = h1.graph().edges().chain(h2.graph().edges()).map(|(_, e)| e.clone()).collect();
            prop_assert_eq!(edges, expected);
        }
    }
}
