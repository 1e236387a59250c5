//! Noun keywords from abstracts, scored with TF-IDF and kept as hb-edges.
//!
//! Nouns come from a small rule-based tagger: closed-class words, a verb
//! lexicon, non-noun suffixes and a few positional rules. Plural nouns are
//! reduced to their singular form. The word lists load from plain-text files
//! with one token per line; the bundled defaults live under `resources/`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::hbgraph::{HbGraph, HbGraphError};
use crate::mset::Multiset;
use crate::par::Exec;

const DEFAULT_STOPWORDS: &str = include_str!("../resources/stopwords.txt");
const DEFAULT_VERBS: &str = include_str!("../resources/verbs.txt");
const DEFAULT_SUFFIXES: &str = include_str!("../resources/non_noun_suffixes.txt");

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "our", "their", "its", "his", "her", "my", "your", "each",
    "every", "some", "any", "no", "such", "another",
];
const VERB_CUES: &[&str] = &[
    "to", "can", "could", "may", "might", "must", "shall", "should", "will", "would", "we", "they", "i", "you", "he",
    "she", "it", "also", "often", "then", "not",
];
/// Words the suffix rules would reject that are nouns in practice.
const NOUN_EXCEPTIONS: &[&str] = &[
    "thing",
    "string",
    "ring",
    "king",
    "bed",
    "seed",
    "speed",
    "need",
    "feed",
    "anything",
    "something",
    "nothing",
    "everything",
    "meaning",
    "learning",
    "training",
    "clustering",
    "computing",
    "programming",
    "engineering",
    "processing",
    "embedding",
    "encoding",
    "setting",
    "mapping",
    "building",
    "hypothesis",
];
const IRREGULAR_PLURALS: &[(&str, &str)] = &[
    ("children", "child"),
    ("people", "person"),
    ("men", "man"),
    ("women", "woman"),
    ("indices", "index"),
    ("vertices", "vertex"),
    ("matrices", "matrix"),
    ("analyses", "analysis"),
    ("hypotheses", "hypothesis"),
    ("theses", "thesis"),
    ("criteria", "criterion"),
    ("phenomena", "phenomenon"),
    ("mice", "mouse"),
    ("feet", "foot"),
];

/// Reduces a lowercase word to its singular form.
pub fn singularize(word: &str) -> String {
    if let Some(&(_, s)) = IRREGULAR_PLURALS.iter().find(|(p, _)| *p == word) {
        return s.to_owned();
    }
    let n = word.len();
    if n <= 3 {
        return word.to_owned();
    }
    if n > 4 && word.ends_with("ies") {
        return format!("{}y", &word[..n - 3]);
    }
    if word.ends_with("sses") || ["ches", "shes", "xes", "zzes"].iter().any(|s| word.ends_with(s)) {
        return word[..n - 2].to_owned();
    }
    if ["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
        return word.to_owned();
    }
    match word.strip_suffix('s') {
        Some(stem) => stem.to_owned(),
        None => word.to_owned(),
    }
}

fn load_list(text: &str) -> impl Iterator<Item = String> + '_ {
    text.lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Noun { plural: bool },
    Verb,
    Determiner,
    Cue,
    Other,
}

/// Deterministic heuristic part-of-speech tagger keeping nouns only.
#[derive(Debug, Clone)]
pub struct Tagger {
    stopwords: HashSet<String>,
    verbs: HashSet<String>,
    suffixes: Vec<String>,
}

impl Default for Tagger {
    fn default() -> Self {
        Self::from_lists(DEFAULT_STOPWORDS, DEFAULT_VERBS, DEFAULT_SUFFIXES)
    }
}

impl Tagger {
    /// Builds a tagger from the contents of three word lists.
    pub fn from_lists(stopwords: &str, verbs: &str, non_noun_suffixes: &str) -> Self {
        let mut suffixes: Vec<String> = load_list(non_noun_suffixes).collect();
        suffixes.sort_by_key(|s| std::cmp::Reverse(s.len()));
        Self {
            stopwords: load_list(stopwords).collect(),
            verbs: load_list(verbs).collect(),
            suffixes,
        }
    }

    pub fn from_files(
        stopwords: impl AsRef<Path>,
        verbs: impl AsRef<Path>,
        non_noun_suffixes: impl AsRef<Path>,
    ) -> std::io::Result<Self> {
        Ok(Self::from_lists(
            &std::fs::read_to_string(stopwords)?,
            &std::fs::read_to_string(verbs)?,
            &std::fs::read_to_string(non_noun_suffixes)?,
        ))
    }

    fn has_non_noun_suffix(&self, w: &str) -> bool {
        !NOUN_EXCEPTIONS.contains(&w)
            && self
                .suffixes
                .iter()
                .any(|s| w.len() >= s.len() + 3 && w.ends_with(s.as_str()))
    }

    fn tag(&self, w: &str, prev: Option<Tag>) -> Tag {
        if DETERMINERS.contains(&w) {
            return Tag::Determiner;
        }
        if VERB_CUES.contains(&w) {
            return Tag::Cue;
        }
        if self.stopwords.contains(w) || w.len() < 2 {
            return Tag::Other;
        }
        if prev == Some(Tag::Cue) {
            return Tag::Verb;
        }
        let after_determiner = prev == Some(Tag::Determiner);
        if !after_determiner && (self.verbs.contains(w) || self.verbs.contains(&singularize(w))) {
            return Tag::Verb;
        }
        if self.has_non_noun_suffix(w) {
            return Tag::Other;
        }
        let singular = singularize(w);
        let plural = singular != w;
        // a bare form right after a plural noun reads as its verb: "graphs model"
        if prev == Some(Tag::Noun { plural: true }) && !plural {
            return Tag::Verb;
        }
        Tag::Noun { plural }
    }

    /// Lowercased singular nouns of `text`, in order and with repetition.
    pub fn extract_nouns(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for sentence in text.split(['.', '!', '?', ';', ':']) {
            let mut prev = None;
            for word in sentence
                .split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '\''))
                .map(|w| w.trim_matches(|c| c == '-' || c == '\''))
                .filter(|w| !w.is_empty())
            {
                if !word.chars().all(|c| c.is_alphabetic() || c == '-' || c == '\'') {
                    prev = Some(Tag::Other);
                    continue;
                }
                let w = word.to_lowercase();
                let tag = self.tag(&w, prev);
                if let Tag::Noun { .. } = tag {
                    out.push(singularize(&w));
                }
                prev = Some(tag);
            }
        }
        out
    }
}

/// Nouns of `text` with the default tagger.
pub fn extract_nouns(text: &str) -> Vec<String> {
    Tagger::default().extract_nouns(text)
}

/// An abstract to score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// TF-IDF scores of one document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoredTerms {
    pub id: String,
    pub scores: BTreeMap<String, f64>,
}

/// Rounds to 9 decimal digits so equal scores compare equal regardless of
/// evaluation order.
pub fn round_score(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Relative term frequencies of a token list; they sum to 1 unless empty.
pub fn term_frequencies(tokens: &[String]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.clone()).or_default() += 1;
    }
    let total = tokens.len() as f64;
    counts.into_iter().map(|(t, c)| (t, c as f64 / total)).collect()
}

/// Scores pre-extracted noun lists: `tf = count / len`, `idf = ln(N / df)`.
pub fn tf_idf_tokens(docs: &[(String, Vec<String>)], exec: Exec) -> Vec<ScoredTerms> {
    let n = docs.len() as f64;
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, tokens) in docs {
        let distinct: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    exec.map(docs, |(id, tokens)| {
        let scores = term_frequencies(tokens)
            .into_iter()
            .map(|(t, tf)| {
                let idf = (n / df[t.as_str()] as f64).ln();
                let score = round_score(tf * idf);
                (t, score)
            })
            .collect();
        ScoredTerms { id: id.clone(), scores }
    })
}

pub fn tf_idf(docs: &[Document], tagger: &Tagger) -> Vec<ScoredTerms> {
    tf_idf_with(docs, tagger, Exec::default())
}

pub fn tf_idf_with(docs: &[Document], tagger: &Tagger, exec: Exec) -> Vec<ScoredTerms> {
    let tokens = exec.map(docs, |d| (d.id.clone(), tagger.extract_nouns(&d.text)));
    tf_idf_tokens(&tokens, exec)
}

/// The `w` best-scoring terms as a multiset weighted by score. Ties go to the
/// lexicographically smaller term; zero scores are never kept.
pub fn top_w(scored: &ScoredTerms, w: usize) -> Multiset {
    let mut terms: Vec<(&String, f64)> = scored
        .scores
        .iter()
        .filter(|(_, &s)| s > 0.0)
        .map(|(t, &s)| (t, s))
        .collect();
    terms.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Multiset::from_pairs(terms.into_iter().take(w).map(|(t, s)| (t.clone(), s)))
        .expect("tf-idf scores are finite and non-negative")
}

/// Keyword hb-graph: one hb-edge per document (edge id = document id) holding
/// its top-`w` terms.
pub fn keyword_hbgraph(docs: &[Document], w: usize, tagger: &Tagger) -> Result<HbGraph, HbGraphError> {
    let mut g = HbGraph::new();
    for scored in tf_idf(docs, tagger) {
        g.push_edge(scored.id.clone(), top_w(&scored, w))?;
    }
    Ok(g)
}
