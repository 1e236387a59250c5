//! Multisets over string-keyed elements with non-negative real multiplicities.
//!
//! An element absent from the entry map has multiplicity zero; zero entries are
//! never stored, so structural equality is extensional equality.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MsetError {
    #[error("multiplicity of `{element}` must be finite and non-negative, got {value}")]
    InvalidMultiplicity { element: String, value: f64 },
}

/// A multiset `{x^m(x)}` with an implicit universe: every element not stored
/// has multiplicity zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMultiset")]
pub struct Multiset {
    entries: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawMultiset {
    entries: BTreeMap<String, f64>,
}

impl TryFrom<RawMultiset> for Multiset {
    type Error = MsetError;

    fn try_from(raw: RawMultiset) -> Result<Self, Self::Error> {
        Multiset::from_pairs(raw.entries)
    }
}

fn check(element: &str, value: f64) -> Result<(), MsetError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(MsetError::InvalidMultiplicity {
            element: element.to_owned(),
            value,
        })
    }
}

impl Multiset {
    pub const EMPTY: Multiset = Multiset {
        entries: BTreeMap::new(),
    };

    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a multiset from `(element, multiplicity)` pairs. Repeated elements
    /// accumulate; zero multiplicities are dropped.
    pub fn from_pairs<I, K>(pairs: I) -> Result<Self, MsetError>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<String>,
    {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            let k = k.into();
            check(&k, v)?;
            if v > 0.0 {
                *entries.entry(k).or_insert(0.0) += v;
            }
        }
        Ok(Self { entries })
    }

    /// Natural multiset counting each occurrence of an item once.
    pub fn from_items<I, K>(items: I) -> Self
    where
        I: IntoIterator<Item = K>,
        K: Into<String>,
    {
        let mut entries = BTreeMap::new();
        for k in items {
            *entries.entry(k.into()).or_insert(0.0) += 1.0;
        }
        Self { entries }
    }

    pub fn multiplicity(&self, element: &str) -> f64 {
        self.entries.get(element).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, element: &str) -> bool {
        self.entries.contains_key(element)
    }

    pub fn support(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }

    /// Support elements in ascending order, without allocating a set.
    pub fn elements(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn entries(&self) -> &BTreeMap<String, f64> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Size of the support.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Sum of all multiplicities.
    pub fn cardinality(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn max_multiplicity(&self) -> f64 {
        self.entries.values().copied().fold(0.0, f64::max)
    }

    /// Pointwise sum of multiplicities.
    pub fn additive_union(&self, other: &Multiset) -> Multiset {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Multiset) {
        for (k, v) in &other.entries {
            *self.entries.entry(k.clone()).or_insert(0.0) += v;
        }
    }

    /// Additive union of a whole family, folded left to right.
    pub fn sum<'a, I>(family: I) -> Multiset
    where
        I: IntoIterator<Item = &'a Multiset>,
    {
        let mut out = Multiset::new();
        for m in family {
            out.add_assign(m);
        }
        out
    }

    /// True iff every multiplicity is a non-negative integer.
    pub fn is_natural(&self) -> bool {
        self.entries.values().all(|v| v.fract() == 0.0)
    }

    /// Natural with every multiplicity in {0, 1}.
    pub fn is_set(&self) -> bool {
        self.entries.values().all(|&v| v == 1.0)
    }

    /// Exact equality on supports and multiplicities.
    pub fn mset_equal(&self, other: &Multiset) -> bool {
        self == other
    }

    /// Hashable key that is equal for two multisets iff they are mset-equal.
    pub(crate) fn canonical_key(&self) -> Vec<(String, u64)> {
        self.entries.iter().map(|(k, v)| (k.clone(), v.to_bits())).collect()
    }
}

impl<'a> IntoIterator for &'a Multiset {
    type Item = (&'a String, &'a f64);
    type IntoIter = std::collections::btree_map::Iter<'a, String, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
