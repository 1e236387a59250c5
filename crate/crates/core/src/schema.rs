//! Metadata-level hypergraphs over type names and the navigation context that
//! fixes a reference type.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("reference candidate `{0}` is not in the reachability hyperedge")]
    CandidateOutsideEdge(String),
    #[error("reference type `{0}` is not a reference candidate")]
    NotACandidate(String),
    #[error("no reference candidates declared")]
    NoCandidates,
    #[error("reference `{0}` leaves no visualisation type")]
    NoVisualisationTypes(String),
    #[error("no physical reference type declared")]
    MissingPhysicalReference,
}

/// Hypergraph over type names. Hyperedges are non-empty and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SchemaHypergraph {
    types: BTreeSet<String>,
    edges: Vec<BTreeSet<String>>,
}

impl SchemaHypergraph {
    /// Empty and repeated hyperedges are dropped; every type mentioned by an
    /// edge must be declared.
    pub fn new<T, E, S>(types: T, edges: E) -> Result<Self, SchemaError>
    where
        T: IntoIterator<Item = S>,
        E: IntoIterator<Item = Vec<S>>,
        S: Into<String>,
    {
        let types: BTreeSet<String> = types.into_iter().map(Into::into).collect();
        let mut out: Vec<BTreeSet<String>> = Vec::new();
        for e in edges {
            let e: BTreeSet<String> = e.into_iter().map(Into::into).collect();
            if let Some(t) = e.iter().find(|t| !types.contains(*t)) {
                return Err(SchemaError::UnknownType(t.clone()));
            }
            if !e.is_empty() && !out.contains(&e) {
                out.push(e);
            }
        }
        Ok(Self { types, edges: out })
    }

    pub fn types(&self) -> &BTreeSet<String> {
        &self.types
    }

    pub fn edges(&self) -> &[BTreeSet<String>] {
        &self.edges
    }

    /// Restricts to the types of interest: every hyperedge is intersected with
    /// `interest`, empty intersections are dropped and equal ones merged.
    pub fn extract(&self, interest: &BTreeSet<String>) -> Result<Self, SchemaError> {
        if let Some(t) = interest.iter().find(|t| !self.types.contains(*t)) {
            return Err(SchemaError::UnknownType(t.clone()));
        }
        let mut edges: Vec<BTreeSet<String>> = Vec::new();
        for e in &self.edges {
            let cut: BTreeSet<String> = e.intersection(interest).cloned().collect();
            if !cut.is_empty() && !edges.contains(&cut) {
                edges.push(cut);
            }
        }
        Ok(Self {
            types: interest.clone(),
            edges,
        })
    }

    /// One hyperedge per connected component; the result partitions the types.
    pub fn reachability(&self) -> Self {
        let names: Vec<&String> = self.types.iter().collect();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
        let mut uf = UnionFind::new(names.len());
        for e in &self.edges {
            let mut it = e.iter().map(|t| index[t.as_str()]);
            if let Some(first) = it.next() {
                it.for_each(|o| {
                    uf.union(first, o);
                });
            }
        }
        let edges = uf
            .groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| names[i].clone()).collect())
            .collect();
        Self {
            types: self.types.clone(),
            edges,
        }
    }

    /// A single reachability hyperedge means the whole dataset is navigable.
    pub fn is_fully_navigable(&self) -> bool {
        self.reachability().edges.len() == 1
    }
}

/// A reachability hyperedge, its reference candidates and the current reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigationContext {
    reachable: BTreeSet<String>,
    candidates: BTreeSet<String>,
    reference: String,
}

impl NavigationContext {
    pub fn new(
        reachable: BTreeSet<String>,
        candidates: BTreeSet<String>,
        reference: impl Into<String>,
    ) -> Result<Self, SchemaError> {
        let reference = reference.into();
        if candidates.is_empty() {
            return Err(SchemaError::NoCandidates);
        }
        if let Some(c) = candidates.iter().find(|c| !reachable.contains(*c)) {
            return Err(SchemaError::CandidateOutsideEdge(c.clone()));
        }
        if !candidates.contains(&reference) {
            return Err(SchemaError::NotACandidate(reference));
        }
        if reachable.len() < 2 {
            return Err(SchemaError::NoVisualisationTypes(reference));
        }
        Ok(Self {
            reachable,
            candidates,
            reference,
        })
    }

    pub fn reference(&self) -> &str {
        &self.reference
    }

    pub fn candidates(&self) -> &BTreeSet<String> {
        &self.candidates
    }

    pub fn reachable(&self) -> &BTreeSet<String> {
        &self.reachable
    }

    /// Same hyperedge and candidates with another reference type.
    pub fn with_reference(&self, reference: impl Into<String>) -> Result<Self, SchemaError> {
        Self::new(self.reachable.clone(), self.candidates.clone(), reference)
    }

    /// The visualisation types available without changing reference:
    /// the reachability hyperedge minus the reference.
    pub fn navigation_hyperedge(&self) -> Result<BTreeSet<String>, SchemaError> {
        let mut out = self.reachable.clone();
        out.remove(&self.reference);
        if out.is_empty() {
            return Err(SchemaError::NoVisualisationTypes(self.reference.clone()));
        }
        Ok(out)
    }
}

/// On-disk schema declaration.
///
/// ```json
/// {"types": [...], "edges": [[...], ...], "reference_candidates": [...],
///  "physical_reference": "pubid"}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaConfig {
    pub types: Vec<String>,
    pub edges: Vec<Vec<String>>,
    pub reference_candidates: Vec<String>,
    #[serde(default)]
    pub physical_reference: Option<String>,
}

impl SchemaConfig {
    /// Schema for the Arxiv build: one hyperedge over publication id,
    /// authors, keywords and categories.
    pub fn arxiv() -> Self {
        Self {
            types: ["pubid", "authors", "keywords", "categories"]
                .map(String::from)
                .to_vec(),
            edges: vec![["pubid", "authors", "keywords", "categories"]
                .map(String::from)
                .to_vec()],
            reference_candidates: ["pubid", "keywords", "categories"].map(String::from).to_vec(),
            physical_reference: Some("pubid".into()),
        }
    }

    pub fn hypergraph(&self) -> Result<SchemaHypergraph, SchemaError> {
        SchemaHypergraph::new(self.types.iter().cloned(), self.edges.iter().cloned())
    }

    /// Navigation context on the reachability hyperedge that holds the
    /// physical reference.
    pub fn context(&self, reference: &str) -> Result<NavigationContext, SchemaError> {
        let physical = self
            .physical_reference
            .as_deref()
            .ok_or(SchemaError::MissingPhysicalReference)?;
        let h = self.hypergraph()?;
        if !h.types().contains(physical) {
            return Err(SchemaError::UnknownType(physical.to_owned()));
        }
        let reach = h.reachability();
        let edge = reach
            .edges()
            .iter()
            .find(|e| e.contains(physical))
            .cloned()
            .unwrap_or_default();
        let candidates: BTreeSet<String> = self.reference_candidates.iter().cloned().collect();
        if let Some(c) = candidates.iter().find(|c| !h.types().contains(*c)) {
            return Err(SchemaError::UnknownType(c.clone()));
        }
        NavigationContext::new(edge, candidates, reference)
    }

    pub fn default_reference(&self) -> Option<&str> {
        self.physical_reference.as_deref()
    }
}
