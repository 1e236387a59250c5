//! Facet hb-graphs built from a search result, and navigation between facets.
//!
//! For a search `S`, a reference type `rho` and a visualisation type `alpha`:
//!
//! - `Sigma_rho` gathers every `rho` value attached to a reference of `S`, and
//!   `R_s` lists the references carrying the value `s`.
//! - The raw facet has one hb-edge per `s`: the additive union of the `alpha`
//!   multisets of the references in `R_s`.
//! - The reduced facet merges mset-equal hb-edges into one weighted hb-edge
//!   whose weight is the number of merged values. The merged values form the
//!   edge's class, which is what navigation follows back to references.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use indexmap::IndexMap;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::hbgraph::{HbGraph, WeightedHbGraph};
use crate::mset::Multiset;
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FacetError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("duplicate reference `{0}`")]
    DuplicateReference(String),
    #[error("visualisation type and reference type are both `{0}`")]
    SameType(String),
    #[error("selection is empty")]
    EmptySelection,
    #[error("`{0}` is not a vertex of the facet")]
    UnknownVertex(String),
    #[error("invalid facet data: {0}")]
    Invalid(String),
}

static EMPTY: Multiset = Multiset::EMPTY;

/// A physical entity: its unique reference and one multiset of values per type.
/// A type missing from `attributes` carries the empty multiset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalEntity {
    pub reference: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, Multiset>,
}

impl PhysicalEntity {
    pub fn new(reference: impl Into<String>) -> Self {
        Self {
            reference: reference.into(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with(mut self, ty: impl Into<String>, values: Multiset) -> Self {
        self.attributes.insert(ty.into(), values);
        self
    }

    pub fn attribute(&self, ty: &str) -> &Multiset {
        self.attributes.get(ty).unwrap_or(&EMPTY)
    }
}

/// An immutable collection of physical entities over a fixed set of types.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    types: BTreeSet<String>,
    entities: IndexMap<String, PhysicalEntity>,
}

impl Corpus {
    pub fn new<T, S, E>(types: T, entities: E) -> Result<Self, FacetError>
    where
        T: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = PhysicalEntity>,
    {
        let types: BTreeSet<String> = types.into_iter().map(Into::into).collect();
        let mut map = IndexMap::new();
        for e in entities {
            if let Some(t) = e.attributes.keys().find(|t| !types.contains(*t)) {
                return Err(FacetError::UnknownType(t.clone()));
            }
            if map.contains_key(&e.reference) {
                return Err(FacetError::DuplicateReference(e.reference));
            }
            map.insert(e.reference.clone(), e);
        }
        Ok(Self { types, entities: map })
    }

    pub fn types(&self) -> &BTreeSet<String> {
        &self.types
    }

    pub fn entities(&self) -> impl Iterator<Item = &PhysicalEntity> + '_ {
        self.entities.values()
    }

    pub fn entity(&self, reference: &str) -> Option<&PhysicalEntity> {
        self.entities.get(reference)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// A search returning every entity, in corpus order.
    pub fn everything(&self) -> SearchResult {
        SearchResult {
            references: self.entities.keys().cloned().collect(),
        }
    }

    fn check_type(&self, ty: &str) -> Result<(), FacetError> {
        if self.types.contains(ty) {
            Ok(())
        } else {
            Err(FacetError::UnknownType(ty.to_owned()))
        }
    }

    fn lookup(&self, reference: &str) -> Result<&PhysicalEntity, FacetError> {
        self.entity(reference)
            .ok_or_else(|| FacetError::UnknownReference(reference.to_owned()))
    }

    fn attribute(&self, reference: &str, ty: &str) -> Result<&Multiset, FacetError> {
        Ok(self.lookup(reference)?.attribute(ty))
    }
}

#[derive(Serialize, Deserialize)]
struct CorpusJson {
    types: BTreeSet<String>,
    entities: Vec<PhysicalEntity>,
}

impl Serialize for Corpus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Corpus", 2)?;
        st.serialize_field("types", &self.types)?;
        st.serialize_field("entities", &self.entities.values().collect::<Vec<_>>())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Corpus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = CorpusJson::deserialize(d)?;
        Corpus::new(raw.types, raw.entities).map_err(serde::de::Error::custom)
    }
}

/// The ordered set of references retrieved by a search.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SearchResult {
    references: Vec<String>,
}

impl SearchResult {
    pub fn new<I, S>(references: I) -> Result<Self, FacetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for r in references {
            let r = r.into();
            if !seen.insert(r.clone()) {
                return Err(FacetError::DuplicateReference(r));
            }
            out.push(r);
        }
        Ok(Self { references: out })
    }

    pub fn references(&self) -> &[String] {
        &self.references
    }

    pub fn len(&self) -> usize {
        self.references.len()
    }

    pub fn is_empty(&self) -> bool {
        self.references.is_empty()
    }
}

/// `Sigma_rho` together with `R_s` for each of its values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReferenceIndex {
    pub refs_of: BTreeMap<String, BTreeSet<String>>,
}

impl ReferenceIndex {
    pub fn sigma(&self) -> BTreeSet<String> {
        self.refs_of.keys().cloned().collect()
    }
}

pub fn sigma_rho(corpus: &Corpus, search: &SearchResult, rho: &str) -> Result<ReferenceIndex, FacetError> {
    corpus.check_type(rho)?;
    let mut refs_of: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in &search.references {
        for s in corpus.attribute(r, rho)?.elements() {
            refs_of.entry(s.to_owned()).or_default().insert(r.clone());
        }
    }
    Ok(ReferenceIndex { refs_of })
}

/// Raw visualisation hb-graph of type `alpha` relative to `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFacet {
    pub alpha: String,
    pub rho: String,
    /// One hb-edge per `s` in `Sigma_rho`, with edge id `s`.
    pub hbgraph: HbGraph,
    pub refs_of: BTreeMap<String, BTreeSet<String>>,
    /// References of the search whose `rho` multiset is empty. They add
    /// vertices but no hb-edge.
    pub orphans: BTreeSet<String>,
}

impl RawFacet {
    pub fn sigma(&self) -> BTreeSet<String> {
        self.refs_of.keys().cloned().collect()
    }

    /// Ids of hb-edges that are empty multisets.
    pub fn empty_edges(&self) -> Vec<&str> {
        self.hbgraph
            .edges()
            .filter(|(_, e)| e.is_empty())
            .map(|(id, _)| id)
            .collect()
    }
}

pub fn raw_facet(corpus: &Corpus, search: &SearchResult, alpha: &str, rho: &str) -> Result<RawFacet, FacetError> {
    raw_facet_with(corpus, search, alpha, rho, Exec::default())
}

pub fn raw_facet_with(
    corpus: &Corpus,
    search: &SearchResult,
    alpha: &str,
    rho: &str,
    exec: Exec,
) -> Result<RawFacet, FacetError> {
    corpus.check_type(alpha)?;
    if alpha == rho {
        return Err(FacetError::SameType(alpha.to_owned()));
    }
    let index = sigma_rho(corpus, search, rho)?;

    let mut vertices = BTreeSet::new();
    let mut orphans = BTreeSet::new();
    for r in &search.references {
        let e = corpus.lookup(r)?;
        vertices.extend(e.attribute(alpha).elements().map(str::to_owned));
        if e.attribute(rho).is_empty() {
            orphans.insert(r.clone());
        }
    }

    let hbgraph = cooccurrence_graph(corpus, vertices, &index.refs_of, alpha, exec);
    Ok(RawFacet {
        alpha: alpha.to_owned(),
        rho: rho.to_owned(),
        hbgraph,
        refs_of: index.refs_of,
        orphans,
    })
}

/// Builds `e_{alpha,s}` for every `s` of `refs_of`. References must be known.
fn cooccurrence_graph(
    corpus: &Corpus,
    vertices: BTreeSet<String>,
    refs_of: &BTreeMap<String, BTreeSet<String>>,
    alpha: &str,
    exec: Exec,
) -> HbGraph {
    let values: Vec<(&String, &BTreeSet<String>)> = refs_of.iter().collect();
    let edges = exec.map(&values, |(_, refs)| {
        Multiset::sum(refs.iter().map(|r| corpus.entities[r.as_str()].attribute(alpha)))
    });
    let mut g = HbGraph::with_vertices(vertices);
    for ((s, _), e) in values.into_iter().zip(edges) {
        g.add_edge(s.clone(), e)
            .expect("edge ids are distinct and supports lie in the vertex set");
    }
    g
}

/// Reduced visualisation weighted hb-graph. Each hb-edge stands for a class
/// of `rho` values whose raw hb-edges are mset-equal; its id is the smallest
/// value of the class and its weight the class size.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFacet {
    pub alpha: String,
    pub rho: String,
    pub whbgraph: WeightedHbGraph,
    pub classes: BTreeMap<String, BTreeSet<String>>,
    pub refs_of: BTreeMap<String, BTreeSet<String>>,
}

impl ReducedFacet {
    pub fn vertices(&self) -> &BTreeSet<String> {
        self.whbgraph.base().vertices()
    }

    pub fn hbgraph(&self) -> &HbGraph {
        self.whbgraph.base()
    }

    /// The class of `rho` values behind an hb-edge.
    pub fn class_of(&self, edge: &str) -> Option<&BTreeSet<String>> {
        self.classes.get(edge)
    }

    /// Physical references behind an hb-edge.
    pub fn references_of(&self, edge: &str) -> BTreeSet<String> {
        self.classes
            .get(edge)
            .into_iter()
            .flatten()
            .filter_map(|s| self.refs_of.get(s))
            .flatten()
            .cloned()
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("facet serialization is infallible")
    }
}

pub fn reduce_facet(raw: &RawFacet) -> ReducedFacet {
    let mut ids: HashMap<Vec<(String, u64)>, String> = HashMap::new();
    let mut classes: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut base = HbGraph::with_vertices(raw.hbgraph.vertices().iter().cloned());

    for (s, e) in raw.hbgraph.sorted_edges() {
        let id = ids
            .entry(e.canonical_key())
            .or_insert_with(|| {
                base.add_edge(s, e.clone()).expect("raw facet edges are valid");
                s.to_owned()
            })
            .clone();
        classes.entry(id).or_default().insert(s.to_owned());
    }
    let weights = classes.iter().map(|(id, c)| (id.clone(), c.len() as f64)).collect();
    ReducedFacet {
        alpha: raw.alpha.clone(),
        rho: raw.rho.clone(),
        whbgraph: WeightedHbGraph::new(base, weights).expect("one positive weight per class"),
        classes,
        refs_of: raw.refs_of.clone(),
    }
}

/// Convenience: raw then reduced facet.
pub fn facet(corpus: &Corpus, search: &SearchResult, alpha: &str, rho: &str) -> Result<ReducedFacet, FacetError> {
    raw_facet(corpus, search, alpha, rho).map(|raw| reduce_facet(&raw))
}

/// The outcome of navigating from a selection in one facet to another type.
#[derive(Debug, Clone, PartialEq)]
pub struct Navigation {
    pub facet: ReducedFacet,
    /// Values of `rho` reached through the selected hb-edges.
    pub values: BTreeSet<String>,
    /// Physical references involving the selection.
    pub sub_search: BTreeSet<String>,
}

/// Follows the hb-edges of `facet` that meet `selection` back to their
/// classes of `rho` values and references, and builds the reduced facet of
/// `target` over those values. `R_s` stays the one fixed by the original search.
pub fn navigate(
    corpus: &Corpus,
    facet: &ReducedFacet,
    selection: &BTreeSet<String>,
    target: &str,
) -> Result<Navigation, FacetError> {
    navigate_with(corpus, facet, selection, target, Exec::default())
}

pub fn navigate_with(
    corpus: &Corpus,
    facet: &ReducedFacet,
    selection: &BTreeSet<String>,
    target: &str,
    exec: Exec,
) -> Result<Navigation, FacetError> {
    if selection.is_empty() {
        return Err(FacetError::EmptySelection);
    }
    if let Some(v) = selection.iter().find(|v| !facet.vertices().contains(*v)) {
        return Err(FacetError::UnknownVertex(v.clone()));
    }
    corpus.check_type(target)?;
    if target == facet.rho {
        return Err(FacetError::SameType(target.to_owned()));
    }

    let values: BTreeSet<String> = facet
        .hbgraph()
        .edges()
        .filter(|(_, e)| e.elements().any(|x| selection.contains(x)))
        .filter_map(|(id, _)| facet.classes.get(id))
        .flatten()
        .cloned()
        .collect();

    let mut refs_of = BTreeMap::new();
    for s in &values {
        let refs = facet
            .refs_of
            .get(s)
            .ok_or_else(|| FacetError::Invalid(format!("class value `{s}` has no references")))?;
        refs_of.insert(s.clone(), refs.clone());
    }
    let sub_search: BTreeSet<String> = refs_of.values().flatten().cloned().collect();

    let mut vertices = BTreeSet::new();
    for r in &sub_search {
        vertices.extend(corpus.attribute(r, target)?.elements().map(str::to_owned));
    }
    let hbgraph = cooccurrence_graph(corpus, vertices, &refs_of, target, exec);
    let raw = RawFacet {
        alpha: target.to_owned(),
        rho: facet.rho.clone(),
        hbgraph,
        refs_of,
        orphans: BTreeSet::new(),
    };
    Ok(Navigation {
        facet: reduce_facet(&raw),
        values,
        sub_search,
    })
}

/// The reference type shown as its own facet: one hb-edge `{s^|R_s|}` per value.
pub fn reference_facet(corpus: &Corpus, search: &SearchResult, rho: &str) -> Result<WeightedHbGraph, FacetError> {
    Ok(reference_view(corpus, search, rho)?.whbgraph)
}

/// [`reference_facet`] packaged as a [`ReducedFacet`] with `alpha = rho` and
/// singleton classes, so it navigates like any other facet.
pub fn reference_view(corpus: &Corpus, search: &SearchResult, rho: &str) -> Result<ReducedFacet, FacetError> {
    let index = sigma_rho(corpus, search, rho)?;
    let mut g = HbGraph::with_vertices(index.refs_of.keys().cloned());
    let mut weights = BTreeMap::new();
    let mut classes = BTreeMap::new();
    for (s, refs) in &index.refs_of {
        let edge = Multiset::from_pairs([(s.clone(), refs.len() as f64)]).expect("count is positive");
        g.add_edge(s.clone(), edge).expect("one edge per value");
        weights.insert(s.clone(), 1.0);
        classes.insert(s.clone(), BTreeSet::from([s.clone()]));
    }
    Ok(ReducedFacet {
        alpha: rho.to_owned(),
        rho: rho.to_owned(),
        whbgraph: WeightedHbGraph::new(g, weights).expect("unit weights"),
        classes,
        refs_of: index.refs_of,
    })
}

impl Serialize for ReducedFacet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ReducedFacet", 6)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("rho", &self.rho)?;
        st.serialize_field("hbgraph", self.whbgraph.base())?;
        st.serialize_field("weights", self.whbgraph.weights())?;
        st.serialize_field("classes", &self.classes)?;
        st.serialize_field("refs", &self.refs_of)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ReducedFacet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: String,
            rho: String,
            hbgraph: HbGraph,
            weights: BTreeMap<String, f64>,
            classes: BTreeMap<String, BTreeSet<String>>,
            refs: BTreeMap<String, BTreeSet<String>>,
        }
        let raw = Raw::deserialize(d)?;
        let whbgraph = WeightedHbGraph::new(raw.hbgraph, raw.weights).map_err(serde::de::Error::custom)?;
        Ok(ReducedFacet {
            alpha: raw.alpha,
            rho: raw.rho,
            whbgraph,
            classes: raw.classes,
            refs_of: raw.refs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(items: &[(&str, f64)]) -> Multiset {
        Multiset::from_pairs(items.iter().map(|&(k, v)| (k, v))).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn d0() -> Corpus {
        Corpus::new(
            ["auth", "kw", "cat"],
            [
                PhysicalEntity::new("r1")
                    .with("auth", Multiset::from_items(["Alice", "Bob"]))
                    .with("kw", ms(&[("graph", 2.0), ("search", 1.0)]))
                    .with("cat", Multiset::from_items(["cs.DS"])),
                PhysicalEntity::new("r2")
                    .with("auth", Multiset::from_items(["Alice", "Carol"]))
                    .with("kw", ms(&[("graph", 1.0), ("index", 1.0)]))
                    .with("cat", Multiset::from_items(["cs.DS", "cs.IR"])),
                PhysicalEntity::new("r3")
                    .with("auth", Multiset::from_items(["Dave"]))
                    .with("kw", ms(&[("search", 2.0)]))
                    .with("cat", Multiset::from_items(["cs.IR"])),
            ],
        )
        .unwrap()
    }

    fn search(refs: &[&str]) -> SearchResult {
        SearchResult::new(refs.iter().copied()).unwrap()
    }

    #[test]
    fn sigma_rho_examples() {
        let c = d0();
        let idx = sigma_rho(&c, &c.everything(), "cat").unwrap();
        assert_eq!(idx.sigma(), set(&["cs.DS", "cs.IR"]));
        assert_eq!(idx.refs_of["cs.DS"], set(&["r1", "r2"]));
        assert_eq!(idx.refs_of["cs.IR"], set(&["r2", "r3"]));

        let idx = sigma_rho(&c, &search(&["r3"]), "cat").unwrap();
        assert_eq!(idx.sigma(), set(&["cs.IR"]));
        assert_eq!(idx.refs_of["cs.IR"], set(&["r3"]));

        assert!(sigma_rho(&c, &search(&[]), "cat").unwrap().sigma().is_empty());
        assert_eq!(
            sigma_rho(&c, &search(&[]), "nope"),
            Err(FacetError::UnknownType("nope".into()))
        );
        assert_eq!(
            sigma_rho(&c, &search(&["r9"]), "cat"),
            Err(FacetError::UnknownReference("r9".into()))
        );
    }

    #[test]
    fn raw_facet_examples() {
        let c = d0();
        let f = raw_facet(&c, &c.everything(), "auth", "cat").unwrap();
        assert_eq!(
            f.hbgraph.edge("cs.DS"),
            Some(&ms(&[("Alice", 2.0), ("Bob", 1.0), ("Carol", 1.0)]))
        );
        assert_eq!(
            f.hbgraph.edge("cs.IR"),
            Some(&ms(&[("Alice", 1.0), ("Carol", 1.0), ("Dave", 1.0)]))
        );
        assert_eq!(f.hbgraph.vertices(), &set(&["Alice", "Bob", "Carol", "Dave"]));

        let f = raw_facet(&c, &c.everything(), "kw", "cat").unwrap();
        assert_eq!(
            f.hbgraph.edge("cs.DS"),
            Some(&ms(&[("graph", 3.0), ("search", 1.0), ("index", 1.0)]))
        );
        assert_eq!(
            f.hbgraph.edge("cs.IR"),
            Some(&ms(&[("graph", 1.0), ("index", 1.0), ("search", 2.0)]))
        );

        let f = raw_facet(&c, &search(&["r3"]), "auth", "cat").unwrap();
        assert_eq!(f.hbgraph.edge_count(), 1);
        assert_eq!(f.hbgraph.edge("cs.IR"), Some(&ms(&[("Dave", 1.0)])));

        assert_eq!(
            raw_facet(&c, &c.everything(), "cat", "cat"),
            Err(FacetError::SameType("cat".into()))
        );
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = d0();
        let seq = raw_facet_with(&c, &c.everything(), "kw", "auth", Exec::Sequential).unwrap();
        let par = raw_facet_with(&c, &c.everything(), "kw", "auth", Exec::Parallel).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn orphans_and_empty_edges_are_flagged() {
        let c = Corpus::new(
            ["a", "b"],
            [
                PhysicalEntity::new("r1").with("a", Multiset::from_items(["x"])),
                PhysicalEntity::new("r2").with("b", Multiset::from_items(["s"])),
            ],
        )
        .unwrap();
        let f = raw_facet(&c, &c.everything(), "a", "b").unwrap();
        assert_eq!(f.orphans, set(&["r1"]));
        assert_eq!(f.empty_edges(), vec!["s"]);
        assert_eq!(f.hbgraph.vertices(), &set(&["x"]));
    }

    #[test]
    fn reduce_merges_equal_edges() {
        let c = Corpus::new(
            ["auth", "kw"],
            [
                PhysicalEntity::new("r1")
                    .with("auth", Multiset::from_items(["A", "B"]))
                    .with("kw", Multiset::from_items(["k1", "k2"])),
                PhysicalEntity::new("r2")
                    .with("auth", Multiset::from_items(["A", "B"]))
                    .with("kw", Multiset::from_items(["k3"])),
            ],
        )
        .unwrap();
        let raw = raw_facet(&c, &c.everything(), "auth", "kw").unwrap();
        assert_eq!(raw.hbgraph.edge_count(), 3);
        let red = reduce_facet(&raw);
        assert_eq!(red.hbgraph().edge_count(), 1);
        assert_eq!(red.hbgraph().edge("k1"), Some(&ms(&[("A", 1.0), ("B", 1.0)])));
        assert_eq!(red.whbgraph.weight("k1"), Some(3.0));
        assert_eq!(red.classes["k1"], set(&["k1", "k2", "k3"]));
        assert_eq!(red.references_of("k1"), set(&["r1", "r2"]));
    }

    #[test]
    fn reduce_without_merging_and_empty() {
        let c = d0();
        let red = facet(&c, &c.everything(), "auth", "cat").unwrap();
        assert_eq!(red.whbgraph.total_weight(), 2.0);
        assert!(red.whbgraph.weights().values().all(|&w| w == 1.0));

        let red = facet(&c, &search(&[]), "auth", "cat").unwrap();
        assert_eq!(red.hbgraph().edge_count(), 0);
        assert_eq!(red.vertices().len(), 0);
    }

    #[test]
    fn navigate_from_dave_to_keywords() {
        let c = d0();
        let f = facet(&c, &c.everything(), "auth", "cat").unwrap();
        let nav = navigate(&c, &f, &set(&["Dave"]), "kw").unwrap();
        assert_eq!(nav.values, set(&["cs.IR"]));
        assert_eq!(nav.sub_search, set(&["r2", "r3"]));
        assert_eq!(nav.facet.hbgraph().edge_count(), 1);
        assert_eq!(
            nav.facet.hbgraph().edge("cs.IR"),
            Some(&ms(&[("graph", 1.0), ("index", 1.0), ("search", 2.0)]))
        );
        assert_eq!(nav.facet.whbgraph.weight("cs.IR"), Some(1.0));
    }

    #[test]
    fn navigate_from_bob_to_authors() {
        let c = d0();
        let f = facet(&c, &c.everything(), "auth", "cat").unwrap();
        let nav = navigate(&c, &f, &set(&["Bob"]), "auth").unwrap();
        let edges: Vec<_> = nav.facet.hbgraph().edges().collect();
        assert_eq!(
            edges,
            vec![("cs.DS", &ms(&[("Alice", 2.0), ("Bob", 1.0), ("Carol", 1.0)]))]
        );
    }

    #[test]
    fn navigate_full_selection_is_full_facet() {
        let c = d0();
        let f = facet(&c, &c.everything(), "auth", "cat").unwrap();
        let nav = navigate(&c, &f, f.vertices(), "kw").unwrap();
        assert_eq!(nav.facet, facet(&c, &c.everything(), "kw", "cat").unwrap());
    }

    #[test]
    fn navigate_errors() {
        let c = d0();
        let f = facet(&c, &c.everything(), "auth", "cat").unwrap();
        assert_eq!(navigate(&c, &f, &set(&[]), "kw"), Err(FacetError::EmptySelection));
        assert_eq!(
            navigate(&c, &f, &set(&["Zed"]), "kw"),
            Err(FacetError::UnknownVertex("Zed".into()))
        );
        assert_eq!(
            navigate(&c, &f, &set(&["Bob"]), "xx"),
            Err(FacetError::UnknownType("xx".into()))
        );
        assert_eq!(
            navigate(&c, &f, &set(&["Bob"]), "cat"),
            Err(FacetError::SameType("cat".into()))
        );
    }

    #[test]
    fn reference_facet_counts() {
        let c = d0();
        let g = reference_facet(&c, &c.everything(), "cat").unwrap();
        assert_eq!(g.base().edge("cs.DS"), Some(&ms(&[("cs.DS", 2.0)])));
        assert_eq!(g.base().edge("cs.IR"), Some(&ms(&[("cs.IR", 2.0)])));
        let g = reference_facet(&c, &search(&["r3"]), "cat").unwrap();
        assert_eq!(g.base().edge_count(), 1);
        assert_eq!(g.base().edge("cs.IR"), Some(&ms(&[("cs.IR", 1.0)])));
        assert_eq!(reference_facet(&c, &search(&[]), "cat").unwrap().base().edge_count(), 0);
    }

    #[test]
    fn reference_view_navigates() {
        let c = d0();
        let view = reference_view(&c, &c.everything(), "cat").unwrap();
        let nav = navigate(&c, &view, &set(&["cs.IR"]), "auth").unwrap();
        assert_eq!(nav.sub_search, set(&["r2", "r3"]));
    }

    #[test]
    fn json_shape() {
        let c = d0();
        let f = facet(&c, &search(&["r3"]), "auth", "cat").unwrap();
        assert_eq!(
            f.to_json(),
            r#"{"alpha":"auth","rho":"cat","hbgraph":{"vertices":["Dave"],"edges":[{"id":"cs.IR","entries":{"Dave":1.0}}]},"weights":{"cs.IR":1.0},"classes":{"cs.IR":["cs.IR"]},"refs":{"cs.IR":["r3"]}}"#
        );
        let back: ReducedFacet = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn corpus_validation_and_json() {
        assert_eq!(
            Corpus::new(["a"], [PhysicalEntity::new("r"), PhysicalEntity::new("r")]),
            Err(FacetError::DuplicateReference("r".into()))
        );
        assert_eq!(
            Corpus::new(["a"], [PhysicalEntity::new("r").with("b", Multiset::new())]),
            Err(FacetError::UnknownType("b".into()))
        );
        assert!(SearchResult::new(["r1", "r1"]).is_err());
        let c = d0();
        let back: Corpus = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
