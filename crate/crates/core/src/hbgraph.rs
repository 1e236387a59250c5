//! Hb-graphs: a vertex universe plus a family of multiset hb-edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::mset::Multiset;
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HbGraphError {
    #[error("duplicate hb-edge id `{0}`")]
    DuplicateEdge(String),
    #[error("hb-edge `{edge}` contains `{vertex}` which is not a vertex")]
    UnknownVertex { edge: String, vertex: String },
    #[error("thickness range must satisfy 0 < t_min <= t_max, got [{min}, {max}]")]
    InvalidThickness { min: f64, max: f64 },
    #[error("weight for hb-edge `{0}` must be finite and positive")]
    InvalidWeight(String),
    #[error("weights do not cover exactly the hb-edges (offending id `{0}`)")]
    WeightMismatch(String),
    #[error("hb-edge `{0}` has a multiplicity other than 1")]
    NotAHypergraph(String),
}

/// `H = (V, E)` where `E` is an insertion-ordered family of multisets.
///
/// Distinct edge ids may carry equal multisets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HbGraph {
    vertices: BTreeSet<String>,
    edges: IndexMap<String, Multiset>,
}

impl HbGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices<I, S>(vertices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            vertices: vertices.into_iter().map(Into::into).collect(),
            edges: IndexMap::new(),
        }
    }

    pub fn add_vertex(&mut self, v: impl Into<String>) {
        self.vertices.insert(v.into());
    }

    /// Appends an hb-edge. Its support must already be in the vertex set.
    pub fn add_edge(&mut self, id: impl Into<String>, edge: Multiset) -> Result<(), HbGraphError> {
        let id = id.into();
        if self.edges.contains_key(&id) {
            return Err(HbGraphError::DuplicateEdge(id));
        }
        if let Some(v) = edge.elements().find(|v| !self.vertices.contains(*v)) {
            return Err(HbGraphError::UnknownVertex {
                edge: id,
                vertex: v.to_owned(),
            });
        }
        self.edges.insert(id, edge);
        Ok(())
    }

    /// Appends an hb-edge, adding any missing support vertices.
    pub fn push_edge(&mut self, id: impl Into<String>, edge: Multiset) -> Result<(), HbGraphError> {
        let id = id.into();
        if self.edges.contains_key(&id) {
            return Err(HbGraphError::DuplicateEdge(id));
        }
        self.vertices.extend(edge.elements().map(str::to_owned));
        self.edges.insert(id, edge);
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &Multiset)> + '_ {
        self.edges.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn edge(&self, id: &str) -> Option<&Multiset> {
        self.edges.get(id)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.edges.keys().map(String::as_str)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_natural(&self) -> bool {
        self.edges.values().all(Multiset::is_natural)
    }

    /// Edges sorted by id, the order used by every export.
    pub fn sorted_edges(&self) -> Vec<(&str, &Multiset)> {
        let mut out: Vec<_> = self.edges().collect();
        out.sort_by(|a, b| a.0.cmp(b.0));
        out
    }

    /// Replaces every hb-edge by its support; equal supports collapse onto the
    /// first hb-edge id (in insertion order) that produced them. The map sends
    /// each original edge id to the id of its support edge.
    pub fn support_hypergraph(&self) -> (Hypergraph, BTreeMap<String, String>) {
        let mut seen: IndexMap<BTreeSet<String>, String> = IndexMap::new();
        let mut map = BTreeMap::new();
        for (id, e) in &self.edges {
            let support = e.support();
            let target = seen.entry(support).or_insert_with(|| id.clone()).clone();
            map.insert(id.clone(), target);
        }
        let mut g = HbGraph::with_vertices(self.vertices.iter().cloned());
        for (support, id) in seen {
            g.edges.insert(id, Multiset::from_items(support));
        }
        (Hypergraph(g), map)
    }

    /// Partition of the vertex set into connected components. Each hb-edge
    /// connects all of its support vertices. Blocks are sorted.
    pub fn connected_components(&self) -> Vec<BTreeSet<String>> {
        let index: BTreeMap<&str, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let names: Vec<&String> = self.vertices.iter().collect();
        let mut uf = UnionFind::new(names.len());
        for e in self.edges.values() {
            let mut it = e.elements().map(|v| index[v]);
            if let Some(first) = it.next() {
                for other in it {
                    uf.union(first, other);
                }
            }
        }
        uf.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| names[i].clone()).collect())
            .collect()
    }

    /// Extra-node representation: one extra node per hb-edge linked to each
    /// support vertex. Link thickness is the multiplicity mapped affinely from
    /// the global `[m_min, m_max]` of the hb-graph onto `[t_min, t_max]`.
    pub fn extra_node_layout(&self, t_min: f64, t_max: f64) -> Result<ExtraNodeLayout, HbGraphError> {
        if !(t_min > 0.0 && t_min <= t_max && t_max.is_finite()) {
            return Err(HbGraphError::InvalidThickness { min: t_min, max: t_max });
        }
        let edges = self.sorted_edges();
        let (m_min, m_max) = edges
            .iter()
            .flat_map(|(_, e)| e.iter().map(|(_, m)| m))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m), hi.max(m)));
        let thickness = |m: f64| {
            if m_max == m_min {
                (t_min + t_max) / 2.0
            } else {
                t_min + (m - m_min) * (t_max - t_min) / (m_max - m_min)
            }
        };
        let thickness = &thickness;
        let links = edges
            .iter()
            .flat_map(|(id, e)| {
                e.iter().map(move |(v, m)| LayoutLink {
                    vertex: v.to_owned(),
                    edge: (*id).to_owned(),
                    multiplicity: m,
                    thickness: thickness(m),
                })
            })
            .collect();
        Ok(ExtraNodeLayout {
            vertices: self.vertices.iter().cloned().collect(),
            extra_nodes: edges.iter().map(|(id, _)| (*id).to_owned()).collect(),
            links,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    entries: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct HbGraphJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

impl HbGraphJson {
    fn into_graph(self) -> Result<HbGraph, String> {
        let mut g = HbGraph::with_vertices(self.vertices);
        for e in self.edges {
            let m = Multiset::from_pairs(e.entries).map_err(|e| e.to_string())?;
            g.add_edge(e.id, m).map_err(|e| e.to_string())?;
        }
        Ok(g)
    }
}

fn edges_json(g: &HbGraph) -> Vec<EdgeJson> {
    g.sorted_edges()
        .into_iter()
        .map(|(id, e)| EdgeJson {
            id: id.to_owned(),
            entries: e.entries().clone(),
        })
        .collect()
}

impl Serialize for HbGraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HbGraph", 2)?;
        st.serialize_field("vertices", &self.vertices)?;
        st.serialize_field("edges", &edges_json(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HbGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        HbGraphJson::deserialize(d)?
            .into_graph()
            .map_err(serde::de::Error::custom)
    }
}

/// An hb-graph whose every hb-edge is a set (all multiplicities 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Hypergraph(HbGraph);

impl Hypergraph {
    pub fn new(g: HbGraph) -> Result<Self, HbGraphError> {
        if let Some((id, _)) = g.edges().find(|(_, e)| !e.is_set()) {
            return Err(HbGraphError::NotAHypergraph(id.to_owned()));
        }
        Ok(Self(g))
    }

    pub fn as_hbgraph(&self) -> &HbGraph {
        &self.0
    }

    pub fn into_hbgraph(self) -> HbGraph {
        self.0
    }

    /// Hyperedges as plain vertex sets, sorted by edge id.
    pub fn edge_sets(&self) -> Vec<(String, BTreeSet<String>)> {
        self.0
            .sorted_edges()
            .into_iter()
            .map(|(id, e)| (id.to_owned(), e.support()))
            .collect()
    }
}

/// An hb-graph with a positive weight per hb-edge.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedHbGraph {
    base: HbGraph,
    weights: BTreeMap<String, f64>,
}

impl WeightedHbGraph {
    pub fn new(base: HbGraph, weights: BTreeMap<String, f64>) -> Result<Self, HbGraphError> {
        for (id, &w) in &weights {
            if base.edge(id).is_none() {
                return Err(HbGraphError::WeightMismatch(id.clone()));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(HbGraphError::InvalidWeight(id.clone()));
            }
        }
        if let Some(id) = base.edge_ids().find(|id| !weights.contains_key(*id)) {
            return Err(HbGraphError::WeightMismatch(id.to_owned()));
        }
        Ok(Self { base, weights })
    }

    pub fn base(&self) -> &HbGraph {
        &self.base
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn weight(&self, id: &str) -> Option<f64> {
        self.weights.get(id).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.values().sum()
    }
}

impl Serialize for WeightedHbGraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("WeightedHbGraph", 3)?;
        st.serialize_field("vertices", &self.base.vertices)?;
        st.serialize_field("edges", &edges_json(&self.base))?;
        st.serialize_field("weights", &self.weights)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for WeightedHbGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(flatten)]
            graph: HbGraphJson,
            weights: BTreeMap<String, f64>,
        }
        let raw = Raw::deserialize(d)?;
        let base = raw.graph.into_graph().map_err(serde::de::Error::custom)?;
        WeightedHbGraph::new(base, raw.weights).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutLink {
    pub vertex: String,
    pub edge: String,
    pub multiplicity: f64,
    pub thickness: f64,
}

/// Bipartite drawing of an hb-graph: vertex nodes, one extra node per hb-edge
/// and one link per (vertex, hb-edge) incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraNodeLayout {
    pub vertices: Vec<String>,
    pub extra_nodes: Vec<String>,
    pub links: Vec<LayoutLink>,
}

fn vertex_node(v: &str) -> String {
    format!("v:{v}")
}

fn extra_node(e: &str) -> String {
    format!("e:{e}")
}

impl Serialize for ExtraNodeLayout {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Node<'a> {
            id: String,
            label: &'a str,
            kind: &'static str,
        }
        #[derive(Serialize)]
        struct Link {
            source: String,
            target: String,
            multiplicity: f64,
            thickness: f64,
        }
        let nodes: Vec<Node> = self
            .vertices
            .iter()
            .map(|v| Node {
                id: vertex_node(v),
                label: v,
                kind: "vertex",
            })
            .chain(self.extra_nodes.iter().map(|e| Node {
                id: extra_node(e),
                label: e,
                kind: "extra",
            }))
            .collect();
        let links: Vec<Link> = self
            .links
            .iter()
            .map(|l| Link {
                source: vertex_node(&l.vertex),
                target: extra_node(&l.edge),
                multiplicity: l.multiplicity,
                thickness: l.thickness,
            })
            .collect();
        let mut st = s.serialize_struct("ExtraNodeLayout", 2)?;
        st.serialize_field("nodes", &nodes)?;
        st.serialize_field("links", &links)?;
        st.end()
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl ExtraNodeLayout {
    /// Graphviz rendering: vertices as circles, extra nodes as squares, link
    /// pen width set to the normalised thickness.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {} {{", dot_quote(name));
        for v in &self.vertices {
            let _ = writeln!(
                out,
                "  {} [shape=circle, label={}];",
                dot_quote(&vertex_node(v)),
                dot_quote(v)
            );
        }
        for e in &self.extra_nodes {
            let _ = writeln!(
                out,
                "  {} [shape=square, label={}];",
                dot_quote(&extra_node(e)),
                dot_quote(e)
            );
        }
        for l in &self.links {
            let _ = writeln!(
                out,
                "  {} -- {} [penwidth={}];",
                dot_quote(&vertex_node(&l.vertex)),
                dot_quote(&extra_node(&l.edge)),
                l.thickness
            );
        }
        out.push_str("}\n");
        out
    }
}
