//! Faceted exploration of document collections through hb-graphs.
//!
//! Every facet of a search result is a family of multisets (an hb-graph) of
//! co-occurring values of one metadata type, indexed by the values of a chosen
//! reference type. The crate provides:
//!
//! - [`mset`]: multisets with real, non-negative multiplicities.
//! - [`hbgraph`]: hb-graphs, support hypergraphs, components and extra-node layouts.
//! - [`schema`]: metadata-level hypergraphs and navigation contexts.
//! - [`facet`]: raw and reduced facet construction and cross-facet navigation.
//! - [`keyword`]: noun extraction, TF-IDF scoring and the keyword hb-graph.
//! - [`query`]: the boolean query language and the query-history hb-graph.
//! - [`par`]: data-parallel helpers with a sequential fallback.

pub mod facet;
pub mod hbgraph;
pub mod keyword;
pub mod mset;
pub mod par;
pub mod query;
pub mod schema;
mod unionfind;

pub use facet::{Corpus, PhysicalEntity, RawFacet, ReducedFacet, SearchResult};
pub use hbgraph::{ExtraNodeLayout, HbGraph, Hypergraph, WeightedHbGraph};
pub use mset::Multiset;
pub use par::Exec;
pub use query::{Query, QueryHistory};
pub use schema::{NavigationContext, SchemaHypergraph};
