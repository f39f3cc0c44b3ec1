//! Learns term-to-viewpoint associations from instantiated multi-viewpoints
//! ontologies and rewrites plain RDF into VP-RDF, where resources and
//! predicates are explicitly linked to the viewpoints they belong to.

pub mod convert;
pub mod model;
pub mod mvo;
pub mod query;
pub mod rdf;
pub mod synth;
