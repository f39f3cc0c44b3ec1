//! RDF data model, N-Triples I/O and label extraction.

mod ntriples;
mod term;

use std::collections::BTreeSet;

pub use ntriples::{parse_ntriples, serialize_ntriples, ParseError};
pub use term::{BlankNode, Iri, Literal, LiteralAnnotation, Term, TermError, Triple};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const RDF_STATEMENT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement";
pub const RDFS_RESOURCE: &str = "http://www.w3.org/2000/01/rdf-schema#Resource";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";

/// Namespace used to expand bare names such as `Rich_Tenant` in fixtures.
pub const DEFAULT_NAMESPACE: &str = "http://ex.org/";

/// A deduplicated set of triples kept in canonical order: lexicographic on
/// the serialized (subject, predicate, object).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    pub fn is_superset(&self, other: &Graph) -> bool {
        self.triples.is_superset(&other.triples)
    }

    pub fn difference<'a>(&'a self, other: &'a Graph) -> impl Iterator<Item = &'a Triple> + 'a {
        self.triples.difference(&other.triples)
    }

    pub fn to_ntriples(&self) -> String {
        serialize_ntriples(self)
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
        }
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.triples.extend(iter)
    }
}

impl IntoIterator for Graph {
    type Item = Triple;
    type IntoIter = std::collections::btree_set::IntoIter<Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.into_iter()
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Label normalization shared by ontology loading and RDF term matching:
/// trim surrounding whitespace, lowercase, `-` becomes `_`.
pub fn normalize_label(raw: &str) -> String {
    raw.trim().to_lowercase().replace('-', "_")
}

/// Identifier recorded in model files for [`normalize_label`].
pub const NORMALIZATION_SCHEME: &str = "lowercase_underscore_v1";

/// The normalized label of a term: for IRIs the part after the last `#`
/// (or last `/`), for literals the lexical form. Blank nodes have no label;
/// neither do IRIs whose local part is empty.
pub fn local_name(term: &Term) -> Option<String> {
    let raw = match term {
        Term::Iri(iri) => iri.raw_local_name(),
        Term::Literal(lit) => lit.lexical(),
        Term::Blank(_) => return None,
    };
    let label = normalize_label(raw);
    (!label.is_empty()).then_some(label)
}

/// Whether `s` can be appended to a namespace to form a valid IRI.
pub fn is_iri_safe(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(term::is_forbidden_iri_char)
}

/// Expands bare names against a base namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namespace(String);

impl Namespace {
    pub fn new(base: impl Into<String>) -> Result<Self, TermError> {
        let base = base.into();
        Iri::new(base.clone())?;
        Ok(Namespace(base))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn iri(&self, name: &str) -> Result<Iri, TermError> {
        Iri::new(format!("{}{}", self.0, name))
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        iri.as_str().starts_with(&self.0)
    }
}

impl Default for Namespace {
    fn default() -> Self {
        Namespace(DEFAULT_NAMESPACE.to_string())
    }
}
