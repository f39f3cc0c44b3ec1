//! Viewpoint-scoped retrieval over VP-RDF graphs and relevance scoring
//! against gold labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::convert::{helper_origin, mint_predicate_class, VpVocabulary};
use crate::rdf::{local_name, normalize_label, parse_ntriples, Graph, Iri, Term, Triple, RDF_TYPE};

/// Which part of a graph a query targets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Viewpoint(String),
    /// Triples none of whose resources is linked to any viewpoint.
    Consensual,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Viewpoint(v) => f.write_str(v),
            Scope::Consensual => f.write_str("(consensual)"),
        }
    }
}

/// Resource -> viewpoint links recovered from a converted graph, in both
/// the direct and the reified form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkIndex {
    links: BTreeMap<Term, BTreeSet<String>>,
    link_predicates: BTreeSet<Iri>,
}

impl LinkIndex {
    pub fn from_graph(graph: &Graph, vocab: &VpVocabulary) -> Self {
        let rdf_type = Iri::new(RDF_TYPE).expect("well-known IRI");
        let pwv = Term::Iri(vocab.predicate_with_viewpoint.clone());

        let mut link_predicates = BTreeSet::from([vocab.link_predicate.clone()]);
        for t in graph {
            if t.predicate() == &rdf_type && t.object() == &pwv {
                if let Some(p) = t.subject().as_iri() {
                    link_predicates.insert(p.clone());
                }
            }
        }

        let mut links: BTreeMap<Term, BTreeSet<String>> = BTreeMap::new();
        let mut stmt_subjects: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
        let mut stmt_objects: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
        for t in graph {
            let p = t.predicate();
            if link_predicates.contains(p) {
                if let Some(v) = local_name(t.object()) {
                    links.entry(t.subject().clone()).or_default().insert(v);
                }
            } else if p == &vocab.subject_statement {
                stmt_subjects
                    .entry(t.subject())
                    .or_default()
                    .push(t.object());
            } else if p == &vocab.object_statement {
                stmt_objects
                    .entry(t.subject())
                    .or_default()
                    .push(t.object());
            }
        }
        for (stmt, resources) in &stmt_subjects {
            let Some(vps) = stmt_objects.get(stmt) else {
                continue;
            };
            for r in resources {
                for v in vps.iter().filter_map(|v| local_name(v)) {
                    links.entry((*r).clone()).or_default().insert(v);
                }
            }
        }
        LinkIndex {
            links,
            link_predicates,
        }
    }

    pub fn viewpoints_of(&self, resource: &Term) -> Option<&BTreeSet<String>> {
        self.links.get(resource)
    }

    /// All viewpoints any resource is linked to.
    pub fn viewpoints(&self) -> BTreeSet<String> {
        self.links.values().flatten().cloned().collect()
    }

    /// The (resource, viewpoint) pairs.
    pub fn pairs(&self) -> BTreeSet<(Term, String)> {
        self.links
            .iter()
            .flat_map(|(r, vs)| vs.iter().map(move |v| (r.clone(), v.clone())))
            .collect()
    }

    fn is_linked_to(&self, term: &Term, viewpoint: &str) -> bool {
        self.links
            .get(term)
            .is_some_and(|vs| vs.contains(viewpoint))
    }

    fn is_linked(&self, term: &Term) -> bool {
        self.links.contains_key(term)
    }

    /// Resources of the triple that can carry a link: subject, object and
    /// the minted class of the predicate.
    fn resources(triple: &Triple) -> [Option<Term>; 3] {
        [
            Some(triple.subject().clone()),
            Some(triple.object().clone()),
            mint_predicate_class(triple.predicate()).map(|(c, _)| Term::Iri(c)),
        ]
    }

    /// Whether a triple belongs to the original (non VP-RDF) part of a
    /// converted graph.
    pub fn is_original(&self, triple: &Triple, vocab: &VpVocabulary) -> bool {
        !vocab.mentions(triple)
            && !self.link_predicates.contains(triple.predicate())
            && helper_origin(triple).is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub scope: Scope,
    pub triples: Graph,
    /// Labels of linked resources that caused a triple to be returned.
    pub matched_resources: BTreeSet<String>,
}

/// Original triples of `graph` with a subject, object or predicate class
/// linked to `viewpoint`. Minted `(Class_X, X_value, o)` triples are not
/// returned themselves; the original `(s, X, o)` triples stand for them.
pub fn viewpoint_filter(graph: &Graph, viewpoint: &str, vocab: &VpVocabulary) -> QueryResult {
    let index = LinkIndex::from_graph(graph, vocab);
    viewpoint_filter_indexed(graph, &index, viewpoint, vocab)
}

pub fn viewpoint_filter_indexed(
    graph: &Graph,
    index: &LinkIndex,
    viewpoint: &str,
    vocab: &VpVocabulary,
) -> QueryResult {
    let viewpoint = normalize_label(viewpoint);
    let mut triples = Graph::new();
    let mut matched = BTreeSet::new();
    for t in graph.iter().filter(|t| index.is_original(t, vocab)) {
        let mut hit = false;
        for r in LinkIndex::resources(t).into_iter().flatten() {
            if index.is_linked_to(&r, &viewpoint) {
                hit = true;
                if let Some(l) = local_name(&r) {
                    matched.insert(l);
                }
            }
        }
        if hit {
            triples.insert(t.clone());
        }
    }
    QueryResult {
        scope: Scope::Viewpoint(viewpoint),
        triples,
        matched_resources: matched,
    }
}

/// Original triples none of whose resources is linked to any viewpoint.
pub fn consensual_filter(graph: &Graph, vocab: &VpVocabulary) -> QueryResult {
    let index = LinkIndex::from_graph(graph, vocab);
    consensual_filter_indexed(graph, &index, vocab)
}

pub fn consensual_filter_indexed(
    graph: &Graph,
    index: &LinkIndex,
    vocab: &VpVocabulary,
) -> QueryResult {
    let triples = graph
        .iter()
        .filter(|t| index.is_original(t, vocab))
        .filter(|t| {
            LinkIndex::resources(t)
                .into_iter()
                .flatten()
                .all(|r| !index.is_linked(&r))
        })
        .cloned()
        .collect();
    QueryResult {
        scope: Scope::Consensual,
        triples,
        matched_resources: BTreeSet::new(),
    }
}

pub fn run_query(graph: &Graph, scope: &Scope, vocab: &VpVocabulary) -> QueryResult {
    match scope {
        Scope::Viewpoint(v) => viewpoint_filter(graph, v, vocab),
        Scope::Consensual => consensual_filter(graph, vocab),
    }
}

#[derive(Debug, Error)]
pub enum GoldError {
    #[error("malformed gold-label document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("gold key {key:?} is not a single N-Triples statement: {reason}")]
    BadKey { key: String, reason: String },
    #[error("gold triple {0} is not part of the evaluated graph's original statements")]
    UnknownTriple(String),
}

/// Reference judgments: for each triple, the viewpoints it is relevant to.
/// An empty set marks a consensual triple.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldLabels {
    labels: BTreeMap<Triple, BTreeSet<String>>,
}

impl GoldLabels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, triple: Triple, viewpoints: BTreeSet<String>) {
        self.labels.insert(triple, viewpoints);
    }

    pub fn get(&self, triple: &Triple) -> Option<&BTreeSet<String>> {
        self.labels.get(triple)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Triple, &BTreeSet<String>)> + '_ {
        self.labels.iter()
    }

    pub fn viewpoints(&self) -> BTreeSet<String> {
        self.labels.values().flatten().cloned().collect()
    }

    /// Triples relevant to the scope.
    pub fn relevant(&self, scope: &Scope) -> BTreeSet<&Triple> {
        self.labels
            .iter()
            .filter(|(_, vs)| match scope {
                Scope::Viewpoint(v) => vs.contains(v),
                Scope::Consensual => vs.is_empty(),
            })
            .map(|(t, _)| t)
            .collect()
    }

    /// JSON object from canonical N-Triples line to viewpoint list, keys
    /// in canonical order.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, Vec<&String>> = self
            .labels
            .iter()
            .map(|(t, vs)| (t.to_ntriples(), vs.iter().collect()))
            .collect();
        let mut text = serde_json::to_string_pretty(&map).expect("gold labels serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, GoldError> {
        let map: BTreeMap<String, Vec<String>> = serde_json::from_str(text)?;
        let mut gold = GoldLabels::new();
        for (key, vs) in map {
            let g = parse_ntriples(&key).map_err(|e| GoldError::BadKey {
                key: key.clone(),
                reason: e.to_string(),
            })?;
            if g.len() != 1 {
                return Err(GoldError::BadKey {
                    key,
                    reason: format!("found {} statements", g.len()),
                });
            }
            let triple = g.into_iter().next().expect("one triple");
            gold.insert(triple, vs.iter().map(|v| normalize_label(v)).collect());
        }
        Ok(gold)
    }

    /// Every gold triple must be an original statement of `graph`.
    pub fn check_against(&self, graph: &Graph, vocab: &VpVocabulary) -> Result<(), GoldError> {
        let index = LinkIndex::from_graph(graph, vocab);
        for t in self.labels.keys() {
            if !graph.contains(t) || !index.is_original(t, vocab) {
                return Err(GoldError::UnknownTriple(t.to_ntriples()));
            }
        }
        Ok(())
    }
}

/// Set-based precision and recall. Precision of an empty result is 1.0;
/// recall against an empty relevant set is 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelevanceScore {
    pub precision: f64,
    pub recall: f64,
    pub returned_count: usize,
    pub relevant_count: usize,
    pub hit_count: usize,
}

impl RelevanceScore {
    pub fn from_counts(returned: usize, relevant: usize, hits: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        RelevanceScore {
            precision: ratio(hits, returned),
            recall: ratio(hits, relevant),
            returned_count: returned,
            relevant_count: relevant,
            hit_count: hits,
        }
    }

    /// Micro-average: pools the counts of several scores.
    pub fn pooled<'a>(scores: impl IntoIterator<Item = &'a RelevanceScore>) -> Self {
        let (mut returned, mut relevant, mut hits) = (0, 0, 0);
        for s in scores {
            returned += s.returned_count;
            relevant += s.relevant_count;
            hits += s.hit_count;
        }
        Self::from_counts(returned, relevant, hits)
    }
}

pub fn evaluate(result: &QueryResult, gold: &GoldLabels) -> RelevanceScore {
    let relevant = gold.relevant(&result.scope);
    let hits = result
        .triples
        .iter()
        .filter(|t| relevant.contains(t))
        .count();
    RelevanceScore::from_counts(result.triples.len(), relevant.len(), hits)
}
