//! RDF to VP-RDF rewriting.
//!
//! Each input triple is kept and, depending on which of its parts the
//! model links to viewpoints, extra statements are added:
//!
//! * subject / object linked: `(resource, link_predicate, V(v))` per
//!   predicted viewpoint `v`;
//! * predicate linked: a class `Class_<p>` and a value predicate
//!   `<p>_value` are minted in the predicate's namespace, then
//!   `(Class_<p>, <p>_value, object)` and `(Class_<p>, link_predicate, V(v))`
//!   are added.
//!
//! Every viewpoint IRI is typed `Viewpoint` and the link predicate is typed
//! `Predicate_with_Viewpoint`. In reified mode each link triple is replaced
//! by a `Statement` node carrying `Subject_Statement`, `Predicate_Statement`
//! and `Object_Statement`. Literals cannot be subjects, so links for literal
//! resources always use the reified form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::model::{ModelError, Prediction, ViewpointModel};
use crate::rdf::{
    local_name, Graph, Iri, Term, TermError, Triple, RDFS_DOMAIN, RDFS_RANGE, RDFS_RESOURCE,
    RDFS_SUBCLASS_OF, RDF_PROPERTY, RDF_STATEMENT, RDF_TYPE,
};

pub const DEFAULT_VOCAB_NAMESPACE: &str = "http://vprdf.example/vocab#";
pub const DEFAULT_LINK_NAME: &str = "linked_to_viewpoint";

/// The VP-RDF classes and properties under one namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VpVocabulary {
    namespace: String,
    pub viewpoint: Iri,
    pub predicate_with_viewpoint: Iri,
    pub statement: Iri,
    pub subject_statement: Iri,
    pub predicate_statement: Iri,
    pub object_statement: Iri,
    pub link_predicate: Iri,
}

#[derive(Debug, thiserror::Error)]
pub enum VocabularyError {
    #[error("invalid vocabulary namespace: {0}")]
    Namespace(#[from] TermError),
    #[error("link predicate name `{0}` collides with a vocabulary class or property")]
    LinkNameCollision(String),
}

const CLASS_AND_PROPERTY_NAMES: [&str; 6] = [
    "Viewpoint",
    "Predicate_with_Viewpoint",
    "Statement",
    "Subject_Statement",
    "Predicate_Statement",
    "Object_Statement",
];

impl VpVocabulary {
    pub fn new(namespace: &str) -> Result<Self, VocabularyError> {
        Self::with_link_name(namespace, DEFAULT_LINK_NAME)
    }

    pub fn with_link_name(namespace: &str, link_name: &str) -> Result<Self, VocabularyError> {
        if CLASS_AND_PROPERTY_NAMES.contains(&link_name) {
            return Err(VocabularyError::LinkNameCollision(link_name.to_string()));
        }
        let iri = |name: &str| Iri::new(format!("{namespace}{name}"));
        Ok(VpVocabulary {
            namespace: namespace.to_string(),
            viewpoint: iri("Viewpoint")?,
            predicate_with_viewpoint: iri("Predicate_with_Viewpoint")?,
            statement: iri("Statement")?,
            subject_statement: iri("Subject_Statement")?,
            predicate_statement: iri("Predicate_Statement")?,
            object_statement: iri("Object_Statement")?,
            link_predicate: iri(link_name)?,
        })
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn contains(&self, iri: &Iri) -> bool {
        iri.as_str().starts_with(&self.namespace)
    }

    fn contains_term(&self, term: &Term) -> bool {
        term.as_iri().is_some_and(|iri| self.contains(iri))
    }

    /// Whether any position of the triple uses an IRI from this namespace.
    pub fn mentions(&self, triple: &Triple) -> bool {
        self.contains_term(triple.subject())
            || self.contains(triple.predicate())
            || self.contains_term(triple.object())
    }

    /// `V(v)`: the IRI of a (normalized) viewpoint name.
    pub fn viewpoint_iri(&self, viewpoint: &str) -> Iri {
        Iri::new(format!("{}{}", self.namespace, viewpoint))
            .expect("viewpoint names are validated to be IRI-safe")
    }

    /// Deterministic statement node for a (resource, viewpoint) link.
    pub fn statement_iri(&self, resource: &Term, viewpoint: &str) -> Iri {
        let mut hasher = Sha256::new();
        hasher.update(resource.to_ntriples().as_bytes());
        hasher.update([0u8]);
        hasher.update(viewpoint.as_bytes());
        let digest = hasher.finalize();
        Iri::new(format!(
            "{}stmt_{}",
            self.namespace,
            hex::encode(&digest[..16])
        ))
        .expect("namespace is a valid IRI prefix")
    }

    /// Subclass axioms for the three classes and domain/range axioms for
    /// the three statement properties.
    pub fn schema_triples(&self) -> Vec<Triple> {
        let std = |s: &str| Iri::new(s).expect("well-known IRI");
        let t = |s: &Iri, p: Iri, o: Iri| {
            Triple::from_iris(Term::Iri(s.clone()), p, Term::Iri(o)).expect("IRI-only triple")
        };
        vec![
            t(&self.viewpoint, std(RDFS_SUBCLASS_OF), std(RDFS_RESOURCE)),
            t(
                &self.predicate_with_viewpoint,
                std(RDFS_SUBCLASS_OF),
                std(RDF_PROPERTY),
            ),
            t(&self.statement, std(RDFS_SUBCLASS_OF), std(RDF_STATEMENT)),
            t(
                &self.subject_statement,
                std(RDFS_DOMAIN),
                self.statement.clone(),
            ),
            t(&self.subject_statement, std(RDFS_RANGE), std(RDFS_RESOURCE)),
            t(
                &self.predicate_statement,
                std(RDFS_DOMAIN),
                self.statement.clone(),
            ),
            t(
                &self.predicate_statement,
                std(RDFS_RANGE),
                self.predicate_with_viewpoint.clone(),
            ),
            t(
                &self.object_statement,
                std(RDFS_DOMAIN),
                self.statement.clone(),
            ),
            t(
                &self.object_statement,
                std(RDFS_RANGE),
                self.viewpoint.clone(),
            ),
        ]
    }
}

impl Default for VpVocabulary {
    fn default() -> Self {
        VpVocabulary::new(DEFAULT_VOCAB_NAMESPACE).expect("default namespace is valid")
    }
}

/// `(Class_<p>, <p>_value)` for a predicate, minted in its namespace.
pub fn mint_predicate_class(predicate: &Iri) -> Option<(Iri, Iri)> {
    let name = local_name(&Term::Iri(predicate.clone()))?;
    let ns = predicate.namespace();
    let class = Iri::new(format!("{ns}Class_{name}")).ok()?;
    let value = Iri::new(format!("{ns}{name}_value")).ok()?;
    Some((class, value))
}

/// Recognizes a minted `(Class_X, X_value, o)` triple and returns `X`.
pub fn helper_origin(triple: &Triple) -> Option<&str> {
    let subject = triple.subject().as_iri()?;
    let x = subject.raw_local_name().strip_prefix("Class_")?;
    let pred = triple.predicate();
    if x.is_empty() || pred.namespace() != subject.namespace() {
        return None;
    }
    (pred.raw_local_name().strip_suffix("_value")? == x).then_some(x)
}

/// Which of subject and object are linked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseCase {
    None,
    SubjectLinked,
    ObjectLinked,
    BothLinked,
}

/// A base case plus whether the predicate is linked too.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CaseLabel {
    pub base: BaseCase,
    pub predicate_linked: bool,
}

impl CaseLabel {
    pub fn from_flags(subject: bool, object: bool, predicate: bool) -> Self {
        let base = match (subject, object) {
            (false, false) => BaseCase::None,
            (true, false) => BaseCase::SubjectLinked,
            (false, true) => BaseCase::ObjectLinked,
            (true, true) => BaseCase::BothLinked,
        };
        CaseLabel {
            base,
            predicate_linked: predicate,
        }
    }

    pub fn subject_linked(self) -> bool {
        matches!(self.base, BaseCase::SubjectLinked | BaseCase::BothLinked)
    }

    pub fn object_linked(self) -> bool {
        matches!(self.base, BaseCase::ObjectLinked | BaseCase::BothLinked)
    }

    /// Every possible label, in a fixed order.
    pub fn all() -> impl Iterator<Item = CaseLabel> {
        [false, true].into_iter().flat_map(|p| {
            [
                BaseCase::None,
                BaseCase::SubjectLinked,
                BaseCase::ObjectLinked,
                BaseCase::BothLinked,
            ]
            .into_iter()
            .map(move |base| CaseLabel {
                base,
                predicate_linked: p,
            })
        })
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            BaseCase::None => None,
            BaseCase::SubjectLinked => Some("subject_linked"),
            BaseCase::ObjectLinked => Some("object_linked"),
            BaseCase::BothLinked => Some("both_linked"),
        };
        match (base, self.predicate_linked) {
            (None, false) => f.write_str("none"),
            (None, true) => f.write_str("predicate_linked"),
            (Some(b), false) => f.write_str(b),
            (Some(b), true) => write!(f, "{b}+predicate_linked"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub case: CaseLabel,
    pub subject: Vec<Prediction>,
    pub object: Vec<Prediction>,
    pub predicate: Vec<Prediction>,
}

fn predict_node(model: &ViewpointModel, term: &Term) -> Vec<Prediction> {
    match term {
        Term::Blank(_) => Vec::new(),
        _ => local_name(term)
            .map(|l| model.predict_term(&l))
            .unwrap_or_default(),
    }
}

pub fn classify_triple(triple: &Triple, model: &ViewpointModel) -> Classification {
    let subject = predict_node(model, triple.subject());
    let object = predict_node(model, triple.object());
    let predicate = local_name(&Term::Iri(triple.predicate().clone()))
        .map(|l| model.predict_predicate(&l))
        .unwrap_or_default();
    Classification {
        case: CaseLabel::from_flags(
            !subject.is_empty(),
            !object.is_empty(),
            !predicate.is_empty(),
        ),
        subject,
        object,
        predicate,
    }
}

/// Threshold overrides applied on top of a model's own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    theta: f64,
    min_support: u32,
}

impl Thresholds {
    pub fn new(theta: f64, min_support: u32) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(ModelError::InvalidTheta(theta));
        }
        if min_support < 1 {
            return Err(ModelError::InvalidMinSupport);
        }
        Ok(Thresholds { theta, min_support })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn min_support(&self) -> u32 {
        self.min_support
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConversionConfig {
    pub vocabulary: VpVocabulary,
    pub emit_schema: bool,
    pub reified: bool,
    pub thresholds: Option<Thresholds>,
}

struct Emitter<'a> {
    vocab: &'a VpVocabulary,
    reified: bool,
    out: Vec<Triple>,
    seen: BTreeSet<Triple>,
}

impl Emitter<'_> {
    fn push(&mut self, t: Triple) {
        if self.seen.insert(t.clone()) {
            self.out.push(t);
        }
    }

    fn iri_triple(&mut self, s: Term, p: &Iri, o: Term) {
        self.push(Triple::from_iris(s, p.clone(), o).expect("emitted subjects are never literals"));
    }

    fn link(&mut self, resource: &Term, viewpoint: &str) {
        let vocab = self.vocab;
        let v_iri = vocab.viewpoint_iri(viewpoint);
        let rdf_type = Iri::new(RDF_TYPE).expect("well-known IRI");
        if self.reified || resource.is_literal() {
            let stmt = Term::Iri(vocab.statement_iri(resource, viewpoint));
            self.iri_triple(stmt.clone(), &rdf_type, Term::Iri(vocab.statement.clone()));
            self.iri_triple(stmt.clone(), &vocab.subject_statement, resource.clone());
            self.iri_triple(
                stmt.clone(),
                &vocab.predicate_statement,
                Term::Iri(vocab.link_predicate.clone()),
            );
            self.iri_triple(stmt, &vocab.object_statement, Term::Iri(v_iri.clone()));
        } else {
            self.iri_triple(
                resource.clone(),
                &vocab.link_predicate,
                Term::Iri(v_iri.clone()),
            );
        }
        self.iri_triple(
            Term::Iri(v_iri),
            &rdf_type,
            Term::Iri(vocab.viewpoint.clone()),
        );
        self.iri_triple(
            Term::Iri(vocab.link_predicate.clone()),
            &rdf_type,
            Term::Iri(vocab.predicate_with_viewpoint.clone()),
        );
    }
}

/// The statements produced for one triple: the triple itself first, then
/// subject links, object links, and the predicate class with its links.
pub fn convert_triple(
    triple: &Triple,
    classification: &Classification,
    cfg: &ConversionConfig,
) -> Vec<Triple> {
    let mut em = Emitter {
        vocab: &cfg.vocabulary,
        reified: cfg.reified,
        out: Vec::new(),
        seen: BTreeSet::new(),
    };
    em.push(triple.clone());
    for p in &classification.subject {
        em.link(triple.subject(), &p.viewpoint);
    }
    for p in &classification.object {
        em.link(triple.object(), &p.viewpoint);
    }
    if !classification.predicate.is_empty() {
        if let Some((class, value)) = mint_predicate_class(triple.predicate()) {
            let class = Term::Iri(class);
            em.iri_triple(class.clone(), &value, triple.object().clone());
            for p in &classification.predicate {
                em.link(&class, &p.viewpoint);
            }
        }
    }
    em.out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConversionReport {
    pub input_triple_count: usize,
    /// Classified triples per case.
    pub case_counts: BTreeMap<CaseLabel, usize>,
    /// Triples that already used the VP-RDF vocabulary (or were minted
    /// predicate-class triples) and were copied unclassified.
    pub passthrough_count: usize,
    /// Output triples that were not in the input.
    pub emitted_statement_count: usize,
    pub minted_class_count: usize,
    pub unmatched_labels: BTreeSet<String>,
    pub viewpoints_used: BTreeSet<String>,
}

impl ConversionReport {
    pub fn count(&self, case: CaseLabel) -> usize {
        self.case_counts.get(&case).copied().unwrap_or(0)
    }

    pub fn classified_count(&self) -> usize {
        self.case_counts.values().sum()
    }
}

const UNMATCHED_SHOWN: usize = 20;

impl fmt::Display for ConversionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<34} {:>8}", "case", "triples")?;
        for case in CaseLabel::all() {
            writeln!(f, "{:<34} {:>8}", case.to_string(), self.count(case))?;
        }
        writeln!(f, "{:<34} {:>8}", "passthrough", self.passthrough_count)?;
        writeln!(f, "{:<34} {:>8}", "total input", self.input_triple_count)?;
        writeln!(
            f,
            "{:<34} {:>8}",
            "emitted statements", self.emitted_statement_count
        )?;
        writeln!(
            f,
            "{:<34} {:>8}",
            "minted predicate classes", self.minted_class_count
        )?;
        let vps: Vec<&str> = self.viewpoints_used.iter().map(String::as_str).collect();
        writeln!(
            f,
            "viewpoints used: {}",
            if vps.is_empty() {
                "(none)".to_string()
            } else {
                vps.join(", ")
            }
        )?;
        let shown: Vec<&str> = self
            .unmatched_labels
            .iter()
            .take(UNMATCHED_SHOWN)
            .map(String::as_str)
            .collect();
        let n = self.unmatched_labels.len();
        let listing = match n {
            0 => "(none)".to_string(),
            _ if n > UNMATCHED_SHOWN => {
                format!("{}, ... ({} more)", shown.join(", "), n - UNMATCHED_SHOWN)
            }
            _ => shown.join(", "),
        };
        write!(f, "unmatched labels ({n}): {listing}")
    }
}

/// Whether a triple is copied through without classification.
pub fn is_passthrough(triple: &Triple, vocab: &VpVocabulary) -> bool {
    vocab.mentions(triple) || helper_origin(triple).is_some()
}

pub fn convert_graph(
    graph: &Graph,
    model: &ViewpointModel,
    cfg: &ConversionConfig,
) -> (Graph, ConversionReport) {
    let overridden;
    let model = match cfg.thresholds {
        Some(t) => {
            overridden = model
                .with_thresholds(t.theta, t.min_support)
                .expect("thresholds are validated on construction");
            &overridden
        }
        None => model,
    };

    let mut out = Graph::new();
    let mut report = ConversionReport {
        input_triple_count: graph.len(),
        ..Default::default()
    };
    let mut minted = BTreeSet::new();

    if cfg.emit_schema {
        out.extend(cfg.vocabulary.schema_triples());
    }
    for triple in graph {
        if is_passthrough(triple, &cfg.vocabulary) {
            report.passthrough_count += 1;
            out.insert(triple.clone());
            continue;
        }
        let c = classify_triple(triple, model);
        *report.case_counts.entry(c.case).or_default() += 1;

        for (term, preds) in [(triple.subject(), &c.subject), (triple.object(), &c.object)] {
            if preds.is_empty() {
                if let Some(l) = (!term.is_blank()).then(|| local_name(term)).flatten() {
                    report.unmatched_labels.insert(l);
                }
            }
        }
        if c.predicate.is_empty() {
            if let Some(l) = local_name(&Term::Iri(triple.predicate().clone())) {
                report.unmatched_labels.insert(l);
            }
        } else if let Some((class, _)) = mint_predicate_class(triple.predicate()) {
            minted.insert(class);
        }
        for p in c.subject.iter().chain(&c.object).chain(&c.predicate) {
            report.viewpoints_used.insert(p.viewpoint.clone());
        }
        out.extend(convert_triple(triple, &c, cfg));
    }
    report.minted_class_count = minted.len();
    report.emitted_statement_count = out.difference(graph).count();
    (out, report)
}
