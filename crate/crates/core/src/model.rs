//! Frequency model linking terms and relations to viewpoints.
//!
//! Training counts, per label, how many training ontologies contain it as a
//! local element (`containment`) and how many of those link it to each
//! viewpoint (`support`). Counting is by ontology presence, so a large
//! ontology weighs the same as a small one. A viewpoint is predicted for a
//! label when `support / containment >= theta` and `support >= min_support`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mvo::{ElementKind, MvpOntology};
use crate::rdf::{is_iri_safe, NORMALIZATION_SCHEME};

pub const MODEL_FORMAT_VERSION: &str = "1";
pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_MIN_SUPPORT: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot train on an empty list of ontologies")]
    NoOntologies,
    #[error("theta must lie in [0, 1], got {0}")]
    InvalidTheta(f64),
    #[error("min_support must be at least 1")]
    InvalidMinSupport,
    #[error("model format_version {found:?} is not supported (expected \"1\")")]
    VersionMismatch { found: String },
    #[error("model uses label normalization {found:?}, expected \"lowercase_underscore_v1\"")]
    NormalizationMismatch { found: String },
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
}

/// One predicted viewpoint for a label.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub viewpoint: String,
    /// support / containment, in (0, 1]
    pub confidence: f64,
    pub support: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViewpointModel {
    theta: f64,
    min_support: u32,
    support: BTreeMap<String, BTreeMap<String, u32>>,
    containment: BTreeMap<String, u32>,
    kinds: BTreeMap<String, BTreeMap<ElementKind, u32>>,
}

fn check_thresholds(theta: f64, min_support: u32) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(ModelError::InvalidTheta(theta));
    }
    if min_support < 1 {
        return Err(ModelError::InvalidMinSupport);
    }
    Ok(())
}

impl ViewpointModel {
    /// Trains on a non-empty list of ontologies. Ontologies from different
    /// domains are accepted with a warning.
    pub fn train(
        ontologies: &[MvpOntology],
        theta: f64,
        min_support: u32,
    ) -> Result<Self, ModelError> {
        check_thresholds(theta, min_support)?;
        let first = ontologies.first().ok_or(ModelError::NoOntologies)?;
        if let Some(other) = ontologies.iter().find(|o| o.domain() != first.domain()) {
            log::warn!(
                "training ontologies span several domains (`{}`, `{}`)",
                first.domain(),
                other.domain()
            );
        }

        let mut model = ViewpointModel {
            theta,
            min_support,
            support: BTreeMap::new(),
            containment: BTreeMap::new(),
            kinds: BTreeMap::new(),
        };
        for onto in ontologies {
            let links = onto.extract_links();
            let labels: BTreeSet<&str> = links.iter().map(|l| l.label.as_str()).collect();
            let pairs: BTreeSet<(&str, &str)> = links
                .iter()
                .map(|l| (l.label.as_str(), l.viewpoint.as_str()))
                .collect();
            let kinds: BTreeSet<(&str, ElementKind)> =
                links.iter().map(|l| (l.label.as_str(), l.kind)).collect();

            for label in labels {
                *model.containment.entry(label.to_string()).or_default() += 1;
            }
            for (label, v) in pairs {
                *model
                    .support
                    .entry(label.to_string())
                    .or_default()
                    .entry(v.to_string())
                    .or_default() += 1;
            }
            for (label, kind) in kinds {
                *model
                    .kinds
                    .entry(label.to_string())
                    .or_default()
                    .entry(kind)
                    .or_default() += 1;
            }
        }
        Ok(model)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn min_support(&self) -> u32 {
        self.min_support
    }

    /// The same counts under different thresholds.
    pub fn with_thresholds(&self, theta: f64, min_support: u32) -> Result<Self, ModelError> {
        check_thresholds(theta, min_support)?;
        Ok(ViewpointModel {
            theta,
            min_support,
            ..self.clone()
        })
    }

    pub fn support(&self, label: &str, viewpoint: &str) -> u32 {
        self.support
            .get(label)
            .and_then(|m| m.get(viewpoint))
            .copied()
            .unwrap_or(0)
    }

    pub fn containment(&self, label: &str) -> u32 {
        self.containment.get(label).copied().unwrap_or(0)
    }

    /// Kinds observed for a label, with the number of ontologies each was
    /// seen in.
    pub fn kind_hint(&self, label: &str) -> Option<&BTreeMap<ElementKind, u32>> {
        self.kinds.get(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.containment.keys().map(String::as_str)
    }

    pub fn viewpoints(&self) -> BTreeSet<&str> {
        self.support
            .values()
            .flat_map(|m| m.keys().map(String::as_str))
            .collect()
    }

    /// Viewpoints a term (concept or individual label) is linked to,
    /// sorted by descending confidence, then name.
    pub fn predict_term(&self, label: &str) -> Vec<Prediction> {
        let Some(per_vp) = self.support.get(label) else {
            return Vec::new();
        };
        let containment = self.containment(label);
        let mut out: Vec<Prediction> = per_vp
            .iter()
            .filter_map(|(v, &support)| {
                let confidence = support as f64 / containment as f64;
                (confidence >= self.theta && support >= self.min_support).then(|| Prediction {
                    viewpoint: v.clone(),
                    confidence,
                    support,
                })
            })
            .collect();
        out.sort_by(|a, b| {
            b.confidence
                .total_cmp(&a.confidence)
                .then_with(|| a.viewpoint.cmp(&b.viewpoint))
        });
        out
    }

    /// Like [`predict_term`](Self::predict_term) for a predicate label.
    /// Labels only ever observed as concepts or individuals are not
    /// predicates and predict nothing; labels without any kind record are
    /// matched on all observations.
    pub fn predict_predicate(&self, label: &str) -> Vec<Prediction> {
        if let Some(kinds) = self.kinds.get(label) {
            let relational = kinds
                .keys()
                .any(|k| matches!(k, ElementKind::Role | ElementKind::Attribute));
            if !relational {
                return Vec::new();
            }
        }
        self.predict_term(label)
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            containment: self.containment.clone(),
            format_version: MODEL_FORMAT_VERSION.to_string(),
            kinds: self
                .kinds
                .iter()
                .map(|(label, ks)| {
                    let list = ks
                        .iter()
                        .flat_map(|(k, &n)| std::iter::repeat_n(*k, n as usize))
                        .collect();
                    (label.clone(), list)
                })
                .collect(),
            min_support: self.min_support,
            normalization: NORMALIZATION_SCHEME.to_string(),
            support: self.support.clone(),
            theta: self.theta,
        };
        let mut text =
            serde_json::to_string_pretty(&doc).expect("model documents always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        // check the version before the full schema so old files get a clear error
        let raw: serde_json::Value = serde_json::from_str(text)?;
        match raw.get("format_version") {
            Some(serde_json::Value::String(v)) if v == MODEL_FORMAT_VERSION => {}
            Some(other) => {
                let found = other
                    .as_str()
                    .map(str::to_string)
                    .unwrap_or_else(|| other.to_string());
                return Err(ModelError::VersionMismatch { found });
            }
            None => return Err(ModelError::Malformed("missing format_version".into())),
        }
        let doc: ModelDocument = serde_json::from_value(raw)?;
        if doc.normalization != NORMALIZATION_SCHEME {
            return Err(ModelError::NormalizationMismatch {
                found: doc.normalization,
            });
        }
        check_thresholds(doc.theta, doc.min_support)?;

        for (label, per_vp) in &doc.support {
            let c = doc.containment.get(label).copied().unwrap_or(0);
            if c == 0 {
                return Err(ModelError::Malformed(format!(
                    "label `{label}` has support but no containment"
                )));
            }
            for (v, &s) in per_vp {
                if s > c {
                    return Err(ModelError::Malformed(format!(
                        "support[{label}, {v}] = {s} exceeds containment {c}"
                    )));
                }
                if !is_iri_safe(v) {
                    return Err(ModelError::Malformed(format!(
                        "viewpoint name `{v}` cannot be used inside an IRI"
                    )));
                }
            }
        }
        let kinds = doc
            .kinds
            .into_iter()
            .map(|(label, list)| {
                let mut counts = BTreeMap::new();
                for k in list {
                    *counts.entry(k).or_default() += 1;
                }
                (label, counts)
            })
            .collect();

        Ok(ViewpointModel {
            theta: doc.theta,
            min_support: doc.min_support,
            support: doc.support,
            containment: doc.containment,
            kinds,
        })
    }
}

/// On-disk layout; fields are declared in sorted order so the pretty
/// printer emits sorted keys.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    containment: BTreeMap<String, u32>,
    format_version: String,
    kinds: BTreeMap<String, Vec<ElementKind>>,
    min_support: u32,
    normalization: String,
    support: BTreeMap<String, BTreeMap<String, u32>>,
    theta: f64,
}

pub fn train(
    ontologies: &[MvpOntology],
    theta: f64,
    min_support: u32,
) -> Result<ViewpointModel, ModelError> {
    ViewpointModel::train(ontologies, theta, min_support)
}

pub fn save_model(model: &ViewpointModel) -> String {
    model.to_json()
}

pub fn load_model(document: &str) -> Result<ViewpointModel, ModelError> {
    ViewpointModel::from_json(document)
}
