//! Instantiated multi-viewpoints ontologies.
//!
//! An ontology has a consensual level (global concepts, global attributes,
//! global roles, instances of global concepts only) that is linked to no
//! viewpoint, and a heterogeneous level (local concepts, local attributes,
//! local roles, individuals with local memberships) whose elements are each
//! linked to one or more viewpoints. The loader reads the JSON document
//! format below, normalizes every label, and validates cross references.
//!
//! ```json
//! {
//!   "format_version": "1",
//!   "domain": "real_estate",
//!   "viewpoints": ["size", "finance"],
//!   "global_concepts": [
//!     {"name": "apartment", "attributes": ["address"],
//!      "local_attributes": [{"name": "surface", "viewpoints": ["size"]}]}
//!   ],
//!   "local_concepts": [
//!     {"name": "large_apartment", "viewpoints": ["size"], "subsumer": "apartment"}
//!   ],
//!   "roles": [{"name": "lives_in", "domain": "tenant", "range": "apartment"}],
//!   "individuals": [
//!     {"name": "apartment_n1", "global_concept": "apartment",
//!      "memberships": [{"local_concept": "large_apartment", "viewpoint": "size"}],
//!      "values": {"surface": 120}}
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{is_iri_safe, normalize_label};

pub const MVO_FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum MvoError {
    #[error("malformed ontology document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format_version {found:?}, expected \"1\"")]
    UnsupportedVersion { found: String },
    #[error("{kind} has an empty label")]
    EmptyLabel { kind: &'static str },
    #[error("viewpoint name `{0}` cannot be used inside an IRI")]
    InvalidViewpointName(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("{kind} `{name}` references unknown {target} `{reference}`")]
    Dangling {
        kind: &'static str,
        name: String,
        target: &'static str,
        reference: String,
    },
    #[error("{kind} `{name}` must be linked to at least one viewpoint")]
    EmptyViewpoints { kind: &'static str, name: String },
    #[error(
        "individual `{individual}` has more than one local concept under viewpoint `{viewpoint}`"
    )]
    DuplicateMembership {
        individual: String,
        viewpoint: String,
    },
    #[error("individual `{individual}`: local concept `{local_concept}` is not declared under viewpoint `{viewpoint}`")]
    MembershipViewpoint {
        individual: String,
        local_concept: String,
        viewpoint: String,
    },
    #[error("local concept `{name}` and its parent `{parent}` share no viewpoint")]
    LocalParentViewpoint { name: String, parent: String },
    #[error("{kind} hierarchy contains a cycle through `{name}`")]
    Cycle { kind: &'static str, name: String },
}

// ---------------------------------------------------------------------------
// Document (file) representation

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyDocument {
    pub format_version: String,
    pub domain: String,
    #[serde(default)]
    pub viewpoints: Vec<String>,
    #[serde(default)]
    pub global_concepts: Vec<GlobalConceptDoc>,
    #[serde(default)]
    pub local_concepts: Vec<LocalConceptDoc>,
    #[serde(default)]
    pub roles: Vec<RoleDoc>,
    #[serde(default)]
    pub individuals: Vec<IndividualDoc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalConceptDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub local_attributes: Vec<LocalAttributeDoc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalAttributeDoc {
    pub name: String,
    pub viewpoints: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalConceptDoc {
    pub name: String,
    pub viewpoints: Vec<String>,
    pub subsumer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleDoc {
    pub name: String,
    pub domain: String,
    pub range: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub viewpoints: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndividualDoc {
    pub name: String,
    pub global_concept: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub memberships: Vec<MembershipDoc>,
    /// Attribute values. Accepted and kept, but never used for learning.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipDoc {
    pub local_concept: String,
    pub viewpoint: String,
}

// ---------------------------------------------------------------------------
// Validated model

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalConcept {
    pub name: String,
    pub parent: Option<String>,
    pub global_attributes: BTreeSet<String>,
    /// attribute label -> viewpoints it is defined under (never empty)
    pub local_attributes: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConcept {
    pub name: String,
    pub viewpoints: BTreeSet<String>,
    pub subsumer: String,
    pub local_parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub name: String,
    pub domain: String,
    pub range: String,
    /// Empty for a global role.
    pub viewpoints: BTreeSet<String>,
}

impl Role {
    pub fn is_global(&self) -> bool {
        self.viewpoints.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    pub name: String,
    pub global_concept: String,
    /// viewpoint -> local concept; at most one per viewpoint by construction
    pub local_memberships: BTreeMap<String, String>,
    /// attribute label -> JSON text of the value
    pub values: BTreeMap<String, String>,
}

/// A validated, immutable multi-viewpoints ontology. Collections are keyed
/// by normalized label, so declaration order in the source file does not
/// affect equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvpOntology {
    domain: String,
    viewpoints: BTreeSet<String>,
    global_concepts: BTreeMap<String, GlobalConcept>,
    local_concepts: BTreeMap<String, LocalConcept>,
    roles: BTreeMap<String, Role>,
    individuals: BTreeMap<String, Individual>,
}

/// Kind of ontology element a link observation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Concept,
    Attribute,
    Role,
    Individual,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Concept => "concept",
            ElementKind::Attribute => "attribute",
            ElementKind::Role => "role",
            ElementKind::Individual => "individual",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One (local element, viewpoint) pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkObservation {
    pub label: String,
    pub kind: ElementKind,
    pub viewpoint: String,
}

impl MvpOntology {
    pub fn from_json(text: &str) -> Result<Self, MvoError> {
        let doc: OntologyDocument = serde_json::from_str(text)?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: OntologyDocument) -> Result<Self, MvoError> {
        Loader.load(doc)
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn viewpoints(&self) -> &BTreeSet<String> {
        &self.viewpoints
    }

    pub fn global_concepts(&self) -> &BTreeMap<String, GlobalConcept> {
        &self.global_concepts
    }

    pub fn local_concepts(&self) -> &BTreeMap<String, LocalConcept> {
        &self.local_concepts
    }

    pub fn roles(&self) -> &BTreeMap<String, Role> {
        &self.roles
    }

    pub fn individuals(&self) -> &BTreeMap<String, Individual> {
        &self.individuals
    }

    /// Every (local element, viewpoint) pair of the ontology. Global
    /// elements contribute nothing.
    pub fn extract_links(&self) -> BTreeSet<LinkObservation> {
        let mut out = BTreeSet::new();
        let mut push = |label: &str, kind, viewpoint: &str| {
            out.insert(LinkObservation {
                label: label.to_string(),
                kind,
                viewpoint: viewpoint.to_string(),
            });
        };
        for lc in self.local_concepts.values() {
            for v in &lc.viewpoints {
                push(&lc.name, ElementKind::Concept, v);
            }
        }
        for gc in self.global_concepts.values() {
            for (attr, vps) in &gc.local_attributes {
                for v in vps {
                    push(attr, ElementKind::Attribute, v);
                }
            }
        }
        for role in self.roles.values() {
            for v in &role.viewpoints {
                push(&role.name, ElementKind::Role, v);
            }
        }
        for ind in self.individuals.values() {
            for v in ind.local_memberships.keys() {
                push(&ind.name, ElementKind::Individual, v);
            }
        }
        out
    }

    /// Back to the file representation, with every list in sorted order.
    pub fn to_document(&self) -> OntologyDocument {
        OntologyDocument {
            format_version: MVO_FORMAT_VERSION.to_string(),
            domain: self.domain.clone(),
            viewpoints: self.viewpoints.iter().cloned().collect(),
            global_concepts: self
                .global_concepts
                .values()
                .map(|gc| GlobalConceptDoc {
                    name: gc.name.clone(),
                    parent: gc.parent.clone(),
                    attributes: gc.global_attributes.iter().cloned().collect(),
                    local_attributes: gc
                        .local_attributes
                        .iter()
                        .map(|(name, vps)| LocalAttributeDoc {
                            name: name.clone(),
                            viewpoints: vps.iter().cloned().collect(),
                        })
                        .collect(),
                })
                .collect(),
            local_concepts: self
                .local_concepts
                .values()
                .map(|lc| LocalConceptDoc {
                    name: lc.name.clone(),
                    viewpoints: lc.viewpoints.iter().cloned().collect(),
                    subsumer: lc.subsumer.clone(),
                    parent: lc.local_parent.clone(),
                })
                .collect(),
            roles: self
                .roles
                .values()
                .map(|r| RoleDoc {
                    name: r.name.clone(),
                    domain: r.domain.clone(),
                    range: r.range.clone(),
                    viewpoints: r.viewpoints.iter().cloned().collect(),
                })
                .collect(),
            individuals: self
                .individuals
                .values()
                .map(|ind| IndividualDoc {
                    name: ind.name.clone(),
                    global_concept: ind.global_concept.clone(),
                    memberships: ind
                        .local_memberships
                        .iter()
                        .map(|(v, lc)| MembershipDoc {
                            local_concept: lc.clone(),
                            viewpoint: v.clone(),
                        })
                        .collect(),
                    values: ind
                        .values
                        .iter()
                        .map(|(k, v)| {
                            let value = serde_json::from_str(v)
                                .unwrap_or_else(|_| serde_json::Value::String(v.clone()));
                            (k.clone(), value)
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Pretty-printed JSON with a trailing newline; byte-stable for equal
    /// ontologies.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_document())
            .expect("ontology documents always serialize");
        text.push('\n');
        text
    }
}

/// Reads one ontology file from a JSON string.
pub fn load_mvo(document: &str) -> Result<MvpOntology, MvoError> {
    MvpOntology::from_json(document)
}

struct Loader;

fn label(raw: &str, kind: &'static str) -> Result<String, MvoError> {
    let l = normalize_label(raw);
    if l.is_empty() {
        return Err(MvoError::EmptyLabel { kind });
    }
    Ok(l)
}

impl Loader {
    fn load(self, doc: OntologyDocument) -> Result<MvpOntology, MvoError> {
        if doc.format_version != MVO_FORMAT_VERSION {
            return Err(MvoError::UnsupportedVersion {
                found: doc.format_version,
            });
        }
        let domain = normalize_label(&doc.domain);

        let mut viewpoints = BTreeSet::new();
        for raw in &doc.viewpoints {
            let v = label(raw, "viewpoint")?;
            if !is_iri_safe(&v) {
                return Err(MvoError::InvalidViewpointName(v));
            }
            if !viewpoints.insert(v.clone()) {
                return Err(MvoError::Duplicate {
                    kind: "viewpoint",
                    name: v,
                });
            }
        }

        let viewpoint_set = |kind: &'static str,
                             name: &str,
                             raws: &[String],
                             allow_empty: bool|
         -> Result<BTreeSet<String>, MvoError> {
            let mut set = BTreeSet::new();
            for raw in raws {
                let v = label(raw, "viewpoint reference")?;
                if !viewpoints.contains(&v) {
                    return Err(MvoError::Dangling {
                        kind,
                        name: name.to_string(),
                        target: "viewpoint",
                        reference: v,
                    });
                }
                set.insert(v);
            }
            if set.is_empty() && !allow_empty {
                return Err(MvoError::EmptyViewpoints {
                    kind,
                    name: name.to_string(),
                });
            }
            Ok(set)
        };

        // global concepts
        let mut global_concepts = BTreeMap::new();
        for gc in &doc.global_concepts {
            let name = label(&gc.name, "global concept")?;
            let parent = gc
                .parent
                .as_deref()
                .map(|p| label(p, "global concept parent"))
                .transpose()?;
            let mut global_attributes = BTreeSet::new();
            for a in &gc.attributes {
                global_attributes.insert(label(a, "global attribute")?);
            }
            let mut local_attributes = BTreeMap::new();
            for la in &gc.local_attributes {
                let attr = label(&la.name, "local attribute")?;
                let vps = viewpoint_set("local attribute", &attr, &la.viewpoints, false)?;
                if local_attributes.insert(attr.clone(), vps).is_some() {
                    return Err(MvoError::Duplicate {
                        kind: "local attribute",
                        name: format!("{name}.{attr}"),
                    });
                }
            }
            let concept = GlobalConcept {
                name: name.clone(),
                parent,
                global_attributes,
                local_attributes,
            };
            if global_concepts.insert(name.clone(), concept).is_some() {
                return Err(MvoError::Duplicate {
                    kind: "global concept",
                    name,
                });
            }
        }
        for gc in global_concepts.values() {
            if let Some(p) = &gc.parent {
                if !global_concepts.contains_key(p) {
                    return Err(MvoError::Dangling {
                        kind: "global concept",
                        name: gc.name.clone(),
                        target: "global concept",
                        reference: p.clone(),
                    });
                }
            }
        }
        check_acyclic("global concept", &global_concepts, |gc| gc.parent.as_ref())?;

        // local concepts
        let mut local_concepts = BTreeMap::new();
        for lc in &doc.local_concepts {
            let name = label(&lc.name, "local concept")?;
            if global_concepts.contains_key(&name) {
                return Err(MvoError::Duplicate {
                    kind: "concept",
                    name,
                });
            }
            let vps = viewpoint_set("local concept", &name, &lc.viewpoints, false)?;
            let subsumer = label(&lc.subsumer, "subsumer")?;
            if !global_concepts.contains_key(&subsumer) {
                return Err(MvoError::Dangling {
                    kind: "local concept",
                    name,
                    target: "global concept",
                    reference: subsumer,
                });
            }
            let local_parent = lc
                .parent
                .as_deref()
                .map(|p| label(p, "local concept parent"))
                .transpose()?;
            let concept = LocalConcept {
                name: name.clone(),
                viewpoints: vps,
                subsumer,
                local_parent,
            };
            if local_concepts.insert(name.clone(), concept).is_some() {
                return Err(MvoError::Duplicate {
                    kind: "local concept",
                    name,
                });
            }
        }
        for lc in local_concepts.values() {
            if let Some(p) = &lc.local_parent {
                let Some(parent) = local_concepts.get(p) else {
                    return Err(MvoError::Dangling {
                        kind: "local concept",
                        name: lc.name.clone(),
                        target: "local concept",
                        reference: p.clone(),
                    });
                };
                if lc.viewpoints.is_disjoint(&parent.viewpoints) {
                    return Err(MvoError::LocalParentViewpoint {
                        name: lc.name.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        check_acyclic("local concept", &local_concepts, |lc| {
            lc.local_parent.as_ref()
        })?;

        let is_concept =
            |c: &str| global_concepts.contains_key(c) || local_concepts.contains_key(c);

        // roles
        let mut roles = BTreeMap::new();
        for r in &doc.roles {
            let name = label(&r.name, "role")?;
            let domain = label(&r.domain, "role domain")?;
            let range = label(&r.range, "role range")?;
            for (end, target) in [(&domain, "domain concept"), (&range, "range concept")] {
                if !is_concept(end) {
                    return Err(MvoError::Dangling {
                        kind: "role",
                        name,
                        target,
                        reference: end.clone(),
                    });
                }
            }
            let vps = viewpoint_set("role", &name, &r.viewpoints, true)?;
            let role = Role {
                name: name.clone(),
                domain,
                range,
                viewpoints: vps,
            };
            if roles.insert(name.clone(), role).is_some() {
                return Err(MvoError::Duplicate { kind: "role", name });
            }
        }

        // individuals
        let mut individuals = BTreeMap::new();
        for ind in &doc.individuals {
            let name = label(&ind.name, "individual")?;
            let global_concept = label(&ind.global_concept, "individual concept")?;
            if !global_concepts.contains_key(&global_concept) {
                return Err(MvoError::Dangling {
                    kind: "individual",
                    name,
                    target: "global concept",
                    reference: global_concept,
                });
            }
            let mut local_memberships = BTreeMap::new();
            for m in &ind.memberships {
                let lc_name = label(&m.local_concept, "membership concept")?;
                let v = label(&m.viewpoint, "membership viewpoint")?;
                if !viewpoints.contains(&v) {
                    return Err(MvoError::Dangling {
                        kind: "individual",
                        name,
                        target: "viewpoint",
                        reference: v,
                    });
                }
                let Some(lc) = local_concepts.get(&lc_name) else {
                    return Err(MvoError::Dangling {
                        kind: "individual",
                        name,
                        target: "local concept",
                        reference: lc_name,
                    });
                };
                if !lc.viewpoints.contains(&v) {
                    return Err(MvoError::MembershipViewpoint {
                        individual: name,
                        local_concept: lc_name,
                        viewpoint: v,
                    });
                }
                if local_memberships.insert(v.clone(), lc_name).is_some() {
                    return Err(MvoError::DuplicateMembership {
                        individual: name,
                        viewpoint: v,
                    });
                }
            }
            let values = ind
                .values
                .iter()
                .map(|(k, v)| Ok((label(k, "attribute value key")?, v.to_string())))
                .collect::<Result<BTreeMap<_, _>, MvoError>>()?;
            let individual = Individual {
                name: name.clone(),
                global_concept,
                local_memberships,
                values,
            };
            if individuals.insert(name.clone(), individual).is_some() {
                return Err(MvoError::Duplicate {
                    kind: "individual",
                    name,
                });
            }
        }

        Ok(MvpOntology {
            domain,
            viewpoints,
            global_concepts,
            local_concepts,
            roles,
            individuals,
        })
    }
}

fn check_acyclic<T>(
    kind: &'static str,
    nodes: &BTreeMap<String, T>,
    parent: impl Fn(&T) -> Option<&String>,
) -> Result<(), MvoError> {
    for start in nodes.keys() {
        let mut seen = BTreeSet::new();
        let mut cur = start;
        while let Some(p) = nodes.get(cur).and_then(&parent) {
            if !seen.insert(cur) {
                return Err(MvoError::Cycle {
                    kind,
                    name: start.clone(),
                });
            }
            cur = p;
        }
    }
    Ok(())
}
