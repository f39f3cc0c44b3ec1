#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vprdf_core::model::ViewpointModel;
use vprdf_core::mvo::{
    GlobalConceptDoc, IndividualDoc, LocalAttributeDoc, LocalConceptDoc, MembershipDoc,
    MvpOntology, OntologyDocument, RoleDoc,
};
use vprdf_core::rdf::{BlankNode, Graph, Iri, Literal, Term, Triple};

pub const TRAINING_FIXTURES: &[&str] =
    &["real_estate.json", "real_estate_2.json", "education.json"];
pub const GRAPH_FIXTURES: &[&str] = &["use_cases.nt", "apartment.nt", "use_cases_vp.nt"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn training_fixtures() -> Vec<MvpOntology> {
    TRAINING_FIXTURES
        .iter()
        .map(|n| MvpOntology::from_json(&fixture(n)).unwrap())
        .collect()
}

pub fn fixture_model() -> ViewpointModel {
    ViewpointModel::train(&training_fixtures(), 0.5, 1).unwrap()
}

pub fn ex(name: &str) -> Term {
    Term::iri(format!("http://ex.org/{name}")).unwrap()
}

pub fn triple(s: Term, p: &str, o: Term) -> Triple {
    Triple::from_iris(s, Iri::new(format!("http://ex.org/{p}")).unwrap(), o).unwrap()
}

// Raw label spellings used by the random generators. Training documents
// use the same pool so that random graphs hit learned labels.
pub fn label_pool() -> Vec<String> {
    let mut pool: Vec<String> = (0..40)
        .map(|i| match i % 4 {
            0 => format!("Lbl-{i}"),
            1 => format!("lbl_{i}"),
            2 => format!("LBL_{i}"),
            _ => format!("lbl-{i}"),
        })
        .collect();
    pool.extend(
        [
            "Rich_Tenant",
            "Large_Apartment",
            "rent",
            "surface",
            "price",
            "height",
            "Professor",
            "lives_in",
            "address",
            "supervises",
            "Apartment_N1",
        ]
        .map(String::from),
    );
    pool
}

const NAMESPACES: &[&str] = &["http://ex.org/", "http://other.example/ns#", "urn:x:"];

const EXTRA_NAMES: &[&str] = &["John", "Constantine", "apartment3", "is", "knows", "city"];

const LEXICAL: &[&str] = &[
    "120",
    "Rich-Tenant",
    "a \"quoted\" word",
    "line\nbreak",
    "tab\there",
    "back\\slash",
    "caf\u{e9}",
    "ctl\u{1}",
    "",
    " surface ",
];

fn random_name(rng: &mut ChaCha8Rng, pool: &[String]) -> String {
    if rng.random_bool(0.7) {
        pool.choose(rng).unwrap().clone()
    } else {
        EXTRA_NAMES.choose(rng).unwrap().to_string()
    }
}

fn random_iri(rng: &mut ChaCha8Rng, pool: &[String]) -> Iri {
    let ns = NAMESPACES.choose(rng).unwrap();
    Iri::new(format!("{ns}{}", random_name(rng, pool))).unwrap()
}

fn random_object(rng: &mut ChaCha8Rng, pool: &[String]) -> Term {
    match rng.random_range(0..10) {
        0..=4 => Term::Iri(random_iri(rng, pool)),
        5 => Term::Blank(BlankNode::new(format!("b{}", rng.random_range(0..5))).unwrap()),
        6 => Term::Literal(
            Literal::lang(
                LEXICAL.choose(rng).unwrap().to_string(),
                ["en", "fr", "en-GB"].choose(rng).unwrap().to_string(),
            )
            .unwrap(),
        ),
        7 => Term::Literal(Literal::typed(
            LEXICAL.choose(rng).unwrap().to_string(),
            Iri::new("http://www.w3.org/2001/XMLSchema#string").unwrap(),
        )),
        _ => Term::Literal(Literal::plain(if rng.random_bool(0.5) {
            LEXICAL.choose(rng).unwrap().to_string()
        } else {
            random_name(rng, pool)
        })),
    }
}

pub fn random_triple(rng: &mut ChaCha8Rng, pool: &[String]) -> Triple {
    let subject = if rng.random_bool(0.85) {
        Term::Iri(random_iri(rng, pool))
    } else {
        Term::Blank(BlankNode::new(format!("b{}", rng.random_range(0..5))).unwrap())
    };
    let predicate = random_iri(rng, pool);
    let object = random_object(rng, pool);
    Triple::from_iris(subject, predicate, object).unwrap()
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_triples: usize) -> Graph {
    let pool = label_pool();
    let n = rng.random_range(0..=max_triples);
    (0..n).map(|_| random_triple(rng, &pool)).collect()
}

/// A random training set of 1 to 10 ontologies with at most 30 names each.
pub fn random_training_set(rng: &mut ChaCha8Rng) -> Vec<OntologyDocument> {
    let n = rng.random_range(1..=10);
    (0..n).map(|_| random_ontology(rng)).collect()
}

pub fn random_ontology(rng: &mut ChaCha8Rng) -> OntologyDocument {
    let all_vps = ["Finance", "size", "Univ-Education", "history"];
    let n_vps = rng.random_range(0..=all_vps.len());
    let viewpoints: Vec<String> = all_vps
        .choose_multiple(rng, n_vps)
        .map(|s| s.to_string())
        .collect();
    let subset = |rng: &mut ChaCha8Rng| -> Vec<String> {
        let k = rng.random_range(1..=viewpoints.len());
        viewpoints.choose_multiple(rng, k).cloned().collect()
    };

    let mut names = label_pool();
    names.shuffle(rng);
    names.truncate(rng.random_range(0..=29));

    let mut root = GlobalConceptDoc {
        name: "Root_Concept".into(),
        ..Default::default()
    };
    let mut global_concepts = Vec::new();
    let mut local_concepts: Vec<LocalConceptDoc> = Vec::new();
    let mut roles = Vec::new();
    let mut pending_individuals = Vec::new();
    for name in names {
        let local = !viewpoints.is_empty() && rng.random_bool(0.75);
        match rng.random_range(0..4) {
            0 if local => local_concepts.push(LocalConceptDoc {
                name,
                viewpoints: subset(rng),
                subsumer: "root_concept".into(),
                parent: None,
            }),
            0 => global_concepts.push(GlobalConceptDoc {
                name,
                parent: Some("root_concept".into()),
                ..Default::default()
            }),
            1 if local => root.local_attributes.push(LocalAttributeDoc {
                name,
                viewpoints: subset(rng),
            }),
            1 => root.attributes.push(name),
            2 => roles.push(RoleDoc {
                name,
                domain: "root_concept".into(),
                range: "root_concept".into(),
                viewpoints: if local { subset(rng) } else { Vec::new() },
            }),
            _ => pending_individuals.push(name),
        }
    }

    let individuals = pending_individuals
        .into_iter()
        .map(|name| {
            let mut memberships = Vec::new();
            for v in &viewpoints {
                let pool: Vec<&LocalConceptDoc> = local_concepts
                    .iter()
                    .filter(|c| c.viewpoints.contains(v))
                    .collect();
                if !pool.is_empty() && rng.random_bool(0.5) {
                    memberships.push(MembershipDoc {
                        local_concept: pool.choose(rng).unwrap().name.clone(),
                        viewpoint: v.clone(),
                    });
                }
            }
            IndividualDoc {
                name,
                global_concept: "root_concept".into(),
                memberships,
                values: BTreeMap::new(),
            }
        })
        .collect();

    global_concepts.insert(0, root);
    OntologyDocument {
        format_version: "1".into(),
        domain: ["real_estate", "education"]
            .choose(rng)
            .unwrap()
            .to_string(),
        viewpoints,
        global_concepts,
        local_concepts,
        roles,
        individuals,
    }
}

fn norm(s: &str) -> String {
    s.trim().to_lowercase().replace('-', "_")
}

/// (label, viewpoint, is_relational) read straight off a document.
pub fn oracle_links(doc: &OntologyDocument) -> BTreeSet<(String, String, bool)> {
    let mut out = BTreeSet::new();
    for c in &doc.local_concepts {
        for v in &c.viewpoints {
            out.insert((norm(&c.name), norm(v), false));
        }
    }
    for g in &doc.global_concepts {
        for a in &g.local_attributes {
            for v in &a.viewpoints {
                out.insert((norm(&a.name), norm(v), true));
            }
        }
    }
    for r in &doc.roles {
        for v in &r.viewpoints {
            out.insert((norm(&r.name), norm(v), true));
        }
    }
    for i in &doc.individuals {
        for m in &i.memberships {
            out.insert((norm(&i.name), norm(&m.viewpoint), false));
        }
    }
    out
}

/// Recounts from scratch: (viewpoint, support, containment) for every
/// viewpoint whose support ratio reaches `theta`, ordered by descending
/// ratio then name.
pub fn oracle_predict(
    docs: &[OntologyDocument],
    label: &str,
    theta: f64,
    min_support: u32,
    predicate: bool,
) -> Vec<(String, u32, u32)> {
    let mut containment = 0u32;
    let mut support: BTreeMap<String, u32> = BTreeMap::new();
    let mut relational = false;
    for doc in docs {
        let links = oracle_links(doc);
        let mine: Vec<_> = links.iter().filter(|(l, _, _)| l == label).collect();
        if !mine.is_empty() {
            containment += 1;
        }
        let vps: BTreeSet<&String> = mine.iter().map(|(_, v, _)| v).collect();
        for v in vps {
            *support.entry(v.clone()).or_default() += 1;
        }
        relational |= mine.iter().any(|(_, _, r)| *r);
    }
    if predicate && containment > 0 && !relational {
        return Vec::new();
    }
    // theta is k/4 for the thresholds exercised here, so compare exactly
    let k = (theta * 4.0).round() as u32;
    let mut out: Vec<(String, u32, u32)> = support
        .into_iter()
        .filter(|(_, s)| 4 * s >= k * containment && *s >= min_support)
        .map(|(v, s)| (v, s, containment))
        .collect();
    // s1/c > s2/c with a shared denominator reduces to s1 > s2
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn all_labels(docs: &[OntologyDocument]) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = docs
        .iter()
        .flat_map(oracle_links)
        .map(|(l, _, _)| l)
        .collect();
    out.extend(label_pool().iter().map(|l| norm(l)));
    out.insert("never_seen".into());
    out
}
