//! Seeded synthetic corpora: training ontologies, an RDF graph drawn from
//! the same vocabulary, and gold viewpoint labels for every triple.
//!
//! A single ground-truth ontology is generated first. Each training
//! ontology is a copy of it in which a `noise_rate` fraction of links
//! (individual memberships, local attribute and local role viewpoints) is
//! moved to a different viewpoint. Local concept declarations are never
//! perturbed because memberships refer to them. Gold labels come from the
//! ground truth: a triple is relevant to every viewpoint that its subject,
//! object or predicate is linked to.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mvo::{
    GlobalConceptDoc, IndividualDoc, LocalAttributeDoc, LocalConceptDoc, MembershipDoc,
    MvpOntology, OntologyDocument, RoleDoc, MVO_FORMAT_VERSION,
};
use crate::query::GoldLabels;
use crate::rdf::{local_name, Graph, Iri, Literal, Term, Triple};

pub const SYNTH_NAMESPACE: &str = "http://ex.org/synth/";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    pub n_viewpoints: usize,
    pub n_concepts: usize,
    pub n_individuals: usize,
    pub n_triples: usize,
    pub noise_rate: f64,
    pub n_ontologies: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 1,
            n_viewpoints: 3,
            n_concepts: 20,
            n_individuals: 50,
            n_triples: 2000,
            noise_rate: 0.0,
            n_ontologies: 5,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("noise_rate must lie in [0, 1], got {0}")]
    NoiseRate(f64),
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, v) in [
            ("n_viewpoints", self.n_viewpoints),
            ("n_concepts", self.n_concepts),
            ("n_individuals", self.n_individuals),
            ("n_triples", self.n_triples),
            ("n_ontologies", self.n_ontologies),
        ] {
            if v == 0 {
                return Err(SynthError::NotPositive(name));
            }
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(SynthError::NoiseRate(self.noise_rate));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub ontologies: Vec<MvpOntology>,
    pub graph: Graph,
    pub gold: GoldLabels,
    /// Ground-truth label -> viewpoints.
    pub truth: BTreeMap<String, BTreeSet<String>>,
}

pub fn generate_synthetic(params: &SynthParams) -> Result<SyntheticCorpus, SynthError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let truth_doc = ground_truth(params, &mut rng);
    let truth_onto =
        MvpOntology::from_document(truth_doc.clone()).expect("generated ground truth is valid");
    let mut truth: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for link in truth_onto.extract_links() {
        truth.entry(link.label).or_default().insert(link.viewpoint);
    }

    let ontologies = (0..params.n_ontologies)
        .map(|_| {
            let doc = perturb(&truth_doc, params.noise_rate, &mut rng);
            MvpOntology::from_document(doc).expect("perturbation keeps the ontology valid")
        })
        .collect();

    let graph = draw_graph(params, &truth_doc, &mut rng);
    let mut gold = GoldLabels::new();
    for t in &graph {
        let mut vps = BTreeSet::new();
        let labels = [
            local_name(t.subject()),
            local_name(t.object()),
            local_name(&Term::Iri(t.predicate().clone())),
        ];
        for l in labels.into_iter().flatten() {
            if let Some(vs) = truth.get(&l) {
                vps.extend(vs.iter().cloned());
            }
        }
        gold.insert(t.clone(), vps);
    }

    Ok(SyntheticCorpus {
        ontologies,
        graph,
        gold,
        truth,
    })
}

fn ground_truth(p: &SynthParams, rng: &mut ChaCha8Rng) -> OntologyDocument {
    let viewpoints: Vec<String> = (0..p.n_viewpoints).map(|i| format!("vp{i}")).collect();
    let n_global = (p.n_concepts / 4).max(1);
    let mut global_concepts: Vec<GlobalConceptDoc> = (0..n_global)
        .map(|k| GlobalConceptDoc {
            name: format!("gconcept_{k}"),
            parent: (k > 0).then(|| "gconcept_0".to_string()),
            ..Default::default()
        })
        .collect();
    global_concepts[0].attributes = (0..3).map(|k| format!("gattr_{k}")).collect();

    let local_concepts: Vec<LocalConceptDoc> = (0..p.n_concepts)
        .map(|i| LocalConceptDoc {
            name: format!("concept_{i}"),
            viewpoints: vec![viewpoints[i % viewpoints.len()].clone()],
            subsumer: format!("gconcept_{}", rng.random_range(0..n_global)),
            parent: None,
        })
        .collect();
    let concepts_of = |v: &str| -> Vec<&str> {
        local_concepts
            .iter()
            .filter(|c| c.viewpoints[0] == v)
            .map(|c| c.name.as_str())
            .collect()
    };

    for v in &viewpoints {
        for k in 0..2 {
            let gc = rng.random_range(0..n_global);
            global_concepts[gc]
                .local_attributes
                .push(LocalAttributeDoc {
                    name: format!("attr_{v}_{k}"),
                    viewpoints: vec![v.clone()],
                });
        }
    }

    let mut roles = Vec::new();
    for v in &viewpoints {
        let pool = concepts_of(v);
        for k in 0..2 {
            let pick = |rng: &mut ChaCha8Rng| {
                pool.choose(rng)
                    .map_or_else(|| "gconcept_0".to_string(), |c| c.to_string())
            };
            let domain = pick(rng);
            let range = pick(rng);
            roles.push(RoleDoc {
                name: format!("role_{v}_{k}"),
                domain,
                range,
                viewpoints: vec![v.clone()],
            });
        }
    }
    for k in 0..2 {
        roles.push(RoleDoc {
            name: format!("grole_{k}"),
            domain: format!("gconcept_{}", rng.random_range(0..n_global)),
            range: format!("gconcept_{}", rng.random_range(0..n_global)),
            viewpoints: Vec::new(),
        });
    }

    let individuals = (0..p.n_individuals)
        .map(|i| {
            let mut memberships = Vec::new();
            for v in &viewpoints {
                let pool = concepts_of(v);
                if !pool.is_empty() && rng.random_bool(0.5) {
                    memberships.push(MembershipDoc {
                        local_concept: pool.choose(rng).expect("non-empty").to_string(),
                        viewpoint: v.clone(),
                    });
                }
            }
            IndividualDoc {
                name: format!("ind_{i}"),
                global_concept: format!("gconcept_{}", rng.random_range(0..n_global)),
                memberships,
                values: BTreeMap::new(),
            }
        })
        .collect();

    OntologyDocument {
        format_version: MVO_FORMAT_VERSION.to_string(),
        domain: "synthetic".to_string(),
        viewpoints,
        global_concepts,
        local_concepts,
        roles,
        individuals,
    }
}

fn other_viewpoint(rng: &mut ChaCha8Rng, all: &[String], current: &str) -> Option<String> {
    let others: Vec<&String> = all.iter().filter(|v| *v != current).collect();
    others.choose(rng).map(|v| (*v).clone())
}

fn perturb(truth: &OntologyDocument, noise: f64, rng: &mut ChaCha8Rng) -> OntologyDocument {
    let mut doc = truth.clone();
    let viewpoints = doc.viewpoints.clone();

    for gc in &mut doc.global_concepts {
        for la in &mut gc.local_attributes {
            if rng.random_bool(noise) {
                if let Some(v) = other_viewpoint(rng, &viewpoints, &la.viewpoints[0]) {
                    la.viewpoints = vec![v];
                }
            }
        }
    }
    for role in doc.roles.iter_mut().filter(|r| !r.viewpoints.is_empty()) {
        if rng.random_bool(noise) {
            if let Some(v) = other_viewpoint(rng, &viewpoints, &role.viewpoints[0]) {
                role.viewpoints = vec![v];
            }
        }
    }

    let concepts_of: BTreeMap<&str, Vec<&str>> = viewpoints
        .iter()
        .map(|v| {
            let cs = truth
                .local_concepts
                .iter()
                .filter(|c| c.viewpoints.contains(v))
                .map(|c| c.name.as_str())
                .collect();
            (v.as_str(), cs)
        })
        .collect();
    for ind in &mut doc.individuals {
        for i in 0..ind.memberships.len() {
            if !rng.random_bool(noise) {
                continue;
            }
            let used: BTreeSet<String> = ind
                .memberships
                .iter()
                .map(|m| m.viewpoint.clone())
                .collect();
            let free: Vec<&String> = viewpoints
                .iter()
                .filter(|v| !used.contains(*v) && !concepts_of[v.as_str()].is_empty())
                .collect();
            if let Some(v) = free.choose(rng) {
                let lc = concepts_of[v.as_str()].choose(rng).expect("non-empty pool");
                ind.memberships[i] = MembershipDoc {
                    local_concept: lc.to_string(),
                    viewpoint: (*v).clone(),
                };
            }
        }
    }
    doc
}

fn draw_graph(p: &SynthParams, truth: &OntologyDocument, rng: &mut ChaCha8Rng) -> Graph {
    let iri = |name: &str| Iri::new(format!("{SYNTH_NAMESPACE}{name}")).expect("synthetic IRI");
    let individuals: Vec<&str> = truth.individuals.iter().map(|i| i.name.as_str()).collect();
    let attributes: Vec<&str> = truth
        .global_concepts
        .iter()
        .flat_map(|gc| {
            gc.attributes
                .iter()
                .map(String::as_str)
                .chain(gc.local_attributes.iter().map(|a| a.name.as_str()))
        })
        .collect();
    let roles: Vec<&str> = truth.roles.iter().map(|r| r.name.as_str()).collect();
    let concepts: Vec<&str> = truth
        .global_concepts
        .iter()
        .map(|c| c.name.as_str())
        .chain(truth.local_concepts.iter().map(|c| c.name.as_str()))
        .collect();
    let instance_of = iri("instance_of");

    let mut graph = Graph::new();
    let max_attempts = p.n_triples.saturating_mul(50);
    let mut attempts = 0;
    while graph.len() < p.n_triples && attempts < max_attempts {
        attempts += 1;
        let subject = Term::Iri(iri(individuals.choose(rng).expect("individuals")));
        let triple = match rng.random_range(0..10) {
            0..=3 => {
                let attr = iri(attributes.choose(rng).expect("attributes"));
                let value = Literal::plain(rng.random_range(0..10_000u32).to_string());
                Triple::from_iris(subject, attr, value.into())
            }
            4..=6 => {
                let role = iri(roles.choose(rng).expect("roles"));
                let object = Term::Iri(iri(individuals.choose(rng).expect("individuals")));
                Triple::from_iris(subject, role, object)
            }
            _ => {
                let concept = Term::Iri(iri(concepts.choose(rng).expect("concepts")));
                Triple::from_iris(subject, instance_of.clone(), concept)
            }
        };
        graph.insert(triple.expect("IRI subjects and predicates"));
    }
    graph
}
