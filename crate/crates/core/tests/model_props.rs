mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use vprdf_core::model::{load_model, save_model, ViewpointModel};
use vprdf_core::mvo::{MvpOntology, OntologyDocument};

fn build(docs: &[OntologyDocument]) -> Vec<MvpOntology> {
    docs.iter()
        .map(|d| MvpOntology::from_document(d.clone()).unwrap())
        .collect()
}

fn arb_theta() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.25, 0.5, 0.75, 1.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predictions_match_recount(seed in any::<u64>(), theta in arb_theta(), min_support in 1..4u32) {
        let docs = random_training_set(&mut ChaCha8Rng::seed_from_u64(seed));
        let model = ViewpointModel::train(&build(&docs), theta, min_support).unwrap();
        for label in all_labels(&docs) {
            for predicate in [false, true] {
                let got: Vec<(String, u32)> = if predicate {
                    model.predict_predicate(&label)
                } else {
                    model.predict_term(&label)
                }
                .into_iter()
                .map(|p| (p.viewpoint, p.support))
                .collect();
                let want: Vec<(String, u32)> = oracle_predict(&docs, &label, theta, min_support, predicate)
                    .into_iter()
                    .map(|(v, s, _)| (v, s))
                    .collect();
                prop_assert_eq!(got, want, "label {}", label);
            }
        }
    }

    #[test]
    fn training_ignores_ontology_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut docs = random_training_set(&mut rng);
        let a = ViewpointModel::train(&build(&docs), 0.5, 1).unwrap();
        docs.shuffle(&mut rng);
        let b = ViewpointModel::train(&build(&docs), 0.5, 1).unwrap();
        prop_assert_eq!(save_model(&a), save_model(&b));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn raising_theta_only_removes(seed in any::<u64>(), lo in arb_theta(), hi in arb_theta()) {
        prop_assume!(lo <= hi);
        let docs = random_training_set(&mut ChaCha8Rng::seed_from_u64(seed));
        let low = ViewpointModel::train(&build(&docs), lo, 1).unwrap();
        let high = low.with_thresholds(hi, 1).unwrap();
        for label in all_labels(&docs) {
            let l: Vec<String> = low.predict_term(&label).into_iter().map(|p| p.viewpoint).collect();
            for p in high.predict_term(&label) {
                prop_assert!(l.contains(&p.viewpoint));
            }
        }
    }

    #[test]
    fn counts_are_consistent(seed in any::<u64>()) {
        let docs = random_training_set(&mut ChaCha8Rng::seed_from_u64(seed));
        let model = ViewpointModel::train(&build(&docs), 0.25, 1).unwrap();
        let labels: Vec<String> = model.labels().map(String::from).collect();
        for label in &labels {
            let c = model.containment(label);
            prop_assert!(c >= 1 && c as usize <= docs.len());
            for p in model.predict_term(label) {
                prop_assert!(p.support <= c);
                prop_assert!(p.confidence > 0.0 && p.confidence <= 1.0);
            }
        }
    }

    #[test]
    fn saved_model_loads_back(seed in any::<u64>(), theta in arb_theta(), min_support in 1..4u32) {
        let docs = random_training_set(&mut ChaCha8Rng::seed_from_u64(seed));
        let model = ViewpointModel::train(&build(&docs), theta, min_support).unwrap();
        let text = save_model(&model);
        let back = load_model(&text).unwrap();
        prop_assert_eq!(save_model(&back), text);
        prop_assert_eq!(back, model);
    }

    #[test]
    fn ontology_ignores_declaration_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let doc = random_ontology(&mut rng);
        let a = MvpOntology::from_document(doc.clone()).unwrap();
        let mut shuffled = doc;
        shuffled.viewpoints.shuffle(&mut rng);
        shuffled.global_concepts.shuffle(&mut rng);
        shuffled.local_concepts.shuffle(&mut rng);
        shuffled.roles.shuffle(&mut rng);
        shuffled.individuals.shuffle(&mut rng);
        for i in &mut shuffled.individuals {
            i.memberships.shuffle(&mut rng);
        }
        let b = MvpOntology::from_document(shuffled).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(MvpOntology::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn links_match_document(seed in any::<u64>()) {
        let doc = random_ontology(&mut ChaCha8Rng::seed_from_u64(seed));
        let got: std::collections::BTreeSet<(String, String)> = MvpOntology::from_document(doc.clone())
            .unwrap()
            .extract_links()
            .into_iter()
            .map(|l| (l.label, l.viewpoint))
            .collect();
        let want: std::collections::BTreeSet<(String, String)> =
            oracle_links(&doc).into_iter().map(|(l, v, _)| (l, v)).collect();
        prop_assert_eq!(got, want);
    }
}
