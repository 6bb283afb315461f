mod common;

use std::collections::BTreeMap;

use gridmso::graphs::iso::graphs_up_to_iso;
use gridmso::sigmacol::{
    decide_alternating, evaluate_qbf, parse_qdimacs, reduce_qsat_to_sigmacol, write_qdimacs, QbfFormula,
    SigmaColInstance, QBF_VARIABLE_CEILING,
};
use gridmso::Graph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn qdimacs_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = [1, 3, 5][rng.gen_range(0..3)];
        let q = random_qbf(&mut rng, k, 6, 6);
        let back = parse_qdimacs(&write_qdimacs(&q)).unwrap();
        prop_assert_eq!(naive_qbf(&back), naive_qbf(&q));
        // QDIMACS cannot express an empty inner block; those merge their neighbours
        let inner = q.blocks().len().saturating_sub(2);
        if q.blocks().iter().skip(1).take(inner).all(|b| !b.is_empty()) {
            prop_assert_eq!(back, q);
        }
    }

    #[test]
    fn reduction_preserves_truth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = [1, 3][rng.gen_range(0..2)];
        let q = random_qbf(&mut rng, k, 5, 4);
        let expected = naive_qbf(&q);
        prop_assert_eq!(evaluate_qbf(&q).unwrap(), expected);
        let inst = reduce_qsat_to_sigmacol(&q);
        prop_assert_eq!(inst.k(), q.k());
        prop_assert_eq!(decide_alternating(&inst).unwrap(), expected);
    }
}

#[test]
fn game_solver_matches_enumeration() {
    for n in 1..=4 {
        for g in graphs_up_to_iso(n) {
            for k in [1, 3] {
                for inst in all_instances(&g, k) {
                    assert_eq!(decide_alternating(&inst).unwrap(), naive_game(&inst), "{}", inst.to_text());
                }
            }
        }
    }
}

#[test]
fn instance_text_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let q = random_qbf(&mut rng, 3, 6, 4);
        let inst = reduce_qsat_to_sigmacol(&q);
        assert_eq!(SigmaColInstance::from_text(&inst.to_text()).unwrap(), inst);
    }
}

#[test]
fn qdimacs_normalizes_block_structure() {
    // leading universal block gets an empty existential block in front
    let q = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n").unwrap();
    assert_eq!(q.k(), 3);
    assert!(q.blocks()[0].is_empty());
    // adjacent blocks of one kind merge
    let q = parse_qdimacs("p cnf 2 1\ne 1 0\ne 2 0\n1 2 0\n").unwrap();
    assert_eq!(q.k(), 1);
    assert!(parse_qdimacs("e 1 0\n1 0\n").is_err());
    assert!(parse_qdimacs("p cnf 1 1\ne 1 0\n2 0\n").is_err());
}

#[test]
fn empty_clause_is_false_and_empty_matrix_is_true() {
    let q = QbfFormula::new(1, vec![vec![1]], vec![vec![]]).unwrap();
    assert!(!evaluate_qbf(&q).unwrap());
    assert!(!decide_alternating(&reduce_qsat_to_sigmacol(&q)).unwrap());
    let q = QbfFormula::new(1, vec![vec![1]], vec![]).unwrap();
    assert!(evaluate_qbf(&q).unwrap());
    assert!(decide_alternating(&reduce_qsat_to_sigmacol(&q)).unwrap());
}

#[test]
fn qbf_ceiling_is_enforced() {
    let n = QBF_VARIABLE_CEILING + 1;
    let q = QbfFormula::new(n, vec![(1..=n).collect()], vec![vec![1]]).unwrap();
    assert!(evaluate_qbf(&q).is_err());
}

#[test]
fn invalid_instances_are_rejected() {
    let g = Graph::path(2);
    // improper precolouring
    let pre = BTreeMap::from([(0, 1), (1, 1)]);
    assert!(SigmaColInstance::new(g.clone(), vec![vec![0, 1], vec![]], pre).is_err());
    // precoloured vertices must be exactly V0
    let pre = BTreeMap::from([(0, 1)]);
    assert!(SigmaColInstance::new(g.clone(), vec![vec![], vec![0, 1]], pre.clone()).is_err());
    assert!(SigmaColInstance::new(g.clone(), vec![vec![0], vec![1]], pre).is_ok());
    // a vertex in two blocks
    assert!(SigmaColInstance::new(g.clone(), vec![vec![0], vec![0, 1]], BTreeMap::new()).is_err());
    // three-colouring as a one-round game
    let inst = SigmaColInstance::three_colouring(Graph::complete(4));
    assert!(!decide_alternating(&inst).unwrap());
    assert!(decide_alternating(&SigmaColInstance::three_colouring(Graph::complete(3))).unwrap());
}
