mod common;

use std::collections::HashMap;

use gridmso::graphs::LabeledGraph;
use gridmso::mso::{evaluate_with, fixtures, holds, parse, Assignment, EvalError, EvalOptions, Formula};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const LABELS: &[&str] = &["A", "B"];

fn host(seed: u64, max_n: usize) -> LabeledGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    random_labeled(&mut rng, n, LABELS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_and_plain_agree_with_the_oracle(seed in any::<u64>(), depth in 2usize..=7) {
        let g = host(seed, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let phi = FormulaGen::new(LABELS, 2).sentence(&mut rng, depth);
        let expected = naive_holds(&NaiveHost::from_labeled(&g), &phi);
        let env = Assignment::new();
        prop_assert_eq!(evaluate_with(&g, &phi, &env, EvalOptions::fast()).unwrap(), expected, "{}", phi);
        prop_assert_eq!(evaluate_with(&g, &phi, &env, EvalOptions::plain()).unwrap(), expected, "{}", phi);
    }

    #[test]
    fn printing_then_parsing_is_the_identity(seed in any::<u64>(), depth in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = FormulaGen::new(LABELS, 3).sentence(&mut rng, depth);
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn free_variables_are_honoured(seed in any::<u64>()) {
        let g = host(seed, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
        let phi = FormulaGen::new(LABELS, 1).with_free(&mut rng, 3, &["x", "y"]);
        let fv = phi.free_variables();
        prop_assert!(fv.vertex.iter().all(|v| v == "x" || v == "y"));
        prop_assert!(fv.set.is_empty());
        let n = g.vertex_count();
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let env = Assignment::new().with_vertex("x", a).with_vertex("y", b);
        let mut naive_env = HashMap::from([("x".to_string(), a), ("y".to_string(), b)]);
        let expected = naive_eval(&NaiveHost::from_labeled(&g), &phi, &mut naive_env, &mut HashMap::new());
        prop_assert_eq!(evaluate_with(&g, &phi, &env, EvalOptions::fast()).unwrap(), expected);
    }
}

#[test]
fn three_colourability_matches_brute_force() {
    let f = fixtures::three_colourable();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..150 {
        let n = rng.gen_range(1..=7);
        let p = rng.gen_range(0.2..0.7);
        let g = random_graph(&mut rng, n, p);
        assert_eq!(holds(&g, &f).unwrap(), brute_three_colourable(&g), "{g:?}");
    }
}

#[test]
fn unbound_variables_are_errors() {
    let g = gridmso::Graph::path(3);
    let f = parse("adj(x,y)").unwrap();
    assert!(matches!(holds(&g, &f), Err(EvalError::UnboundVariable(_))));
}

#[test]
fn parser_rejects_malformed_input() {
    for bad in ["", "E x.", "adj(x)", "E X. x in", "A x. (x = x", "lab_(x)", "E x. x == x"] {
        assert!(parse(bad).is_err(), "{bad:?} parsed");
    }
}

#[test]
fn sizes_count_nodes() {
    let f: Formula = parse("E x. A y. ~adj(x,y)").unwrap();
    assert_eq!(f.size(), 4);
    assert_eq!(f.vertex_quantifier_count(), 2);
    assert_eq!(f.set_quantifier_count(), 0);
}
