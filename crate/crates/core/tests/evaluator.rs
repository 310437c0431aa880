//! Exact evaluation: memoised evaluator against the naive recursion, worked
//! values on the virus model, and parser round trips.

use adl_core::eval::evaluate_naive;
use adl_core::rational::q;
use adl_core::testgen::{random_formula, random_model};
use adl_core::{evaluate, parse_formula, BeliefModel, Evaluator, PointedModel};
use num::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const VIRUS: &str = include_str!("../../../fixtures/virus.adm");

fn eval_text(m: &BeliefModel, at: &str, text: &str) -> adl_core::Q {
    let f = parse_formula(text, Some(&m.signature())).unwrap().desugar();
    evaluate(&PointedModel::at(m.clone(), at).unwrap(), &f).unwrap()
}

#[test]
fn virus_conditional_and_exposure() {
    let m = BeliefModel::parse_valid(VIRUS).unwrap();
    assert_eq!(eval_text(&m, "H0", "[V|F]_c"), q(561, 648));
    assert_eq!(eval_text(&m, "H1", "[V|F]_c"), q(561, 648));
    assert_eq!(eval_text(&m, "H0", "E_id (!V & [V|F]_c)"), q(187, 240));
}

#[test]
fn marginal_with_impossible_condition_is_one() {
    let m = BeliefModel::parse_valid(VIRUS).unwrap();
    assert!(eval_text(&m, "H0", "[V|bot]_c").is_one());
    assert!(eval_text(&m, "I0", "[F|(V & !V)]_c").is_one());
}

#[test]
fn constants_and_negation() {
    let m = BeliefModel::parse_valid(VIRUS).unwrap();
    assert!(eval_text(&m, "J0", "top").is_one());
    assert!(eval_text(&m, "J0", "bot").is_zero());
    assert_eq!(eval_text(&m, "J0", "!F"), q(4, 5));
    assert_eq!(eval_text(&m, "J1", "F & V"), q(9, 10));
}

#[test]
fn unknown_names_are_rejected() {
    let m = BeliefModel::parse_valid(VIRUS).unwrap();
    assert!(parse_formula("[Q|F]_c", Some(&m.signature())).is_err());
    assert!(parse_formula("[V|F]_zz", Some(&m.signature())).is_err());
    assert!(PointedModel::at(m, "Nobody").is_err());
}

#[test]
fn every_value_is_a_probability() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let m = random_model(&mut rng, 3, &["A", "B"], &["r"]);
        let f = random_formula(&mut rng, 2, 8, &["A", "B"], &["r"]);
        let mut ev = Evaluator::new(&m);
        for i in 0..m.len() {
            let v = ev.eval(&f, i);
            assert!(v >= q(0, 1) && v <= q(1, 1), "{f} at {i}: {v}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn memoised_matches_naive(seed in any::<u64>(), n in 1usize..5, depth in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, n, &["A", "B", "C"], &["r", "s"]);
        let f = random_formula(&mut rng, depth, 10, &["A", "B", "C"], &["r", "s"]);
        let mut ev = Evaluator::new(&m);
        for i in 0..n {
            prop_assert_eq!(ev.eval(&f, i), evaluate_naive(&m, &f, i));
        }
        prop_assert!(ev.evaluations() <= n * f.subformula_count());
    }

    #[test]
    fn display_parses_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 1, &["A", "B"], &["r"]);
        let f = random_formula(&mut rng, 2, 8, &["A", "B"], &["r"]);
        let back = parse_formula(&f.to_string(), Some(&m.signature())).unwrap().desugar();
        prop_assert_eq!(back, f);
    }
}
