//! Belief revision against direct Bayes arithmetic.

use adl_core::functional::measure;
use adl_core::learning::{aggregate, concept_extension, concept_learn, role_update, Observation};
use adl_core::rational::q;
use adl_core::syntax::ID_ROLE;
use adl_core::testgen::{random_concept, random_formula, random_model};
use adl_core::{BeliefModel, Error, Evaluator, Formula, PointedModel, Q};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn role_update_is_bayes_conditioning() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let mut checked = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let m = random_model(&mut rng, n, &["A", "B"], &["r"]);
        let alpha = random_formula(&mut rng, 1, 4, &["A", "B"], &["r"]);
        let i = rng.gen_range(0..n);
        let pm = PointedModel::new(m.clone(), i).unwrap();
        let obs = Observation::new(alpha.clone(), Formula::Always, "r");
        let mut ev = Evaluator::new(&m);
        let lik: Vec<Q> = (0..n).map(|j| ev.eval(&alpha, j)).collect();
        let evidence: Q = (0..n).map(|j| m.weight("r", i, j) * &lik[j]).sum();
        match role_update(&pm, &obs, false) {
            Err(Error::ZeroProbability) => assert!(evidence.is_zero()),
            Err(e) => panic!("{e}"),
            Ok(up) => {
                checked += 1;
                assert_eq!(up.evidence, evidence);
                assert!(up.raw_sum.is_one());
                for j in 0..n {
                    assert_eq!(up.model.weight("r", i, j), m.weight("r", i, j) * &lik[j] / &evidence);
                }
                for k in (0..n).filter(|&k| k != i) {
                    assert_eq!(up.model.row("r", k), m.row("r", k));
                }
                for c in ["A", "B"] {
                    for k in 0..n {
                        assert_eq!(up.model.likelihood(c, k), m.likelihood(c, k));
                    }
                }
                assert!(up.model.validate().is_empty());
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn conditional_observation_can_be_renormalised() {
    let m = BeliefModel::parse_valid(include_str!("../../../fixtures/virus.adm")).unwrap();
    let pm = PointedModel::at(m.clone(), "H0").unwrap();
    let obs = Observation::new(Formula::atom("V"), Formula::atom("F"), "c");
    let raw = role_update(&pm, &obs, false).unwrap();
    assert!(!raw.raw_sum.is_one());
    let norm = role_update(&pm, &obs, true).unwrap();
    let total: Q = norm.model.row("c", pm.point).iter().sum();
    assert!(total.is_one());
}

#[test]
fn extension_and_mixture_preserve_the_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let m = random_model(&mut rng, n, &["A", "B"], &["r"]);
        let pm = PointedModel::new(m, rng.gen_range(0..n)).unwrap();
        let (ext, star) = concept_extension(&pm, "A").unwrap();
        assert!(ext.validate().is_empty());
        let p = pm.model.likelihood("A", pm.point);
        assert_eq!(ext.likelihood("A", pm.point), q(2, 1) * &p - &p * &p);
        assert_eq!(ext.likelihood("A", star), &p * &p);
        let c = random_concept(&mut rng, 2, 5, &["A", "B"], &["r"]);
        let at = |i| measure(&PointedModel::new(ext.clone(), i).unwrap(), &c).unwrap().value;
        assert_eq!((at(pm.point) + at(star)) / q(2, 1), measure(&pm, &c).unwrap().value, "{c}");
    }
}

#[test]
fn equal_weights_recover_the_original_likelihood() {
    for p in [q(0, 1), q(1, 4), q(3, 5), q(1, 1)] {
        let mut m = BeliefModel::new(&["h"]).unwrap();
        m.add_concept("A");
        m.set_likelihood("A", 0, p.clone());
        let (ext, star) = concept_extension(&PointedModel::new(m, 0).unwrap(), "A").unwrap();
        let out = aggregate(&ext, 0, star).unwrap();
        assert_eq!(out.likelihood("A", 0), p);
        assert_eq!(out.len(), 1);
    }
}

#[test]
fn concept_learning_only_touches_the_learner() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..60 {
        let n = rng.gen_range(2..=4);
        let m = random_model(&mut rng, n, &["A", "B"], &["r"]);
        let i = rng.gen_range(0..n);
        let obs = random_formula(&mut rng, 1, 3, &["A", "B"], &["r"]);
        let pm = PointedModel::new(m.clone(), i).unwrap();
        let Ok(r) = concept_learn(&pm, "A", &obs) else { continue };
        assert_eq!(r.model.len(), n);
        assert!(r.model.validate().is_empty(), "{}", r.model);
        for k in (0..n).filter(|&k| k != i) {
            assert_eq!(r.model.likelihood("A", k), m.likelihood("A", k));
            assert_eq!(r.model.likelihood("B", k), m.likelihood("B", k));
        }
        // Posterior weights are the Bayes split of the uniform clone prior.
        let (e0, e1) = &r.evidence;
        let (w0, w1) = (r.extended.weight(ID_ROLE, i, i) * e0, r.extended.weight(ID_ROLE, i, r.star) * e1);
        assert_eq!(r.weights.0, &w0 / (&w0 + &w1));
        assert_eq!(
            r.model.likelihood("A", i),
            &r.weights.0 * r.extended.likelihood("A", i) + &r.weights.1 * r.extended.likelihood("A", r.star)
        );
    }
}

#[test]
fn concept_learning_figure_values() {
    let mut m = BeliefModel::new(&["H0", "J0", "J1"]).unwrap();
    m.add_concept("F");
    for (k, p) in [q(3, 5), q(9, 10), q(1, 5)].into_iter().enumerate() {
        m.set_likelihood("F", k, p);
    }
    m.add_role("c");
    m.set_row("c", 0, vec![q(0, 1), q(4, 5), q(1, 5)]);
    m.set_row("c", 1, vec![q(1, 1), q(0, 1), q(0, 1)]);
    m.set_row("c", 2, vec![q(1, 1), q(0, 1), q(0, 1)]);
    let obs = Formula::ite(
        Formula::atom("F"),
        Formula::expect("c", Formula::atom("F")),
        Formula::expect("c", Formula::not(Formula::atom("F"))),
    );
    let r = concept_learn(&PointedModel::new(m, 0).unwrap(), "F", &obs).unwrap();
    assert_eq!(r.evidence, (q(423, 625), q(267, 625)));
    assert_eq!(r.weights, (q(141, 230), q(89, 230)));
    assert_eq!(r.model.likelihood("F", 0), q(1881, 2875));
}

#[test]
fn names_cannot_be_learnt() {
    let mut m = BeliefModel::new(&["h"]).unwrap();
    m.set_name("a", [0].into_iter().collect());
    assert!(concept_extension(&PointedModel::new(m, 0).unwrap(), "a").is_err());
}
