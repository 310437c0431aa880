//! Seeded random generators for models, interpretations, concepts and
//! formulas, shared by the property suites and the reproduction runner.

use std::collections::BTreeSet;

use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::functional::alc::AlcInterpretation;
use crate::model::BeliefModel;
use crate::rational::{q, Q};
use crate::syntax::{Concept, Formula, ID_ROLE};

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("i{k}")).collect()
}

/// A probability with a small denominator, biased towards the endpoints.
pub fn random_prob<R: Rng>(rng: &mut R) -> Q {
    match rng.gen_range(0..10) {
        0 => q(0, 1),
        1 => q(1, 1),
        _ => {
            let d = rng.gen_range(2..=6);
            q(rng.gen_range(0..=d), d)
        }
    }
}

/// A distribution over `n` points with small integer weights.
pub fn random_row<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=4) }).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| q(x, total)).collect();
        }
    }
}

/// A valid belief model with `n` individuals `i0, i1, …`. The `id` role is
/// block-structured over a random partition of the individuals.
pub fn random_model<R: Rng>(rng: &mut R, n: usize, atoms: &[&str], roles: &[&str]) -> BeliefModel {
    let mut m = BeliefModel::new(&labels(n)).expect("non-empty");
    for a in atoms {
        m.add_concept(a);
        for i in 0..n {
            m.set_likelihood(a, i, random_prob(rng));
        }
    }
    for r in roles {
        m.add_role(r);
        for i in 0..n {
            let row = random_row(rng, n);
            m.set_row(r, i, row);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut start = 0;
    while start < n {
        let len = rng.gen_range(1..=n - start);
        let block = &order[start..start + len];
        let weights = random_row(rng, len);
        let mut row = vec![Q::zero(); n];
        for (k, &j) in block.iter().enumerate() {
            row[j] = weights[k].clone();
        }
        for &i in block {
            m.set_row(ID_ROLE, i, row.clone());
        }
        start += len;
    }
    debug_assert!(m.validate().is_empty());
    m
}

/// A random ALC concept over the given atoms and roles, with modal depth at
/// most `depth` and at most `size` connectives.
pub fn random_concept<R: Rng>(rng: &mut R, depth: usize, size: usize, atoms: &[&str], roles: &[&str]) -> Concept {
    let mut budget = size;
    concept_rec(rng, depth, &mut budget, atoms, roles)
}

fn concept_rec<R: Rng>(rng: &mut R, depth: usize, budget: &mut usize, atoms: &[&str], roles: &[&str]) -> Concept {
    let leaf = *budget == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..12) {
            0 => Concept::Top,
            1 => Concept::Bottom,
            _ => Concept::atom(atoms.choose(rng).expect("atoms")),
        };
    }
    *budget -= 1;
    let k = if depth == 0 || roles.is_empty() { rng.gen_range(0..3) } else { rng.gen_range(0..5) };
    match k {
        0 => Concept::not(concept_rec(rng, depth, budget, atoms, roles)),
        1 => Concept::and(concept_rec(rng, depth, budget, atoms, roles), concept_rec(rng, depth, budget, atoms, roles)),
        2 => Concept::or(concept_rec(rng, depth, budget, atoms, roles), concept_rec(rng, depth, budget, atoms, roles)),
        _ => Concept::exists(roles.choose(rng).expect("roles"), concept_rec(rng, depth - 1, budget, atoms, roles)),
    }
}

/// A random core ADL formula with modal depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, size: usize, atoms: &[&str], roles: &[&str]) -> Formula {
    let mut budget = size;
    formula_rec(rng, depth, &mut budget, atoms, roles)
}

fn formula_rec<R: Rng>(rng: &mut R, depth: usize, budget: &mut usize, atoms: &[&str], roles: &[&str]) -> Formula {
    if *budget == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::Always,
            1 => Formula::Never,
            _ => Formula::atom(atoms.choose(rng).expect("atoms")),
        };
    }
    *budget -= 1;
    if depth > 0 && !roles.is_empty() && rng.gen_bool(0.4) {
        let r = roles.choose(rng).expect("roles");
        let t = formula_rec(rng, depth - 1, budget, atoms, roles);
        let g = formula_rec(rng, depth - 1, budget, atoms, roles);
        Formula::marginal(t, g, r)
    } else {
        let c = formula_rec(rng, depth, budget, atoms, roles);
        let t = formula_rec(rng, depth, budget, atoms, roles);
        let e = formula_rec(rng, depth, budget, atoms, roles);
        Formula::ite(c, t, e)
    }
}

/// A random interpretation in which every role is a total function.
pub fn random_functional_interpretation<R: Rng>(rng: &mut R, n: usize, atoms: &[&str], roles: &[&str]) -> AlcInterpretation {
    let mut itp = AlcInterpretation::new(&labels(n)).expect("non-empty");
    fill_concepts(rng, &mut itp, atoms);
    for r in roles {
        itp.add_role(r);
        for i in 0..n {
            itp.assert_role(r, i, rng.gen_range(0..n));
        }
    }
    itp
}

/// A random interpretation in which every individual has at least one
/// successor for every role.
pub fn random_interpretation<R: Rng>(rng: &mut R, n: usize, atoms: &[&str], roles: &[&str]) -> AlcInterpretation {
    let mut itp = AlcInterpretation::new(&labels(n)).expect("non-empty");
    fill_concepts(rng, &mut itp, atoms);
    for r in roles {
        itp.add_role(r);
        for i in 0..n {
            let mut succ: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            if succ.is_empty() {
                succ.insert(rng.gen_range(0..n));
            }
            for j in succ {
                itp.assert_role(r, i, j);
            }
        }
    }
    itp
}

fn fill_concepts<R: Rng>(rng: &mut R, itp: &mut AlcInterpretation, atoms: &[&str]) {
    for a in atoms {
        itp.add_concept(a);
        for i in 0..itp.len() {
            if rng.gen_bool(0.5) {
                itp.assert_concept(a, i);
            }
        }
    }
}
