//! Oracles and generators shared by the integration suites.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use adl_core::kb::{AAxiom, AxiomKind, KnowledgeBase, TAxiom};
use adl_core::rational::{q, Q};
use adl_core::syntax::{name, Concept, Formula, Name, Signature, ID_ROLE};
use adl_core::testgen::{random_formula, random_model};
use adl_core::{BeliefModel, Evaluator};
use num::{One, Zero};
use rand::Rng;

/// Probability that a sampling rooted at `x` satisfies `c`, computed by a
/// dynamic programme over joint truth vectors of the concepts that have to
/// be decided at each word. Shares no code with the automaton pipeline.
pub fn dp_measure(m: &BeliefModel, x: usize, c: &Concept) -> Q {
    let dist = joint(m, x, std::slice::from_ref(c));
    dist.into_iter().filter(|(v, _)| v[0]).map(|(_, p)| p).sum()
}

/// Distribution of the truth vector of `cs` at a word drawn as `x`.
fn joint(m: &BeliefModel, x: usize, cs: &[Concept]) -> HashMap<Vec<bool>, Q> {
    let mut atoms: BTreeSet<Name> = BTreeSet::new();
    let mut bodies: BTreeMap<Name, Vec<Concept>> = BTreeMap::new();
    for c in cs {
        top_level(c, &mut atoms, &mut bodies);
    }
    let atoms: Vec<Name> = atoms.into_iter().collect();
    // Distribution of each role's body vector at the successor.
    let mut child: Vec<(Name, HashMap<Vec<bool>, Q>)> = Vec::new();
    for (r, bs) in &bodies {
        let mut acc: HashMap<Vec<bool>, Q> = HashMap::new();
        for (y, w) in m.successors(r, x) {
            for (v, p) in joint(m, y, bs) {
                *acc.entry(v).or_insert_with(Q::zero) += &w * p;
            }
        }
        child.push((r.clone(), acc));
    }
    let mut out: HashMap<Vec<bool>, Q> = HashMap::new();
    for bits in 0..(1usize << atoms.len()) {
        let mut p = Q::one();
        let mut val = BTreeSet::new();
        for (k, a) in atoms.iter().enumerate() {
            let l = m.likelihood(a, x);
            if bits & (1 << k) != 0 {
                val.insert(a.clone());
                p *= l;
            } else {
                p *= Q::one() - l;
            }
        }
        if p.is_zero() {
            continue;
        }
        let mut partial: Vec<(BTreeMap<Name, Vec<bool>>, Q)> = vec![(BTreeMap::new(), p)];
        for (r, d) in &child {
            let mut next = Vec::new();
            for (assign, p) in &partial {
                for (v, pv) in d {
                    let mut a = assign.clone();
                    a.insert(r.clone(), v.clone());
                    next.push((a, p * pv));
                }
            }
            partial = next;
        }
        for (assign, p) in partial {
            let v: Vec<bool> = cs.iter().map(|c| truth(c, &val, &assign, &bodies)).collect();
            *out.entry(v).or_insert_with(Q::zero) += p;
        }
    }
    out
}

fn top_level(c: &Concept, atoms: &mut BTreeSet<Name>, bodies: &mut BTreeMap<Name, Vec<Concept>>) {
    match c {
        Concept::Top | Concept::Bottom => {}
        Concept::Atom(a) => {
            atoms.insert(a.clone());
        }
        Concept::Not(d) => top_level(d, atoms, bodies),
        Concept::And(a, b) | Concept::Or(a, b) => {
            top_level(a, atoms, bodies);
            top_level(b, atoms, bodies);
        }
        Concept::Exists(r, d) => {
            let list = bodies.entry(r.clone()).or_default();
            if !list.contains(d) {
                list.push((**d).clone());
            }
        }
    }
}

fn truth(c: &Concept, val: &BTreeSet<Name>, child: &BTreeMap<Name, Vec<bool>>, bodies: &BTreeMap<Name, Vec<Concept>>) -> bool {
    match c {
        Concept::Top => true,
        Concept::Bottom => false,
        Concept::Atom(a) => val.contains(a),
        Concept::Not(d) => !truth(d, val, child, bodies),
        Concept::And(a, b) => truth(a, val, child, bodies) && truth(b, val, child, bodies),
        Concept::Or(a, b) => truth(a, val, child, bodies) || truth(b, val, child, bodies),
        Concept::Exists(r, d) => {
            let k = bodies[r].iter().position(|x| x == &**d).expect("collected body");
            child[r][k]
        }
    }
}

/// Groups individuals into `id` blocks (equal `id` rows).
pub fn id_blocks(m: &BeliefModel) -> Vec<BTreeSet<usize>> {
    let mut blocks: Vec<(Vec<Q>, BTreeSet<usize>)> = Vec::new();
    for i in 0..m.len() {
        let row = m.row(ID_ROLE, i).into_owned();
        match blocks.iter_mut().find(|(r, _)| *r == row) {
            Some((_, s)) => {
                s.insert(i);
            }
            None => blocks.push((row, BTreeSet::from([i]))),
        }
    }
    blocks.into_iter().map(|(_, s)| s).collect()
}

/// A random model together with a knowledge base it satisfies exactly:
/// defined concepts `D ≈ α`, upper bounds `α ⪯ U`, concept assertions
/// `a ⊨_p β` with `p = B_i(E_id β)`, and role assertions whose mass is the
/// same across the name's block.
pub fn roundtrip_kb<R: Rng>(rng: &mut R) -> (BeliefModel, KnowledgeBase) {
    let base = ["A", "B"];
    let roles = ["r"];
    let n = rng.gen_range(2..=3);
    let mut m = random_model(rng, n, &base, &roles);
    let blocks = id_blocks(&m);
    let names: Vec<String> = (0..blocks.len()).map(|k| format!("n{k}")).collect();
    for (nm, b) in names.iter().zip(&blocks) {
        m.set_name(nm, b.clone());
    }
    let mut sig = Signature::with(&base, &roles);
    for nm in &names {
        sig.names.insert(name(nm));
    }
    let mut kb = KnowledgeBase::new(sig);
    // T-Book.
    let (d, u) = ("D", "U");
    let alpha = random_formula(rng, 1, 3, &base, &roles);
    let beta = random_formula(rng, 1, 3, &base, &roles);
    let (dv, uv): (Vec<Q>, Vec<Q>) = {
        let mut ev = Evaluator::new(&m);
        let dv = (0..n).map(|i| ev.eval(&alpha, i)).collect();
        let uv = (0..n).map(|i| (ev.eval(&beta, i) + Q::one()) / q(2, 1)).collect();
        (dv, uv)
    };
    m.add_concept(d);
    m.add_concept(u);
    for i in 0..n {
        m.set_likelihood(d, i, dv[i].clone());
        m.set_likelihood(u, i, uv[i].clone());
    }
    kb.signature.concepts.insert(name(d));
    kb.signature.concepts.insert(name(u));
    kb.tbook.push(TAxiom::new(AxiomKind::ExactlyAsLikely, Formula::atom(d), alpha));
    kb.tbook.push(TAxiom::new(AxiomKind::NoMoreLikely, beta, Formula::atom(u)));
    // A-Book.
    let mut ev = Evaluator::new(&m);
    for (nm, b) in names.iter().zip(&blocks) {
        let i = *b.iter().next().expect("non-empty block");
        let gamma = match rng.gen_range(0..3) {
            0 => Formula::atom(d),
            1 => Formula::atom(base[rng.gen_range(0..2)]),
            _ => random_formula(rng, 1, 2, &base, &roles),
        };
        let p = ev.expectation(ID_ROLE, &gamma, i);
        kb.abook.push(AAxiom::Concept { a: name(nm), p, formula: gamma });
        for (other, ob) in names.iter().zip(&blocks) {
            let masses: BTreeSet<Q> =
                b.iter().map(|&x| m.successors("r", x).into_iter().filter(|(j, _)| ob.contains(j)).map(|(_, w)| w).sum()).collect();
            if masses.len() == 1 && rng.gen_bool(0.5) {
                let p = masses.into_iter().next().expect("one mass");
                kb.abook.push(AAxiom::Role { a: name(nm), b: name(other), p, role: name("r") });
            }
        }
    }
    (m, kb)
}
