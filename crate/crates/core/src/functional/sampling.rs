//! Samplings of a belief model and a Monte-Carlo estimate of the measure.
//!
//! A sampling resolves every die: each role path from the point gets its own
//! individual, drawn from the role distribution of its parent, and its own
//! concept outcomes, drawn independently from that individual's likelihoods.
//! Words are keyed by role path and materialised up to a depth bound.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::alc::{to_pnf, AlcInterpretation};
use crate::functional::automaton::{automaton_accepts, compile_automaton};
use crate::functional::prop::word_text;
use crate::functional::trees::{check_concept, Engine, Tri};
use crate::model::{BeliefModel, PointedModel};
use crate::rational::to_f64;
use crate::syntax::{Concept, Name};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489;

/// A sampled interpretation over role paths, rooted at word 0.
#[derive(Clone, Debug)]
pub struct Sampling {
    /// Words as individuals; labels are role paths (`ε`, `r`, `r.s`, …).
    pub interpretation: AlcInterpretation,
    /// Role path of each word.
    pub words: Vec<Vec<Name>>,
    /// Model individual each word was drawn as.
    pub origin: Vec<usize>,
    pub depth: usize,
}

/// Samples every concept and role of the model up to `depth`. Deterministic in `seed`.
pub fn sample_interpretation(pm: &PointedModel, depth: usize, seed: u64) -> Sampling {
    let atoms: Vec<Name> = pm.model.concept_names().cloned().chain(pm.model.names().keys().cloned()).collect();
    let roles: Vec<Name> = pm.model.role_names().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(pm, depth, &mut rng, &atoms, &roles)
}

/// Cumulative role rows and likelihoods as floats, for fast sampling.
struct FloatModel {
    lik: Vec<Vec<f64>>,
    rows: Vec<Vec<Vec<(usize, f64)>>>,
}

impl FloatModel {
    fn new(m: &BeliefModel, atoms: &[Name], roles: &[Name]) -> FloatModel {
        let lik = atoms.iter().map(|a| (0..m.len()).map(|i| to_f64(&m.likelihood(a, i))).collect()).collect();
        let rows = roles
            .iter()
            .map(|r| (0..m.len()).map(|i| m.successors(r, i).into_iter().map(|(j, w)| (j, to_f64(&w))).collect()).collect())
            .collect();
        FloatModel { lik, rows }
    }
}

fn draw(row: &[(usize, f64)], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let total: f64 = row.iter().map(|(_, w)| w).sum();
    let mut acc = 0.0;
    for &(j, w) in row {
        acc += w / total;
        if u < acc {
            return j;
        }
    }
    row.last().expect("role rows are distributions").0
}

fn sample_with(pm: &PointedModel, depth: usize, rng: &mut ChaCha8Rng, atoms: &[Name], roles: &[Name]) -> Sampling {
    let fm = FloatModel::new(&pm.model, atoms, roles);
    sample_float(&fm, pm.point, depth, rng, atoms, roles)
}

fn sample_float(fm: &FloatModel, point: usize, depth: usize, rng: &mut ChaCha8Rng, atoms: &[Name], roles: &[Name]) -> Sampling {
    let mut words: Vec<Vec<Name>> = vec![Vec::new()];
    let mut origin = vec![point];
    let mut level = vec![0usize];
    let mut edges = Vec::new();
    let mut start = 0;
    for _ in 0..depth {
        let end = words.len();
        for w in start..end {
            for (r, role) in roles.iter().enumerate() {
                let y = draw(&fm.rows[r][origin[w]], rng);
                let mut path = words[w].clone();
                path.push(role.clone());
                words.push(path);
                origin.push(y);
                level.push(level[w] + 1);
                edges.push((role.clone(), w, words.len() - 1));
            }
        }
        start = end;
    }
    let labels: Vec<String> = words.iter().map(|w| word_text(w)).collect();
    let mut itp = AlcInterpretation::new(&labels).expect("distinct role paths");
    for a in atoms {
        itp.add_concept(a);
    }
    for r in roles {
        itp.add_role(r);
    }
    for (w, &x) in origin.iter().enumerate() {
        for (k, a) in atoms.iter().enumerate() {
            if rng.gen::<f64>() < fm.lik[k][x] {
                itp.assert_concept(a, w);
            }
        }
    }
    for (r, from, to) in edges {
        itp.assert_role(&r, from, to);
    }
    Sampling { interpretation: itp, words, origin, depth }
}

/// Monte-Carlo estimate of the measure with a 99% Wilson interval.
#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub successes: usize,
    pub samples: usize,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl McEstimate {
    pub fn contains(&self, p: f64) -> bool {
        self.lower - 1e-12 <= p && p <= self.upper + 1e-12
    }
}

/// Wilson score interval for `k` successes in `n` trials at quantile `z`.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = z / den * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Estimates `𝒫^{B_i}(Ĉ)` from `n` samplings; sample `k` uses stream `k`
/// of `seed`, so the result does not depend on scheduling. A concept whose
/// game is decided before anything is revealed has zero variance and gets
/// a zero-width interval.
pub fn monte_carlo_measure(pm: &PointedModel, c: &Concept, n: usize, seed: u64) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::Precondition("at least one sample is needed".into()));
    }
    check_concept(&pm.model, c)?;
    let aut = compile_automaton(&to_pnf(c))?;
    let depth = aut.depth();
    let atoms: Vec<Name> = aut.atoms.clone();
    let roles: Vec<Name> = aut.roles.clone();
    let fm = FloatModel::new(&pm.model, &atoms, &roles);
    let successes = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let s = sample_float(&fm, pm.point, depth, &mut rng, &atoms, &roles);
            automaton_accepts(&aut, &s.interpretation, 0).map(usize::from)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    let estimate = successes as f64 / n as f64;
    let engine = Engine::new(&aut);
    let decided = engine.value(&Default::default(), &Vec::new(), aut.initial, &mut Default::default()) != Tri::Unknown;
    let (lower, upper) = if decided { (estimate, estimate) } else { wilson(successes, n, Z_99) };
    Ok(McEstimate { successes, samples: n, estimate, lower, upper })
}

/// Concept names that hold at the root of a sampling.
pub fn root_label(s: &Sampling) -> BTreeSet<Name> {
    s.interpretation.concept_names().filter(|a| s.interpretation.holds(a, 0)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_concept;
    use crate::rational::q;

    fn unit() -> PointedModel {
        let m = BeliefModel::parse(include_str!("../../../../fixtures/unit.adm")).unwrap();
        PointedModel::at(m, "u").unwrap()
    }

    #[test]
    fn certain_likelihoods_are_respected() {
        let mut pm = unit();
        pm.model.set_likelihood("A", 0, q(1, 1));
        pm.model.set_likelihood("B", 0, q(0, 1));
        for seed in 0..20 {
            let s = sample_interpretation(&pm, 2, seed);
            let lab = root_label(&s);
            assert!(lab.contains("A") && !lab.contains("B"));
        }
    }

    #[test]
    fn frequency_of_half() {
        let pm = unit();
        let hits = (0..10_000).filter(|&k| root_label(&sample_interpretation(&pm, 0, k)).contains("A")).count();
        assert!((hits as f64 / 1e4 - 0.5).abs() <= 0.02, "{hits}");
    }

    #[test]
    fn top_and_bottom_are_exact() {
        let pm = unit();
        let t = monte_carlo_measure(&pm, &Concept::Top, 100, 3).unwrap();
        assert_eq!((t.estimate, t.lower, t.upper), (1.0, 1.0, 1.0));
        let b = monte_carlo_measure(&pm, &Concept::Bottom, 100, 3).unwrap();
        assert_eq!((b.estimate, b.lower, b.upper), (0.0, 0.0, 0.0));
    }

    #[test]
    fn disjunction_interval_contains_exact() {
        let pm = unit();
        let c = parse_concept("!(!A & !B)", None).unwrap();
        let e = monte_carlo_measure(&pm, &c, 100_000, 11).unwrap();
        assert!(e.contains(0.625), "{e:?}");
    }

    #[test]
    fn deterministic_in_seed() {
        let pm = unit();
        let c = parse_concept("A & !B", None).unwrap();
        assert_eq!(monte_carlo_measure(&pm, &c, 500, 9).unwrap(), monte_carlo_measure(&pm, &c, 500, 9).unwrap());
    }
}
