//! Bayesian belief revision.
//!
//! * Role learning conditions one role row of one individual on an
//!   observation `⟨α|β⟩_ρ`.
//! * Concept learning splits an individual into a high- and a low-bias
//!   clone for a concept, learns the `id` distribution between them from an
//!   observation, and merges them back weighted by that distribution.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::eval::{check_formula, Evaluator};
use crate::model::{BeliefModel, PointedModel};
use crate::rational::Q;
use crate::syntax::{Formula, Name, ID_ROLE};

/// An observation `⟨target | given⟩_role` made at some individual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub target: Formula,
    pub given: Formula,
    pub role: Name,
}

impl Observation {
    pub fn new(target: Formula, given: Formula, role: &str) -> Observation {
        Observation { target, given, role: crate::syntax::name(role) }
    }

    /// Reads an observation off a formula of the form `[α|β]_ρ`.
    pub fn from_formula(f: &Formula) -> Result<Observation> {
        match f {
            Formula::Marginal { target, given, role } => {
                Ok(Observation { target: (**target).clone(), given: (**given).clone(), role: role.clone() })
            }
            other => Err(Error::Precondition(format!("`{other}` is not an observation `[α|β]_ρ`"))),
        }
    }

    pub fn as_formula(&self) -> Formula {
        Formula::Marginal {
            target: std::sync::Arc::new(self.target.clone()),
            given: std::sync::Arc::new(self.given.clone()),
            role: self.role.clone(),
        }
    }
}

/// Outcome of a role update.
#[derive(Clone, Debug)]
pub struct RoleUpdate {
    pub model: BeliefModel,
    /// Sum of the updated row before any renormalisation.
    pub raw_sum: Q,
    /// Probability of the observation under the prior.
    pub evidence: Q,
}

/// The φ-update: `r'(ρ,i)(j) = ρ(i,j)·B_j(α) / B_i(⟨α|β⟩_ρ)`. Only row
/// `(ρ, i)` changes. With `normalize`, the row is rescaled to sum to one
/// (it already does when `β = ⊤`).
pub fn role_update(pm: &PointedModel, obs: &Observation, normalize: bool) -> Result<RoleUpdate> {
    let m = &pm.model;
    let i = pm.point;
    check_formula(m, &obs.as_formula())?;
    let mut ev = Evaluator::new(m);
    let evidence = ev.eval(&obs.as_formula(), i);
    if evidence.is_zero() {
        return Err(Error::ZeroProbability);
    }
    let row: Vec<Q> = m
        .row(&obs.role, i)
        .iter()
        .enumerate()
        .map(|(j, w)| if w.is_zero() { Q::zero() } else { w * ev.eval(&obs.target, j) / &evidence })
        .collect();
    let raw_sum: Q = row.iter().sum();
    let row = if normalize && !raw_sum.is_zero() && !raw_sum.is_one() { row.into_iter().map(|w| w / &raw_sum).collect() } else { row };
    let mut model = m.clone();
    model.set_row(&obs.role, i, row);
    Ok(RoleUpdate { model, raw_sum, evidence })
}

/// Label used for the clone of individual `label`.
pub fn clone_label(m: &BeliefModel, label: &str) -> String {
    let mut s = format!("{label}*");
    while m.index_of(&s).is_ok() {
        s.push('*');
    }
    s
}

/// The `A`-extension at `i`: a fresh clone `i*` copies `i`'s likelihoods,
/// outgoing rows and names; all mass into `i` is split evenly between `i`
/// and `i*`; and `ℓ'(i,A) = 2p − p²`, `ℓ'(i*,A) = p²` with `p = ℓ(i,A)`.
pub fn concept_extension(pm: &PointedModel, a: &str) -> Result<(BeliefModel, usize)> {
    let mut m = pm.model.clone();
    m.signature().check_concept(a)?;
    if m.names().contains_key(a) {
        return Err(Error::Precondition(format!("`{a}` is a name; only concept likelihoods can be learnt")));
    }
    let i = pm.point;
    let label = clone_label(&m, m.individual_name(i));
    let star = m.push_individual(&label)?;
    let n = m.len();
    let concepts: Vec<Name> = m.concept_names().cloned().collect();
    for c in &concepts {
        let v = m.likelihood(c, i);
        m.set_likelihood(c, star, v);
    }
    let names: Vec<(Name, bool)> = m.names().iter().map(|(k, s)| (k.clone(), s.contains(&i))).collect();
    for (nm, member) in names {
        if member {
            let mut set = m.names()[&nm].clone();
            set.insert(star);
            m.set_name(&nm, set);
        }
    }
    let roles: Vec<Name> = m.role_names().cloned().collect();
    for r in &roles {
        let row = m.row(r, i).into_owned();
        m.set_row(r, star, row);
        for j in 0..n {
            let w = m.weight(r, j, i);
            if w.is_zero() {
                continue;
            }
            let half = w / Q::from_integer(2.into());
            m.set_weight(r, j, i, half.clone());
            m.set_weight(r, j, star, half);
        }
    }
    let p = pm.model.likelihood(a, i);
    let two = Q::from_integer(2.into());
    m.set_likelihood(a, i, &two * &p - &p * &p);
    m.set_likelihood(a, star, &p * &p);
    Ok((m, star))
}

/// `id` weight of `i` versus `star` in `i`'s `id` row, normalised.
pub fn id_weights(m: &BeliefModel, i: usize, star: usize) -> Result<(Q, Q)> {
    let (wi, ws) = (m.weight(ID_ROLE, i, i), m.weight(ID_ROLE, i, star));
    let total = &wi + &ws;
    if total.is_zero() {
        return Err(Error::Precondition(format!(
            "`{}` and `{}` are not id-related",
            m.individual_name(i),
            m.individual_name(star)
        )));
    }
    Ok((wi / &total, ws / total))
}

/// Merges `star` back into `i`: likelihoods and outgoing rows become the
/// `(w, 1−w)` mixture given by `i`'s `id` row, incoming mass to the two is
/// summed, and the `id` row is re-derived from `star`'s merged row (the
/// prior block distribution) so that id coherence is preserved.
pub fn aggregate(m: &BeliefModel, i: usize, star: usize) -> Result<BeliefModel> {
    if i == star || i >= m.len() || star >= m.len() {
        return Err(Error::Precondition("aggregation needs two distinct individuals".into()));
    }
    let (w, v) = id_weights(m, i, star)?;
    let mut out = m.clone();
    let concepts: Vec<Name> = m.concept_names().cloned().collect();
    for c in &concepts {
        out.set_likelihood(c, i, &w * m.likelihood(c, i) + &v * m.likelihood(c, star));
    }
    let merge_cols = |row: &[Q]| -> Vec<Q> {
        let mut r = row.to_vec();
        let moved = std::mem::replace(&mut r[star], Q::zero());
        r[i] += moved;
        r
    };
    let roles: Vec<Name> = m.role_names().cloned().collect();
    for r in &roles {
        for j in 0..m.len() {
            let row = merge_cols(&m.row(r, j));
            out.set_row(r, j, row);
        }
        let row_i = merge_cols(&m.row(r, i));
        let row_s = merge_cols(&m.row(r, star));
        let mixed: Vec<Q> = if &**r == ID_ROLE {
            row_s
        } else {
            row_i.iter().zip(&row_s).map(|(a, b)| &w * a + &v * b).collect()
        };
        out.set_row(r, i, mixed);
    }
    // Other members of the id block followed the prior row; keep them coherent.
    let id_row = out.row(ID_ROLE, i).into_owned();
    for j in 0..m.len() {
        if j != i && j != star && !id_row[j].is_zero() {
            out.set_row(ID_ROLE, j, id_row.clone());
        }
    }
    out.remove_individual(star);
    Ok(out)
}

/// Intermediate and final models of concept learning.
#[derive(Clone, Debug)]
pub struct ConceptLearning {
    /// The `A`-extension before learning.
    pub extended: BeliefModel,
    /// Index of the clone in `extended` and `updated`.
    pub star: usize,
    /// Observation probability at `i` and at the clone.
    pub evidence: (Q, Q),
    /// Extension after the `id` update at `i`.
    pub updated: BeliefModel,
    /// Posterior `id` weights of `i` and the clone.
    pub weights: (Q, Q),
    /// Aggregated model over the original individuals.
    pub model: BeliefModel,
}

/// Concept learning: extension, role learning over `id` with `⟨obs|⊤⟩_id`
/// at `i`, then aggregation.
pub fn concept_learn(pm: &PointedModel, a: &str, obs: &Formula) -> Result<ConceptLearning> {
    check_formula(&pm.model, obs)?;
    let (extended, star) = concept_extension(pm, a)?;
    let i = pm.point;
    let mut ev = Evaluator::new(&extended);
    let evidence = (ev.eval(obs, i), ev.eval(obs, star));
    let ext_pm = PointedModel::new(extended.clone(), i)?;
    let update = role_update(&ext_pm, &Observation::new(obs.clone(), Formula::Always, ID_ROLE), false)?;
    let weights = id_weights(&update.model, i, star)?;
    let model = aggregate(&update.model, i, star)?;
    Ok(ConceptLearning { extended, star, evidence, updated: update.model, weights, model })
}
