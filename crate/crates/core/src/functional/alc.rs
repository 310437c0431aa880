//! Classical ALC interpretations, their satisfaction relation, positive
//! normal form, and the 0/1 embedding into belief models.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::model::BeliefModel;
use crate::rational::Q;
use crate::syntax::{name, Concept, Name, ID_ROLE};

/// A finite ALC interpretation: concept extensions and role relations over
/// a list of individuals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlcInterpretation {
    individuals: Vec<String>,
    concepts: BTreeMap<Name, BTreeSet<usize>>,
    roles: BTreeMap<Name, BTreeSet<(usize, usize)>>,
}

impl AlcInterpretation {
    /// An interpretation with empty extensions over `individuals`.
    pub fn new<S: AsRef<str>>(individuals: &[S]) -> Result<AlcInterpretation> {
        let individuals: Vec<String> = individuals.iter().map(|s| s.as_ref().to_string()).collect();
        if individuals.is_empty() {
            return Err(Error::InvalidModel("an interpretation needs at least one individual".into()));
        }
        let distinct: BTreeSet<&String> = individuals.iter().collect();
        if distinct.len() != individuals.len() {
            return Err(Error::InvalidModel("duplicate individual".into()));
        }
        Ok(AlcInterpretation { individuals, concepts: BTreeMap::new(), roles: BTreeMap::new() })
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn individuals(&self) -> &[String] {
        &self.individuals
    }

    pub fn index_of(&self, s: &str) -> Result<usize> {
        self.individuals.iter().position(|x| x == s).ok_or_else(|| Error::UnknownIndividual(s.to_string()))
    }

    /// Declares a concept name with an empty extension.
    pub fn add_concept(&mut self, c: &str) {
        self.concepts.entry(name(c)).or_default();
    }

    /// Declares a role name with an empty relation.
    pub fn add_role(&mut self, r: &str) {
        self.roles.entry(name(r)).or_default();
    }

    /// Puts `i` into the extension of `c`.
    pub fn assert_concept(&mut self, c: &str, i: usize) {
        self.concepts.entry(name(c)).or_default().insert(i);
    }

    /// Adds the pair `(i, j)` to the relation of `r`.
    pub fn assert_role(&mut self, r: &str, i: usize, j: usize) {
        self.roles.entry(name(r)).or_default().insert((i, j));
    }

    pub fn holds(&self, c: &str, i: usize) -> bool {
        self.concepts.get(c).is_some_and(|s| s.contains(&i))
    }

    /// `ρ`-successors of `i`, in index order.
    pub fn successors(&self, r: &str, i: usize) -> Vec<usize> {
        match self.roles.get(r) {
            Some(rel) => rel.range((i, 0)..=(i, usize::MAX)).map(|&(_, j)| j).collect(),
            None => Vec::new(),
        }
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &Name> {
        self.concepts.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &Name> {
        self.roles.keys()
    }

    /// Whether every declared role gives every individual exactly one successor.
    pub fn is_functional(&self) -> bool {
        self.roles.keys().all(|r| (0..self.len()).all(|i| self.successors(r, i).len() == 1))
    }
}

/// Classical satisfaction `I_i ⊨ C`. Undeclared names have empty extensions.
pub fn alc_eval(itp: &AlcInterpretation, i: usize, c: &Concept) -> bool {
    match c {
        Concept::Top => true,
        Concept::Bottom => false,
        Concept::Atom(a) => itp.holds(a, i),
        Concept::Not(d) => !alc_eval(itp, i, d),
        Concept::And(a, b) => alc_eval(itp, i, a) && alc_eval(itp, i, b),
        Concept::Or(a, b) => alc_eval(itp, i, a) || alc_eval(itp, i, b),
        Concept::Exists(r, d) => itp.successors(r, i).into_iter().any(|j| alc_eval(itp, j, d)),
    }
}

/// Positive normal form: negation pushed down to atoms. `¬∃ρ.C` becomes
/// `∃ρ.¬C`, which is an equivalence over functional interpretations only.
pub fn to_pnf(c: &Concept) -> Concept {
    pnf(c, false)
}

fn pnf(c: &Concept, neg: bool) -> Concept {
    match (c, neg) {
        (Concept::Top, false) | (Concept::Bottom, true) => Concept::Top,
        (Concept::Top, true) | (Concept::Bottom, false) => Concept::Bottom,
        (Concept::Atom(_), false) => c.clone(),
        (Concept::Atom(_), true) => Concept::Not(Box::new(c.clone())),
        (Concept::Not(d), _) => pnf(d, !neg),
        (Concept::And(a, b), false) => Concept::and(pnf(a, false), pnf(b, false)),
        (Concept::And(a, b), true) => Concept::or(pnf(a, true), pnf(b, true)),
        (Concept::Or(a, b), false) => Concept::or(pnf(a, false), pnf(b, false)),
        (Concept::Or(a, b), true) => Concept::and(pnf(a, true), pnf(b, true)),
        (Concept::Exists(r, d), _) => Concept::Exists(r.clone(), Box::new(pnf(d, neg))),
    }
}

/// The belief model of a classical interpretation: 0/1 likelihoods, uniform
/// distributions over successors and a point-mass `id`.
pub fn from_alc_interpretation(itp: &AlcInterpretation) -> Result<BeliefModel> {
    let mut m = BeliefModel::new(&itp.individuals)?;
    for (c, ext) in &itp.concepts {
        m.add_concept(c);
        for &i in ext {
            m.set_likelihood(c, i, Q::one());
        }
    }
    let n = itp.len();
    for r in itp.roles.keys() {
        if &**r == ID_ROLE {
            return Err(Error::Precondition("the role `id` is reserved for the identity distribution".into()));
        }
        m.add_role(r);
        for i in 0..n {
            let succ = itp.successors(r, i);
            if succ.is_empty() {
                return Err(Error::Precondition(format!(
                    "individual `{}` has no `{r}`-successor; a distribution needs at least one",
                    itp.individuals[i]
                )));
            }
            let w = Q::new(1.into(), (succ.len() as i64).into());
            let mut row = vec![Q::zero(); n];
            for j in succ {
                row[j] = w.clone();
            }
            m.set_row(r, i, row);
        }
    }
    Ok(m)
}
