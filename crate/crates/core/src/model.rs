//! Aleatoric belief models: finite individuals, one stochastic matrix per
//! role, and per-individual concept likelihoods.
//!
//! # File format
//!
//! Line oriented, `#` starts a comment:
//!
//! ```text
//! individuals: u v w
//! concept A: u=1/2 v=0 w=0.9      # unlisted individuals have likelihood 0
//! role c: u->v=3/10 u->w=7/10     # rows not listed are a point mass on self
//! names: Hector={u,v}
//! ```
//!
//! A role that never appears is the identity. Numbers are `p/q` or decimals,
//! parsed exactly. Named individuals are stored as sets; a name behaves as a
//! {0,1}-valued concept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_prob, parse_q, Q};
use crate::syntax::{name, Name, Signature, ID_ROLE};

/// A finite aleatoric belief model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefModel {
    individuals: Vec<String>,
    index: HashMap<String, usize>,
    /// `concepts[A][i]` is ℓ(i, A).
    concepts: BTreeMap<Name, Vec<Q>>,
    /// `roles[ρ][i][j]` is ρ(i, j). `id` is always present.
    roles: BTreeMap<Name, Vec<Vec<Q>>>,
    /// Named individuals as sets of possible individuals.
    names: BTreeMap<Name, BTreeSet<usize>>,
}

/// One violated model invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A role row whose entries do not sum to exactly one.
    RowSum { role: String, individual: String, sum: Q },
    /// A negative entry in a role row.
    NegativeWeight { role: String, from: String, to: String },
    /// id(i,j) > 0 but id(j,k) ≠ id(i,k).
    IdCoherence { i: String, j: String, k: String },
    /// A likelihood outside `[0, 1]`.
    Likelihood { concept: String, individual: String },
    /// Two individuals sharing id-mass but disagreeing on a name.
    NameCoherence { name: String, i: String, j: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { role, individual, sum } => {
                write!(f, "row-sum: role {role} at {individual} sums to {sum}")
            }
            Violation::NegativeWeight { role, from, to } => write!(f, "negative weight: {role}({from},{to})"),
            Violation::IdCoherence { i, j, k } => {
                write!(f, "id-coherence: id({i},{j}) > 0 but id({j},{k}) != id({i},{k})")
            }
            Violation::Likelihood { concept, individual } => {
                write!(f, "likelihood: {concept} at {individual} outside [0,1]")
            }
            Violation::NameCoherence { name, i, j } => {
                write!(f, "name-coherence: {name} differs between id-related {i} and {j}")
            }
        }
    }
}

impl BeliefModel {
    /// A model over the given individuals with only the identity `id` role.
    pub fn new<S: AsRef<str>>(individuals: &[S]) -> Result<BeliefModel> {
        let individuals: Vec<String> = individuals.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (k, s) in individuals.iter().enumerate() {
            if index.insert(s.clone(), k).is_some() {
                return Err(Error::InvalidModel(format!("duplicate individual `{s}`")));
            }
        }
        if individuals.is_empty() {
            return Err(Error::InvalidModel("a model needs at least one individual".into()));
        }
        let mut m = BeliefModel { individuals, index, concepts: BTreeMap::new(), roles: BTreeMap::new(), names: BTreeMap::new() };
        m.add_role(ID_ROLE);
        Ok(m)
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

    pub fn individual_name(&self, i: usize) -> &str {
        &self.individuals[i]
    }

    pub fn index_of(&self, s: &str) -> Result<usize> {
        self.index.get(s).copied().ok_or_else(|| Error::UnknownIndividual(s.to_string()))
    }

    /// Declares a concept (all likelihoods zero) if absent.
    pub fn add_concept(&mut self, c: &str) {
        let n = self.len();
        self.concepts.entry(name(c)).or_insert_with(|| vec![Q::zero(); n]);
    }

    /// Declares a role as the identity if absent.
    pub fn add_role(&mut self, r: &str) {
        let n = self.len();
        self.roles.entry(name(r)).or_insert_with(|| identity(n));
    }

    pub fn set_likelihood(&mut self, c: &str, i: usize, v: Q) {
        self.add_concept(c);
        self.concepts.get_mut(c).unwrap()[i] = v;
    }

    pub fn set_weight(&mut self, r: &str, i: usize, j: usize, v: Q) {
        self.add_role(r);
        self.roles.get_mut(r).unwrap()[i][j] = v;
    }

    /// Replaces the row ρ(i, ·).
    pub fn set_row(&mut self, r: &str, i: usize, row: Vec<Q>) {
        assert_eq!(row.len(), self.len());
        self.add_role(r);
        self.roles.get_mut(r).unwrap()[i] = row;
    }

    pub fn set_name(&mut self, n: &str, members: BTreeSet<usize>) {
        self.names.insert(name(n), members);
    }

    /// ℓ(i, A); names read as their {0,1} indicator; unknown concepts are zero.
    pub fn likelihood(&self, c: &str, i: usize) -> Q {
        if let Some(v) = self.concepts.get(c) {
            return v[i].clone();
        }
        if let Some(s) = self.names.get(c) {
            return if s.contains(&i) { Q::one() } else { Q::zero() };
        }
        Q::zero()
    }

    /// The row ρ(i, ·). Undeclared roles read as the identity.
    pub fn row(&self, r: &str, i: usize) -> std::borrow::Cow<'_, [Q]> {
        match self.roles.get(r) {
            Some(m) => std::borrow::Cow::Borrowed(&m[i]),
            None => std::borrow::Cow::Owned(unit_row(self.len(), i)),
        }
    }

    pub fn weight(&self, r: &str, i: usize, j: usize) -> Q {
        self.row(r, i)[j].clone()
    }

    pub fn concept_names(&self) -> impl Iterator<Item = &Name> {
        self.concepts.keys()
    }

    pub fn role_names(&self) -> impl Iterator<Item = &Name> {
        self.roles.keys()
    }

    pub fn names(&self) -> &BTreeMap<Name, BTreeSet<usize>> {
        &self.names
    }

    pub fn has_concept(&self, c: &str) -> bool {
        self.concepts.contains_key(c)
    }

    pub fn has_role(&self, r: &str) -> bool {
        self.roles.contains_key(r)
    }

    /// The declared vocabulary of the model.
    pub fn signature(&self) -> Signature {
        let mut s = Signature::new();
        s.concepts.extend(self.concepts.keys().cloned());
        s.roles.extend(self.roles.keys().cloned());
        s.names.extend(self.names.keys().cloned());
        s
    }

    /// Individuals with positive ρ-weight from `i`.
    pub fn successors(&self, r: &str, i: usize) -> Vec<(usize, Q)> {
        self.row(r, i).iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(j, w)| (j, w.clone())).collect()
    }

    /// Appends a fresh individual with zero likelihoods, a self point mass on
    /// every role and no incoming mass.
    pub fn push_individual(&mut self, label: &str) -> Result<usize> {
        if self.index.contains_key(label) {
            return Err(Error::InvalidModel(format!("duplicate individual `{label}`")));
        }
        let k = self.len();
        self.individuals.push(label.to_string());
        self.index.insert(label.to_string(), k);
        for v in self.concepts.values_mut() {
            v.push(Q::zero());
        }
        for m in self.roles.values_mut() {
            for row in m.iter_mut() {
                row.push(Q::zero());
            }
            m.push(unit_row(k + 1, k));
        }
        Ok(k)
    }

    /// Removes individual `k`, dropping its row and column everywhere.
    pub fn remove_individual(&mut self, k: usize) {
        let label = self.individuals.remove(k);
        self.index.remove(&label);
        for (p, s) in self.individuals.iter().enumerate() {
            self.index.insert(s.clone(), p);
        }
        for v in self.concepts.values_mut() {
            v.remove(k);
        }
        for m in self.roles.values_mut() {
            m.remove(k);
            for row in m.iter_mut() {
                row.remove(k);
            }
        }
        for s in self.names.values_mut() {
            *s = s.iter().filter(|&&x| x != k).map(|&x| if x > k { x - 1 } else { x }).collect();
        }
    }

    /// Every violated invariant, with its location.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.len();
        for (c, v) in &self.concepts {
            for (i, p) in v.iter().enumerate() {
                if !crate::rational::is_prob(p) {
                    out.push(Violation::Likelihood { concept: c.to_string(), individual: self.individuals[i].clone() });
                }
            }
        }
        for (r, m) in &self.roles {
            for (i, row) in m.iter().enumerate() {
                for (j, w) in row.iter().enumerate() {
                    if w < &Q::zero() {
                        out.push(Violation::NegativeWeight {
                            role: r.to_string(),
                            from: self.individuals[i].clone(),
                            to: self.individuals[j].clone(),
                        });
                    }
                }
                let sum: Q = row.iter().sum();
                if !sum.is_one() {
                    out.push(Violation::RowSum { role: r.to_string(), individual: self.individuals[i].clone(), sum });
                }
            }
        }
        let id = &self.roles[ID_ROLE];
        for i in 0..n {
            for j in 0..n {
                if id[i][j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    if id[j][k] != id[i][k] {
                        out.push(Violation::IdCoherence {
                            i: self.individuals[i].clone(),
                            j: self.individuals[j].clone(),
                            k: self.individuals[k].clone(),
                        });
                    }
                }
                for (nm, set) in &self.names {
                    if set.contains(&i) != set.contains(&j) {
                        out.push(Violation::NameCoherence {
                            name: nm.to_string(),
                            i: self.individuals[i].clone(),
                            j: self.individuals[j].clone(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Parses the line-oriented model format.
    pub fn parse(text: &str) -> Result<BeliefModel> {
        let mut model: Option<BeliefModel> = None;
        let mut touched_rows: BTreeMap<Name, BTreeSet<usize>> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Syntax { pos: ln + 1, msg };
            let (head, body) = line.split_once(':').ok_or_else(|| err("expected `keyword: ...`".into()))?;
            let head = head.trim();
            if head == "individuals" {
                if model.is_some() {
                    return Err(err("individuals declared twice".into()));
                }
                let inds: Vec<&str> = body.split_whitespace().collect();
                model = Some(BeliefModel::new(&inds).map_err(|e| err(e.to_string()))?);
                continue;
            }
            let m = model.as_mut().ok_or_else(|| err("`individuals:` must come first".into()))?;
            if let Some(c) = head.strip_prefix("concept ") {
                let c = c.trim();
                check_ident(c).map_err(&err)?;
                m.add_concept(c);
                for tok in body.split_whitespace() {
                    let (ind, val) = tok.split_once('=').ok_or_else(|| err(format!("expected `ind=p`, got `{tok}`")))?;
                    let i = m.index_of(ind).map_err(|e| err(e.to_string()))?;
                    let v = parse_prob(val).map_err(|e| err(e.to_string()))?;
                    m.set_likelihood(c, i, v);
                }
            } else if let Some(r) = head.strip_prefix("role ") {
                let r = r.trim();
                check_ident(r).map_err(&err)?;
                m.add_role(r);
                let touched = touched_rows.entry(name(r)).or_default();
                for tok in body.split_whitespace() {
                    let (edge, val) = tok.split_once('=').ok_or_else(|| err(format!("expected `u->v=p`, got `{tok}`")))?;
                    let (a, b) = edge.split_once("->").ok_or_else(|| err(format!("expected `u->v`, got `{edge}`")))?;
                    let i = m.index_of(a).map_err(|e| err(e.to_string()))?;
                    let j = m.index_of(b).map_err(|e| err(e.to_string()))?;
                    let v = parse_q(val).map_err(|e| err(e.to_string()))?;
                    if touched.insert(i) {
                        let n = m.len();
                        m.set_row(r, i, vec![Q::zero(); n]);
                    }
                    m.set_weight(r, i, j, v);
                }
            } else if head == "names" {
                for tok in split_names(body) {
                    let (nm, set) = tok.split_once('=').ok_or_else(|| err(format!("expected `Name={{..}}`, got `{tok}`")))?;
                    let nm = nm.trim();
                    check_ident(nm).map_err(&err)?;
                    let inner = set
                        .trim()
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| err(format!("expected braces in `{tok}`")))?;
                    let mut members = BTreeSet::new();
                    for ind in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        members.insert(m.index_of(ind).map_err(|e| err(e.to_string()))?);
                    }
                    m.set_name(nm, members);
                }
            } else {
                return Err(err(format!("unknown keyword `{head}`")));
            }
        }
        model.ok_or_else(|| Error::Syntax { pos: 0, msg: "missing `individuals:` line".into() })
    }

    /// Parses and rejects models with invariant violations.
    pub fn parse_valid(text: &str) -> Result<BeliefModel> {
        let m = BeliefModel::parse(text)?;
        let v = m.validate();
        if let Some(first) = v.first() {
            return Err(Error::InvalidModel(first.to_string()));
        }
        Ok(m)
    }
}

fn check_ident(s: &str) -> std::result::Result<(), String> {
    let ok = !s.is_empty()
        && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !s.starts_with("E_")
        && !s.starts_with("Ex_")
        && s != "top"
        && s != "bot";
    if ok {
        Ok(())
    } else {
        Err(format!("invalid identifier `{s}`"))
    }
}

fn split_names(body: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for c in body.chars() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else if !c.is_whitespace() {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn unit_row(n: usize, i: usize) -> Vec<Q> {
    let mut row = vec![Q::zero(); n];
    row[i] = Q::one();
    row
}

fn identity(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| unit_row(n, i)).collect()
}

impl fmt::Display for BeliefModel {
    /// Writes the model in the file format accepted by [`BeliefModel::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "individuals: {}", self.individuals.join(" "))?;
        for (c, v) in &self.concepts {
            write!(f, "concept {c}:")?;
            for (i, p) in v.iter().enumerate() {
                if !p.is_zero() {
                    write!(f, " {}={}", self.individuals[i], p)?;
                }
            }
            writeln!(f)?;
        }
        for (r, m) in &self.roles {
            write!(f, "role {r}:")?;
            for (i, row) in m.iter().enumerate() {
                for (j, w) in row.iter().enumerate() {
                    if !w.is_zero() {
                        write!(f, " {}->{}={}", self.individuals[i], self.individuals[j], w)?;
                    }
                }
            }
            writeln!(f)?;
        }
        if !self.names.is_empty() {
            write!(f, "names:")?;
            for (nm, set) in &self.names {
                let members: Vec<&str> = set.iter().map(|&k| self.individuals[k].as_str()).collect();
                write!(f, " {nm}={{{}}}", members.join(","))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A model together with a distinguished individual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedModel {
    pub model: BeliefModel,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: BeliefModel, point: usize) -> Result<PointedModel> {
        if point >= model.len() {
            return Err(Error::UnknownIndividual(point.to_string()));
        }
        Ok(PointedModel { model, point })
    }

    pub fn at(model: BeliefModel, label: &str) -> Result<PointedModel> {
        let point = model.index_of(label)?;
        Ok(PointedModel { model, point })
    }
}
