//! Polynomial constraint systems for simple acyclic knowledge bases.
//!
//! The system describes a belief model over a fixed finite template of
//! individuals: `k_a` possibilities for every name `a` and a pool of
//! anonymous individuals, one row per unit of `#C̄`. Every variable is a
//! likelihood, a role weight or a non-negative slack; every equation is one
//! clause of the satisfaction definition instantiated at one individual. Any
//! solution therefore *is* a model of the knowledge base.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::consistency::partition::ConceptPartition;
use crate::error::{Error, Result};
use crate::kb::{AAxiom, KnowledgeBase, SimpleAxiom};
use crate::model::BeliefModel;
use crate::rational::{from_f64_bounded, from_f64_exact, Q};
use crate::syntax::{Formula, Name, ID_ROLE};

/// A polynomial with exact rational coefficients; each monomial is a sorted
/// list of variable indices (repetition encodes powers).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    pub terms: BTreeMap<Vec<usize>, Q>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: Q) -> Poly {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(v: usize) -> Poly {
        let mut p = Poly::zero();
        p.terms.insert(vec![v], Q::one());
        p
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Vec<usize> = m1.iter().chain(m2.iter()).copied().collect();
                m.sort_unstable();
                let e = out.terms.entry(m.clone()).or_insert_with(Q::zero);
                *e += c1 * c2;
                if e.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.terms.keys().flatten().copied().collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| crate::rational::to_f64(c) * m.iter().map(|&v| x[v]).product::<f64>())
            .sum()
    }

    pub fn eval_exact(&self, x: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &v in m {
                t *= &x[v];
            }
            acc += t;
        }
        acc
    }
}

/// A template individual.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    /// The `k`-th possibility (1-based) of a named individual.
    Named(Name, usize),
    /// The `k`-th anonymous row (1-based) of a concept class.
    Anon(usize, usize),
}

/// What a variable stands for; used for naming and model extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// Likelihood of `concept` at an anonymous slot: `x^D_{C̄,i}`.
    Concept { concept: Name, slot: usize },
    /// Likelihood of `concept` at a named slot: `n^{aD}_i`.
    NamedConcept { concept: Name, slot: usize },
    /// Weight of `role` from slot to slot.
    Role { role: Name, from: usize, to: usize },
    /// Shared id row of a named block: `r^{a,id,a}_{*,l}`.
    Id { name: Name, to: usize },
    /// Zero-denominator slack of marginal axiom `axiom` at a slot.
    Slack { axiom: usize, slot: usize },
}

/// `Φ = 0` constraints and `Ψ` bounds over tagged variables.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub slots: Vec<Slot>,
    pub vars: Vec<VarKind>,
    /// Box bounds (`upper = None` means unbounded above).
    pub bounds: Vec<(f64, Option<f64>)>,
    /// Equalities `p = 0`, each with a short provenance label.
    pub equations: Vec<(String, Poly)>,
    /// Concepts carried by every slot.
    pub concepts: Vec<Name>,
    /// Roles other than `id` with weight variables.
    pub roles: Vec<Name>,
    /// Names and their block sizes `k_a`.
    pub blocks: BTreeMap<Name, usize>,
    /// Number of anonymous slots.
    pub anon: usize,
    partition_labels: Vec<String>,
}

/// How a slot sees an atom: fixed value or variable.
fn atom_poly(
    f: &Formula,
    slot: usize,
    slots: &[Slot],
    concept_var: &BTreeMap<(Name, usize), usize>,
) -> Poly {
    match f {
        Formula::Always => Poly::constant(Q::one()),
        Formula::Never => Poly::zero(),
        Formula::Atom(a) => match concept_var.get(&(a.clone(), slot)) {
            Some(&v) => Poly::var(v),
            None => {
                // A name used as a concept: 1 on its own block, 0 elsewhere.
                let inside = matches!(&slots[slot], Slot::Named(n, _) if n == a);
                Poly::constant(if inside { Q::one() } else { Q::zero() })
            }
        },
        _ => unreachable!("simple axioms have atomic operands"),
    }
}

impl ConstraintSystem {
    /// Generates the system for a simple, acyclic, well-formed KB.
    pub fn generate(kb: &KnowledgeBase, partition: &ConceptPartition) -> Result<ConstraintSystem> {
        let tbook = kb.simple_tbook()?;
        if !kb.is_simple() {
            return Err(Error::NotSimple("A-Book has non-atomic concept assertions".into()));
        }
        kb.check_well_formed()?;
        // Concepts: every declared concept that is not a name, plus T-Book concepts.
        let mut concepts: BTreeSet<Name> = kb.signature.concepts.iter().filter(|c| !kb.signature.names.contains(*c)).cloned().collect();
        for ax in &tbook {
            concepts.extend(ax.concepts().into_iter().filter(|c| !kb.signature.names.contains(c)));
        }
        for ax in &kb.abook {
            if let AAxiom::Concept { formula: Formula::Atom(c), .. } = ax {
                if !kb.signature.names.contains(c) {
                    concepts.insert(c.clone());
                }
            }
        }
        let concepts: Vec<Name> = concepts.into_iter().collect();
        let mut roles: BTreeSet<Name> = BTreeSet::new();
        for ax in &tbook {
            if let SimpleAxiom::Marginal { role, .. } = ax {
                roles.insert(role.clone());
            }
        }
        for ax in &kb.abook {
            if let AAxiom::Role { role, .. } = ax {
                roles.insert(role.clone());
            }
        }
        roles.remove(ID_ROLE);
        let roles: Vec<Name> = roles.into_iter().collect();

        // Named blocks: k_a = max(1, number of axioms mentioning a).
        let mut blocks: BTreeMap<Name, usize> = kb.signature.names.iter().map(|n| (n.clone(), 0)).collect();
        for ax in &kb.abook {
            match ax {
                AAxiom::Concept { a, .. } => *blocks.entry(a.clone()).or_insert(0) += 1,
                AAxiom::Role { a, b, .. } => {
                    *blocks.entry(a.clone()).or_insert(0) += 1;
                    if b != a {
                        *blocks.entry(b.clone()).or_insert(0) += 1;
                    }
                }
            }
        }
        for k in blocks.values_mut() {
            *k = (*k).max(1);
        }
        let mut slots: Vec<Slot> = Vec::new();
        for (n, k) in &blocks {
            for i in 1..=*k {
                slots.push(Slot::Named(n.clone(), i));
            }
        }
        let named = slots.len();
        for (c, &cnt) in partition.counts.iter().enumerate() {
            for i in 1..=cnt {
                slots.push(Slot::Anon(c, i));
            }
        }
        if slots.len() == named {
            slots.push(Slot::Anon(usize::MAX, 1));
        }
        let anon = slots.len() - named;
        let partition_labels: Vec<String> = (0..partition.classes.len()).map(|c| partition.label(c)).collect();

        let mut vars = Vec::new();
        let mut bounds = Vec::new();
        let mut concept_var: BTreeMap<(Name, usize), usize> = BTreeMap::new();
        for (s, slot) in slots.iter().enumerate() {
            for c in &concepts {
                concept_var.insert((c.clone(), s), vars.len());
                vars.push(match slot {
                    Slot::Named(..) => VarKind::NamedConcept { concept: c.clone(), slot: s },
                    Slot::Anon(..) => VarKind::Concept { concept: c.clone(), slot: s },
                });
                bounds.push((0.0, Some(1.0)));
            }
        }
        let is_named = |s: usize| matches!(slots[s], Slot::Named(..));
        let mut role_var: BTreeMap<(Name, usize, usize), usize> = BTreeMap::new();
        for r in &roles {
            for from in 0..slots.len() {
                for to in 0..slots.len() {
                    if !is_named(from) && is_named(to) {
                        continue;
                    }
                    role_var.insert((r.clone(), from, to), vars.len());
                    vars.push(VarKind::Role { role: r.clone(), from, to });
                    bounds.push((0.0, Some(1.0)));
                }
            }
        }
        let mut id_var: BTreeMap<(Name, usize), usize> = BTreeMap::new();
        for (s, slot) in slots.iter().enumerate() {
            if let Slot::Named(n, _) = slot {
                id_var.insert((n.clone(), s), vars.len());
                vars.push(VarKind::Id { name: n.clone(), to: s });
                bounds.push((0.0, Some(1.0)));
            }
        }
        let block_slots = |n: &Name| -> Vec<usize> {
            (0..slots.len()).filter(|&s| matches!(&slots[s], Slot::Named(m, _) if m == n)).collect()
        };
        // Row of `role` at `from`, as (to, weight polynomial) pairs.
        let row = |role: &Name, from: usize| -> Vec<(usize, Poly)> {
            if &**role == ID_ROLE {
                match &slots[from] {
                    Slot::Named(n, _) => block_slots(n).into_iter().map(|t| (t, Poly::var(id_var[&(n.clone(), t)]))).collect(),
                    Slot::Anon(..) => vec![(from, Poly::constant(Q::one()))],
                }
            } else {
                (0..slots.len())
                    .filter_map(|to| role_var.get(&(role.clone(), from, to)).map(|&v| (to, Poly::var(v))))
                    .collect()
            }
        };

        let mut equations: Vec<(String, Poly)> = Vec::new();
        let slot_name = |s: usize| slot_label(&slots[s], &partition_labels);
        for (k, ax) in tbook.iter().enumerate() {
            for s in 0..slots.len() {
                let at = |f: &Formula| atom_poly(f, s, &slots, &concept_var);
                match ax {
                    SimpleAxiom::Ite { c, d, e, f } => {
                        let dv = at(d);
                        let rhs = dv.mul(&at(e)).add(&Poly::constant(Q::one()).sub(&dv).mul(&at(f)));
                        equations.push((format!("T{k} ite @{}", slot_name(s)), at(c).sub(&rhs)));
                    }
                    SimpleAxiom::Eq { c, d } => {
                        equations.push((format!("T{k} eq @{}", slot_name(s)), at(c).sub(&at(d))));
                    }
                    SimpleAxiom::Marginal { c, d, e, role } => {
                        let mut den = Poly::zero();
                        let mut num = Poly::zero();
                        for (t, w) in row(role, s) {
                            let at_t = |f: &Formula| atom_poly(f, t, &slots, &concept_var);
                            let we = w.mul(&at_t(e));
                            num = num.add(&we.mul(&at_t(d)));
                            den = den.add(&we);
                        }
                        equations.push((format!("T{k} marginal @{}", slot_name(s)), den.mul(&at(c)).sub(&num)));
                        let sv = vars.len();
                        vars.push(VarKind::Slack { axiom: k, slot: s });
                        bounds.push((0.0, None));
                        let slack = den.mul(&Poly::var(sv)).add(&at(c)).sub(&Poly::constant(Q::one()));
                        equations.push((format!("T{k} slack @{}", slot_name(s)), slack));
                    }
                }
            }
        }
        for r in &roles {
            for s in 0..slots.len() {
                let sum = row(r, s).into_iter().fold(Poly::zero(), |acc, (_, w)| acc.add(&w));
                equations.push((format!("row {r} @{}", slot_name(s)), sum.sub(&Poly::constant(Q::one()))));
            }
        }
        for n in blocks.keys() {
            let sum = block_slots(n).into_iter().fold(Poly::zero(), |acc, t| acc.add(&Poly::var(id_var[&(n.clone(), t)])));
            equations.push((format!("row id @{n}"), sum.sub(&Poly::constant(Q::one()))));
        }
        for (k, ax) in kb.abook.iter().enumerate() {
            match ax {
                AAxiom::Concept { a, p, formula } => {
                    let first = block_slots(a)[0];
                    let mut lhs = Poly::zero();
                    for (t, w) in row(&Name::from(ID_ROLE), first) {
                        lhs = lhs.add(&w.mul(&atom_poly(formula, t, &slots, &concept_var)));
                    }
                    equations.push((format!("A{k} concept {a}"), lhs.sub(&Poly::constant(p.clone()))));
                }
                AAxiom::Role { a, b, p, role } => {
                    let targets: BTreeSet<usize> = block_slots(b).into_iter().collect();
                    for s in block_slots(a) {
                        let lhs = row(role, s)
                            .into_iter()
                            .filter(|(t, _)| targets.contains(t))
                            .fold(Poly::zero(), |acc, (_, w)| acc.add(&w));
                        equations.push((format!("A{k} role @{}", slot_name(s)), lhs.sub(&Poly::constant(p.clone()))));
                    }
                }
            }
        }
        Ok(ConstraintSystem { slots, vars, bounds, equations, concepts, roles, blocks, anon, partition_labels })
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Name of variable `v`, e.g. `x^V_{[F],1}` or `r^{Hector,c,Julia}_{1,2}`.
    pub fn var_name(&self, v: usize) -> String {
        let lbl = |s: usize| slot_label(&self.slots[s], &self.partition_labels);
        let parts = |s: usize| -> (String, String) {
            match &self.slots[s] {
                Slot::Named(n, k) => (n.to_string(), k.to_string()),
                Slot::Anon(c, k) => (self.class_label(*c), k.to_string()),
            }
        };
        match &self.vars[v] {
            VarKind::Concept { concept, slot } => {
                let (c, k) = parts(*slot);
                format!("x^{concept}_{{{c},{k}}}")
            }
            VarKind::NamedConcept { concept, slot } => {
                let (a, k) = parts(*slot);
                format!("n^{{{a},{concept}}}_{k}")
            }
            VarKind::Role { role, from, to } => {
                let (a, i) = parts(*from);
                let (b, j) = parts(*to);
                format!("r^{{{a},{role},{b}}}_{{{i},{j}}}")
            }
            VarKind::Id { name, to } => {
                let (_, j) = parts(*to);
                format!("r^{{{name},id,{name}}}_{{*,{j}}}")
            }
            VarKind::Slack { axiom, slot } => format!("e^{{T{axiom}}}_{{{}}}", lbl(*slot)),
        }
    }

    fn class_label(&self, c: usize) -> String {
        if c == usize::MAX {
            "[]".to_string()
        } else {
            format!("[{}]", self.partition_labels[c])
        }
    }

    /// Writes the system, one constraint per line.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} variables, {} equalities\n", self.vars.len(), self.equations.len()));
        for (v, (lo, hi)) in self.bounds.iter().enumerate() {
            match hi {
                Some(h) => out.push_str(&format!("{lo} <= {} <= {h}\n", self.var_name(v))),
                None => out.push_str(&format!("{} >= {lo}\n", self.var_name(v))),
            }
        }
        for (label, p) in &self.equations {
            out.push_str(&format!("{} = 0    # {label}\n", self.poly_text(p)));
        }
        out
    }

    pub fn poly_text(&self, p: &Poly) -> String {
        if p.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in p.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_empty() {
                factors.push(a.to_string());
            }
            factors.extend(m.iter().map(|&v| self.var_name(v)));
            s.push_str(&factors.join("*"));
        }
        s
    }

    /// Largest absolute equation residual and bound violation at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let eq = self.equations.iter().map(|(_, p)| p.eval_f64(x).abs()).fold(0.0, f64::max);
        let bd = self
            .bounds
            .iter()
            .zip(x)
            .map(|((lo, hi), &v)| (lo - v).max(0.0).max(hi.map_or(0.0, |h| v - h)))
            .fold(0.0, f64::max);
        eq.max(bd)
    }

    /// Builds a belief model from an assignment. Values are rounded to
    /// rationals with denominator at most `max_den` (or taken exactly as
    /// dyadics when `max_den` is `None`), clamped to `[0,1]`, and each role
    /// row is renormalised exactly.
    pub fn extract_model(&self, x: &[f64], max_den: Option<u64>) -> Result<BeliefModel> {
        if x.len() != self.vars.len() {
            return Err(Error::Precondition("assignment length does not match the system".into()));
        }
        let conv = |v: f64| -> Q {
            let v = v.clamp(0.0, 1.0);
            match max_den {
                Some(d) => from_f64_bounded(v, d),
                None => from_f64_exact(v),
            }
        };
        let labels: Vec<String> = (0..self.slots.len()).map(|s| self.model_label(s)).collect();
        let mut m = BeliefModel::new(&labels)?;
        for c in &self.concepts {
            m.add_concept(c);
        }
        for r in &self.roles {
            m.add_role(r);
        }
        let n = self.slots.len();
        let mut rows: BTreeMap<(Name, usize), Vec<Q>> = BTreeMap::new();
        let mut id_rows: BTreeMap<Name, Vec<Q>> = BTreeMap::new();
        for (v, kind) in self.vars.iter().enumerate() {
            match kind {
                VarKind::Concept { concept, slot } | VarKind::NamedConcept { concept, slot } => {
                    m.set_likelihood(concept, *slot, conv(x[v]));
                }
                VarKind::Role { role, from, to } => {
                    rows.entry((role.clone(), *from)).or_insert_with(|| vec![Q::zero(); n])[*to] = conv(x[v]);
                }
                VarKind::Id { name, to } => {
                    id_rows.entry(name.clone()).or_insert_with(|| vec![Q::zero(); n])[*to] = conv(x[v]);
                }
                VarKind::Slack { .. } => {}
            }
        }
        for ((role, from), row) in rows {
            m.set_row(&role, from, normalise(row, from));
        }
        for (name, row) in id_rows {
            let row = normalise(row, usize::MAX);
            let members: BTreeSet<usize> = (0..n).filter(|&s| matches!(&self.slots[s], Slot::Named(a, _) if *a == name)).collect();
            let row = if row.iter().all(Zero::is_zero) {
                let k = Q::from_integer((members.len() as i64).into());
                (0..n).map(|s| if members.contains(&s) { Q::one() / &k } else { Q::zero() }).collect()
            } else {
                row
            };
            for &s in &members {
                m.set_row(ID_ROLE, s, row.clone());
            }
            m.set_name(&name, members);
        }
        Ok(m)
    }

    fn model_label(&self, s: usize) -> String {
        match &self.slots[s] {
            Slot::Named(n, k) => format!("{n}_{k}"),
            Slot::Anon(_, _) => format!("u{}", s + 1),
        }
    }
}

/// Scales a row to sum to one; an all-zero row becomes a point mass on
/// `fallback` (or stays zero when `fallback` is out of range).
fn normalise(row: Vec<Q>, fallback: usize) -> Vec<Q> {
    let sum: Q = row.iter().sum();
    if sum.is_zero() {
        let mut r = vec![Q::zero(); row.len()];
        if fallback < r.len() {
            r[fallback] = Q::one();
        }
        return r;
    }
    row.into_iter().map(|v| v / &sum).collect()
}

fn slot_label(slot: &Slot, labels: &[String]) -> String {
    match slot {
        Slot::Named(n, k) => format!("{n}{k}"),
        Slot::Anon(c, k) => {
            let l = labels.get(*c).cloned().unwrap_or_default();
            format!("[{l}]{k}")
        }
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.emit())
    }
}
