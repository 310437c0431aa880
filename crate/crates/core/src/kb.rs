//! Aleatoric knowledge bases: T-Books of `⪯`/`≈` axioms and A-Books of
//! probability-tagged assertions about named individuals.
//!
//! # File format
//!
//! ```text
//! concepts: V F exp
//! roles: c                      # `id` is always declared
//! names: Hector Julia
//! abook: Hector : 0.1 : V       # concept assertion  a ⊨_p α
//! abook: (Hector,Julia) : 0.3 : c   # role assertion  (a,b) ⊨_p ρ
//! tbook: E_id (!V & [V|F]_c) <= exp
//! tbook: C == (D ? E : F)
//! ```
//!
//! Declarations must precede their use. Lines may start with an optional
//! label such as `A1` or `T1` before the keyword.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::eval::{Evaluator, Interner};
use crate::model::BeliefModel;
use crate::parser::parse_formula;
use crate::rational::{parse_prob, Q};
use crate::syntax::{name, Formula, Name, Signature, ID_ROLE};

/// `⪯` or `≈`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    /// `α ⪯ β`: α is no more likely than β, at every individual.
    NoMoreLikely,
    /// `α ≈ β`: α is exactly as likely as β, at every individual.
    ExactlyAsLikely,
}

/// A terminological axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TAxiom {
    pub kind: AxiomKind,
    pub lhs: Formula,
    pub rhs: Formula,
}

/// An assertional axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AAxiom {
    /// `a ⊨_p α`.
    Concept { a: Name, p: Q, formula: Formula },
    /// `(a,b) ⊨_p ρ`.
    Role { a: Name, b: Name, p: Q, role: Name },
}

/// The three shapes of a simple terminological axiom (all operands atoms,
/// i.e. concept names, `⊤` or `⊥`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleAxiom {
    /// `C ≈ (D ? E : F)`.
    Ite { c: Formula, d: Formula, e: Formula, f: Formula },
    /// `C ≈ [D | E]_ρ`.
    Marginal { c: Formula, d: Formula, e: Formula, role: Name },
    /// `C ≈ D`.
    Eq { c: Formula, d: Formula },
}

impl SimpleAxiom {
    /// Concept names among the operands.
    pub fn concepts(&self) -> Vec<Name> {
        let ops: Vec<&Formula> = match self {
            SimpleAxiom::Ite { c, d, e, f } => vec![c, d, e, f],
            SimpleAxiom::Marginal { c, d, e, .. } => vec![c, d, e],
            SimpleAxiom::Eq { c, d } => vec![c, d],
        };
        ops.into_iter()
            .filter_map(|f| if let Formula::Atom(a) = f { Some(a.clone()) } else { None })
            .collect()
    }

    pub fn to_axiom(&self) -> TAxiom {
        let (lhs, rhs) = match self {
            SimpleAxiom::Ite { c, d, e, f } => (c.clone(), Formula::ite(d.clone(), e.clone(), f.clone())),
            SimpleAxiom::Marginal { c, d, e, role } => (
                c.clone(),
                Formula::Marginal { target: Arc::new(d.clone()), given: Arc::new(e.clone()), role: role.clone() },
            ),
            SimpleAxiom::Eq { c, d } => (c.clone(), d.clone()),
        };
        TAxiom { kind: AxiomKind::ExactlyAsLikely, lhs, rhs }
    }
}

fn is_atom(f: &Formula) -> bool {
    matches!(f, Formula::Atom(_) | Formula::Always | Formula::Never)
}

impl TAxiom {
    pub fn new(kind: AxiomKind, lhs: Formula, rhs: Formula) -> TAxiom {
        TAxiom { kind, lhs, rhs }
    }

    /// The simple shape of this axiom, if it has one. `≈` is symmetric, so
    /// either side may hold the compound term.
    pub fn as_simple(&self) -> Option<SimpleAxiom> {
        if self.kind != AxiomKind::ExactlyAsLikely {
            return None;
        }
        let shape = |c: &Formula, rhs: &Formula| -> Option<SimpleAxiom> {
            if !is_atom(c) {
                return None;
            }
            match rhs {
                Formula::Ite(d, e, f) if is_atom(d) && is_atom(e) && is_atom(f) => Some(SimpleAxiom::Ite {
                    c: c.clone(),
                    d: (**d).clone(),
                    e: (**e).clone(),
                    f: (**f).clone(),
                }),
                Formula::Marginal { target, given, role } if is_atom(target) && is_atom(given) => {
                    Some(SimpleAxiom::Marginal { c: c.clone(), d: (**target).clone(), e: (**given).clone(), role: role.clone() })
                }
                d if is_atom(d) => Some(SimpleAxiom::Eq { c: c.clone(), d: d.clone() }),
                _ => None,
            }
        };
        shape(&self.lhs, &self.rhs).or_else(|| shape(&self.rhs, &self.lhs))
    }
}

impl fmt::Display for TAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            AxiomKind::NoMoreLikely => "<=",
            AxiomKind::ExactlyAsLikely => "==",
        };
        write!(f, "{} {} {}", self.lhs, op, self.rhs)
    }
}

impl fmt::Display for AAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AAxiom::Concept { a, p, formula } => write!(f, "{a} : {p} : {formula}"),
            AAxiom::Role { a, b, p, role } => write!(f, "({a},{b}) : {p} : {role}"),
        }
    }
}

/// A knowledge base with its declared signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub tbook: Vec<TAxiom>,
    pub abook: Vec<AAxiom>,
    pub signature: Signature,
}

impl KnowledgeBase {
    pub fn new(signature: Signature) -> KnowledgeBase {
        KnowledgeBase { tbook: Vec::new(), abook: Vec::new(), signature }
    }

    /// Parses the knowledge-base file format and checks well-formedness.
    pub fn parse(text: &str) -> Result<KnowledgeBase> {
        let mut kb = KnowledgeBase::new(Signature::new());
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Syntax { pos: ln + 1, msg };
            let line = strip_label(line);
            let (head, body) = line.split_once(':').ok_or_else(|| err("expected `keyword: ...`".into()))?;
            match head.trim() {
                "concepts" => kb.signature.concepts.extend(body.split_whitespace().map(name)),
                "roles" => kb.signature.roles.extend(body.split_whitespace().map(name)),
                "names" => kb.signature.names.extend(body.split_whitespace().map(name)),
                "tbook" => {
                    let ax = parse_taxiom(body, &kb.signature).map_err(|e| relocate(e, ln + 1))?;
                    kb.tbook.push(ax);
                }
                "abook" => {
                    let ax = parse_aaxiom(body, &kb.signature).map_err(|e| relocate(e, ln + 1))?;
                    kb.abook.push(ax);
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        kb.check_well_formed()?;
        Ok(kb)
    }

    /// Role assertions out of each name sum to at most one per role.
    pub fn check_well_formed(&self) -> Result<()> {
        let mut sums: BTreeMap<(Name, Name), Q> = BTreeMap::new();
        for ax in &self.abook {
            if let AAxiom::Role { a, p, role, .. } = ax {
                *sums.entry((a.clone(), role.clone())).or_insert_with(Q::zero) += p;
            }
        }
        for ((a, r), s) in sums {
            if s > Q::one() {
                return Err(Error::IllFormed(format!("role assertions ({a},·):{r} sum to {s} > 1")));
            }
        }
        Ok(())
    }

    /// Every T-axiom has a simple shape and every concept assertion is atomic.
    pub fn is_simple(&self) -> bool {
        self.tbook.iter().all(|t| t.as_simple().is_some())
            && self.abook.iter().all(|a| match a {
                AAxiom::Concept { formula, .. } => matches!(formula, Formula::Atom(_)),
                AAxiom::Role { .. } => true,
            })
    }

    /// The simple shapes of the T-Book, or an error naming a non-simple axiom.
    pub fn simple_tbook(&self) -> Result<Vec<SimpleAxiom>> {
        self.tbook.iter().map(|t| t.as_simple().ok_or_else(|| Error::NotSimple(t.to_string()))).collect()
    }

    /// Whether the (simple) T-Book is acyclic.
    pub fn is_acyclic(&self) -> Result<bool> {
        Ok(check_acyclic(&self.simple_tbook()?))
    }

    /// Serialises in the file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join = |set: &BTreeSet<Name>| set.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
        s.push_str(&format!("concepts: {}\n", join(&self.signature.concepts)));
        let roles: BTreeSet<Name> = self.signature.roles.iter().filter(|r| &***r != ID_ROLE).cloned().collect();
        s.push_str(&format!("roles: {}\n", join(&roles)));
        s.push_str(&format!("names: {}\n", join(&self.signature.names)));
        for a in &self.abook {
            s.push_str(&format!("abook: {a}\n"));
        }
        for t in &self.tbook {
            s.push_str(&format!("tbook: {t}\n"));
        }
        s
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Syntax { pos, msg } => Error::Syntax { pos: line, msg: format!("column {pos}: {msg}") },
        other => other,
    }
}

/// Drops a leading label like `A1` or `T1` that precedes the keyword.
fn strip_label(line: &str) -> &str {
    let mut parts = line.splitn(2, char::is_whitespace);
    let first = parts.next().unwrap_or("");
    let rest = parts.next().unwrap_or("").trim_start();
    let keyword = |s: &str| ["concepts", "roles", "names", "tbook", "abook"].iter().any(|k| s.starts_with(k));
    if !first.contains(':') && !keyword(first) && keyword(rest) {
        rest
    } else {
        line
    }
}

fn parse_taxiom(body: &str, sig: &Signature) -> Result<TAxiom> {
    let (k, kind, len) = if let Some(k) = body.find("<=") {
        (k, AxiomKind::NoMoreLikely, 2)
    } else if let Some(k) = body.find("==") {
        (k, AxiomKind::ExactlyAsLikely, 2)
    } else {
        return Err(Error::Syntax { pos: 0, msg: "expected `<=` or `==` in T-axiom".into() });
    };
    let lhs = parse_formula(&body[..k], Some(sig))?.desugar();
    let rhs = parse_formula(&body[k + len..], Some(sig))?.desugar();
    Ok(TAxiom { kind, lhs, rhs })
}

fn parse_aaxiom(body: &str, sig: &Signature) -> Result<AAxiom> {
    let mut parts = body.splitn(3, ':');
    let subject = parts.next().unwrap_or("").trim();
    let p = parts.next().ok_or_else(|| Error::Syntax { pos: 0, msg: "expected `a : p : α`".into() })?;
    let rest = parts.next().ok_or_else(|| Error::Syntax { pos: 0, msg: "expected `a : p : α`".into() })?;
    let p = parse_prob(p)?;
    let check_name = |n: &str| -> Result<Name> {
        if sig.names.contains(n) {
            Ok(name(n))
        } else {
            Err(Error::UnknownName(n.to_string()))
        }
    };
    if let Some(inner) = subject.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::Syntax { pos: 0, msg: "expected `(a,b)`".into() })?;
        let role = rest.trim();
        sig.check_role(role)?;
        Ok(AAxiom::Role { a: check_name(a.trim())?, b: check_name(b.trim())?, p, role: name(role) })
    } else {
        let formula = parse_formula(rest, Some(sig))?.desugar();
        Ok(AAxiom::Concept { a: check_name(subject)?, p, formula })
    }
}

/// Whether a simple T-Book is acyclic.
///
/// Each axiom is read as a definition of its left-hand concept: `C ≈ (D?E:F)`
/// yields edges `C→D, C→E, C→F`, `C ≈ D` yields `C↔D`, and `C ≈ [D|E]_ρ`
/// yields marginal edges `C→D, C→E`. The T-Book is cyclic iff some cycle
/// uses a marginal edge, i.e. the target of a marginal edge reaches its source.
pub fn check_acyclic(tbook: &[SimpleAxiom]) -> bool {
    let g = DefGraph::new(tbook);
    g.marginal_edges.iter().all(|&(u, v)| !g.reaches(v, u))
}

/// Directed definition graph over the concept names of a simple T-Book.
pub(crate) struct DefGraph {
    pub adj: Vec<BTreeSet<usize>>,
    pub marginal_edges: Vec<(usize, usize)>,
}

impl DefGraph {
    pub fn new(tbook: &[SimpleAxiom]) -> DefGraph {
        let mut index = BTreeMap::new();
        for ax in tbook {
            for c in ax.concepts() {
                let n = index.len();
                index.entry(c).or_insert(n);
            }
        }
        let mut adj = vec![BTreeSet::new(); index.len()];
        let mut marginal_edges = Vec::new();
        let id = |f: &Formula| if let Formula::Atom(a) = f { Some(index[a]) } else { None };
        for ax in tbook {
            match ax {
                SimpleAxiom::Ite { c, d, e, f } => {
                    if let Some(u) = id(c) {
                        for v in [d, e, f].into_iter().filter_map(id) {
                            adj[u].insert(v);
                        }
                    }
                }
                SimpleAxiom::Eq { c, d } => {
                    if let (Some(u), Some(v)) = (id(c), id(d)) {
                        adj[u].insert(v);
                        adj[v].insert(u);
                    }
                }
                SimpleAxiom::Marginal { c, d, e, .. } => {
                    if let Some(u) = id(c) {
                        for v in [d, e].into_iter().filter_map(id) {
                            adj[u].insert(v);
                            marginal_edges.push((u, v));
                        }
                    }
                }
            }
        }
        DefGraph { adj, marginal_edges }
    }

    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.adj[u].iter().copied());
        }
        false
    }
}

/// Result of [`simplify`]: the simple KB and the meaning of each fresh concept.
#[derive(Clone, Debug)]
pub struct Simplified {
    pub kb: KnowledgeBase,
    /// Fresh concept `C_α` and the formula α it stands for.
    pub definitions: Vec<(Name, Formula)>,
    /// Fresh concept `E_τ` for each `τ = α ⪯ β`, with α and β.
    pub slacks: Vec<(Name, Formula, Formula)>,
}

struct Fresh<'a> {
    used: &'a mut BTreeSet<Name>,
    counter: BTreeMap<&'static str, usize>,
}

impl Fresh<'_> {
    fn make(&mut self, prefix: &'static str) -> Name {
        loop {
            let k = self.counter.entry(prefix).or_insert(0);
            *k += 1;
            let candidate = name(&format!("{prefix}{k}"));
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Rewrites a KB into an equivalent simple KB: one fresh concept per distinct
/// non-atomic subformula, one fresh slack concept per `⪯` axiom. Axioms that
/// are already simple and atomic assertions are kept as they are.
pub fn simplify(kb: &KnowledgeBase) -> Simplified {
    let mut used: BTreeSet<Name> = kb.signature.concepts.iter().chain(kb.signature.names.iter()).cloned().collect();
    let mut fresh = Fresh { used: &mut used, counter: BTreeMap::new() };
    let mut interner = Interner::new();
    let mut names_of: HashMap<usize, Formula> = HashMap::new();
    let mut definitions = Vec::new();
    let mut tbook: Vec<TAxiom> = Vec::new();
    let mut defined: Vec<TAxiom> = Vec::new();
    let mut slacks = Vec::new();

    // Returns the atom standing for `f`, defining fresh concepts bottom-up.
    fn atom_for(
        f: &Formula,
        interner: &mut Interner,
        names_of: &mut HashMap<usize, Formula>,
        fresh: &mut Fresh,
        definitions: &mut Vec<(Name, Formula)>,
        defined: &mut Vec<TAxiom>,
    ) -> Formula {
        if is_atom(f) {
            return f.clone();
        }
        let id = interner.intern(f);
        if let Some(a) = names_of.get(&id) {
            return a.clone();
        }
        let star = match f {
            Formula::Ite(a, b, c) => Formula::ite(
                atom_for(a, interner, names_of, fresh, definitions, defined),
                atom_for(b, interner, names_of, fresh, definitions, defined),
                atom_for(c, interner, names_of, fresh, definitions, defined),
            ),
            Formula::Marginal { target, given, role } => Formula::Marginal {
                target: Arc::new(atom_for(target, interner, names_of, fresh, definitions, defined)),
                given: Arc::new(atom_for(given, interner, names_of, fresh, definitions, defined)),
                role: role.clone(),
            },
            _ => unreachable!("atoms handled above"),
        };
        let c = fresh.make("sub");
        let atom = Formula::Atom(c.clone());
        definitions.push((c, f.clone()));
        defined.push(TAxiom::new(AxiomKind::ExactlyAsLikely, atom.clone(), star));
        names_of.insert(id, atom.clone());
        atom
    }

    for ax in &kb.tbook {
        if ax.as_simple().is_some() {
            tbook.push(ax.clone());
            continue;
        }
        let ca = atom_for(&ax.lhs, &mut interner, &mut names_of, &mut fresh, &mut definitions, &mut defined);
        let cb = atom_for(&ax.rhs, &mut interner, &mut names_of, &mut fresh, &mut definitions, &mut defined);
        match ax.kind {
            AxiomKind::ExactlyAsLikely => tbook.push(TAxiom::new(AxiomKind::ExactlyAsLikely, ca, cb)),
            AxiomKind::NoMoreLikely => {
                let e = fresh.make("slack");
                slacks.push((e.clone(), ax.lhs.clone(), ax.rhs.clone()));
                tbook.push(TAxiom::new(
                    AxiomKind::ExactlyAsLikely,
                    ca,
                    Formula::ite(cb, Formula::Atom(e), Formula::Never),
                ));
            }
        }
    }
    let mut abook = Vec::new();
    for ax in &kb.abook {
        match ax {
            AAxiom::Concept { a, p, formula } if !matches!(formula, Formula::Atom(_)) => {
                let c = match formula {
                    Formula::Always | Formula::Never => {
                        let c = fresh.make("sub");
                        definitions.push((c.clone(), formula.clone()));
                        defined.push(TAxiom::new(AxiomKind::ExactlyAsLikely, Formula::Atom(c.clone()), formula.clone()));
                        Formula::Atom(c)
                    }
                    _ => atom_for(formula, &mut interner, &mut names_of, &mut fresh, &mut definitions, &mut defined),
                };
                abook.push(AAxiom::Concept { a: a.clone(), p: p.clone(), formula: c });
            }
            other => abook.push(other.clone()),
        }
    }
    let mut signature = kb.signature.clone();
    signature.concepts.extend(definitions.iter().map(|(c, _)| c.clone()));
    signature.concepts.extend(slacks.iter().map(|(e, _, _)| e.clone()));
    defined.extend(tbook);
    Simplified { kb: KnowledgeBase { tbook: defined, abook, signature }, definitions, slacks }
}

impl Simplified {
    /// Extends a model of the original KB to a model of the simplified one:
    /// `ℓ'(C_α) = B(α)` and `ℓ'(E_τ) = B(α)/B(β)` (zero when `B(β) = 0`).
    pub fn extend_model(&self, m: &BeliefModel) -> BeliefModel {
        let mut out = m.clone();
        let mut ev = Evaluator::new(m);
        for (c, f) in &self.definitions {
            for i in 0..m.len() {
                let v = ev.eval(f, i);
                out.set_likelihood(c, i, v);
            }
        }
        for (e, a, b) in &self.slacks {
            for i in 0..m.len() {
                let pb = ev.eval(b, i);
                let v = if pb.is_zero() { Q::zero() } else { ev.eval(a, i) / pb };
                out.set_likelihood(e, i, v);
            }
        }
        out
    }
}

/// One failed clause of the satisfaction definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KbViolation {
    /// A name is not absolute across id-related individuals.
    Name { name: String, individual: String },
    /// A T-axiom fails at an individual; values of both sides attached.
    TBook { axiom: String, individual: String, lhs: Q, rhs: Q },
    /// A concept assertion fails at an individual carrying the name.
    Concept { axiom: String, individual: String, value: Q },
    /// A role assertion fails at an individual carrying the name.
    Role { axiom: String, individual: String, value: Q },
}

impl fmt::Display for KbViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |v: &Q| crate::rational::to_decimal(v, 6);
        match self {
            KbViolation::Name { name, individual } => write!(f, "name {name} not absolute at {individual}"),
            KbViolation::TBook { axiom, individual, lhs, rhs } => {
                write!(f, "T-axiom `{axiom}` fails at {individual}: {} vs {}", d(lhs), d(rhs))
            }
            KbViolation::Concept { axiom, individual, value } => {
                write!(f, "assertion `{axiom}` fails at {individual}: value {}", d(value))
            }
            KbViolation::Role { axiom, individual, value } => {
                write!(f, "assertion `{axiom}` fails at {individual}: mass {}", d(value))
            }
        }
    }
}

/// Checks every clause of the satisfaction definition exactly.
pub fn kb_satisfied_by(m: &BeliefModel, kb: &KnowledgeBase) -> Result<Vec<KbViolation>> {
    kb_satisfied_within(m, kb, &Q::zero())
}

/// As [`kb_satisfied_by`], accepting numeric slack `tol` in every comparison.
pub fn kb_satisfied_within(m: &BeliefModel, kb: &KnowledgeBase, tol: &Q) -> Result<Vec<KbViolation>> {
    let msig = m.signature();
    for c in &kb.signature.concepts {
        if !msig.concepts.contains(c) && !msig.names.contains(c) {
            return Err(Error::UnknownConcept(c.to_string()));
        }
    }
    for r in &kb.signature.roles {
        msig.check_role(r)?;
    }
    for n in &kb.signature.names {
        if !msig.names.contains(n) {
            return Err(Error::UnknownName(n.to_string()));
        }
    }
    let mut out = Vec::new();
    let n = m.len();
    let members = |a: &str| -> BTreeSet<usize> { m.names().get(a).cloned().unwrap_or_default() };
    for a in &kb.signature.names {
        let set = members(a);
        for &i in &set {
            for (j, w) in m.successors(ID_ROLE, i) {
                if !w.is_zero() && !set.contains(&j) {
                    out.push(KbViolation::Name { name: a.to_string(), individual: m.individual_name(j).to_string() });
                }
            }
        }
    }
    let mut ev = Evaluator::new(m);
    for ax in &kb.tbook {
        for i in 0..n {
            let l = ev.eval(&ax.lhs, i);
            let r = ev.eval(&ax.rhs, i);
            let ok = match ax.kind {
                AxiomKind::NoMoreLikely => l <= &r + tol,
                AxiomKind::ExactlyAsLikely => (&l - &r).abs() <= *tol,
            };
            if !ok {
                out.push(KbViolation::TBook { axiom: ax.to_string(), individual: m.individual_name(i).to_string(), lhs: l, rhs: r });
            }
        }
    }
    for ax in &kb.abook {
        match ax {
            AAxiom::Concept { a, p, formula } => {
                for i in members(a) {
                    let v = ev.expectation(ID_ROLE, formula, i);
                    if (&v - p).abs() > *tol {
                        out.push(KbViolation::Concept { axiom: ax.to_string(), individual: m.individual_name(i).to_string(), value: v });
                    }
                }
            }
            AAxiom::Role { a, b, p, role } => {
                let bs = members(b);
                for i in members(a) {
                    let v: Q = m.successors(role, i).into_iter().filter(|(j, _)| bs.contains(j)).map(|(_, w)| w).sum();
                    if (&v - p).abs() > *tol {
                        out.push(KbViolation::Role { axiom: ax.to_string(), individual: m.individual_name(i).to_string(), value: v });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    const VIRUS: &str = "concepts: V F exp\nroles: c\nnames: Hector Julia\n\
        A1 abook: Hector : 0.1 : V\nA2 abook: Julia : 0.7 : V\nA3 abook: Julia : 0.69 : F\n\
        A4 abook: (Hector,Julia) : 0.3 : c\nT1 tbook: E_id (!V & [V|F]_c) <= exp\n";

    #[test]
    fn parses_virus_kb() {
        let kb = KnowledgeBase::parse(VIRUS).unwrap();
        assert_eq!(kb.abook.len(), 4);
        assert_eq!(kb.tbook.len(), 1);
        assert!(!kb.is_simple());
    }

    #[test]
    fn ill_formed_role_sum() {
        let text = "roles: c\nnames: a b d\nabook: (a,b):0.6:c\nabook: (a,d):0.6:c\n";
        assert!(matches!(KnowledgeBase::parse(text), Err(Error::IllFormed(_))));
    }

    #[test]
    fn empty_and_undeclared() {
        let kb = KnowledgeBase::parse("").unwrap();
        assert!(kb.tbook.is_empty() && kb.abook.is_empty());
        assert!(KnowledgeBase::parse("names: a\nabook: a : 0.5 : A").is_err());
        assert!(KnowledgeBase::parse("concepts: A\nabook: a : 0.5 : A").is_err());
    }

    #[test]
    fn acyclicity_examples() {
        let c = || Formula::atom("C");
        let self_marg = SimpleAxiom::Marginal { c: c(), d: c(), e: Formula::Always, role: name("r") };
        assert!(!check_acyclic(&[self_marg]));
        let fair = SimpleAxiom::Ite { c: c(), d: c(), e: Formula::Never, f: Formula::Always };
        assert!(check_acyclic(&[fair]));
        assert!(check_acyclic(&[]));
    }

    #[test]
    fn simplify_virus_tbook() {
        let kb = KnowledgeBase::parse(VIRUS).unwrap();
        let s = simplify(&kb);
        assert!(s.kb.is_simple());
        assert_eq!(s.definitions.len(), 4);
        assert_eq!(s.slacks.len(), 1);
        assert_eq!(s.kb.tbook.len(), 5);
        assert!(s.kb.is_acyclic().unwrap());
    }

    #[test]
    fn simplify_atomic_no_more_likely() {
        let kb = KnowledgeBase::parse("concepts: a b\ntbook: a <= b").unwrap();
        let s = simplify(&kb);
        assert_eq!(s.kb.tbook.len(), 1);
        let expect = TAxiom::new(
            AxiomKind::ExactlyAsLikely,
            Formula::atom("a"),
            Formula::ite(Formula::atom("b"), Formula::atom("slack1"), Formula::Never),
        );
        assert_eq!(s.kb.tbook[0], expect);
    }

    #[test]
    fn simple_kb_unchanged() {
        let kb = KnowledgeBase::parse("concepts: C D E\nroles: r\nnames: a\ntbook: C == [D|E]_r\nabook: a : 1/2 : C").unwrap();
        let s = simplify(&kb);
        assert_eq!(s.kb.tbook, kb.tbook);
        assert_eq!(s.kb.abook, kb.abook);
    }

    #[test]
    fn concept_assertion_violation() {
        let kb = KnowledgeBase::parse("concepts: A\nnames: a\nabook: a : 0.5 : A").unwrap();
        let m = BeliefModel::parse("individuals: u\nconcept A: u=0.4\nnames: a={u}").unwrap();
        let v = kb_satisfied_by(&m, &kb).unwrap();
        assert_eq!(v.len(), 1);
        assert!(matches!(&v[0], KbViolation::Concept { value, .. } if *value == q(2, 5)));
    }
}
