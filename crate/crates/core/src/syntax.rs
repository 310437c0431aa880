//! Formula syntax: the five core ADL operators, the sugar layer with its
//! desugaring into core operators, ALC concepts, and signatures.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Concept, role and name identifiers. Cheap to clone and thread-safe.
pub type Name = Arc<str>;

/// Builds a [`Name`].
pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// The distinguished identity role.
pub const ID_ROLE: &str = "id";

/// A core ADL formula. Subterms are shared through `Arc`, so formulas built by
/// the translations in this crate are DAGs with cheap clones.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// ⊤, probability one everywhere.
    Always,
    /// ⊥, probability zero everywhere.
    Never,
    /// A concept name whose probability is the likelihood of the individual.
    Atom(Name),
    /// `(c ? t : e)`: `t` where `c` holds, `e` where it does not.
    Ite(Arc<Formula>, Arc<Formula>, Arc<Formula>),
    /// `[target | given]_role`: probability of `target` at a `role`-successor
    /// conditioned on `given` holding there.
    Marginal { target: Arc<Formula>, given: Arc<Formula>, role: Name },
}

impl Formula {
    pub fn atom(n: &str) -> Formula {
        Formula::Atom(name(n))
    }

    pub fn ite(c: Formula, t: Formula, e: Formula) -> Formula {
        Formula::Ite(Arc::new(c), Arc::new(t), Arc::new(e))
    }

    pub fn marginal(target: Formula, given: Formula, role: &str) -> Formula {
        Formula::Marginal { target: Arc::new(target), given: Arc::new(given), role: name(role) }
    }

    /// `α ⊓ β`.
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::ite(a, b, Formula::Never)
    }

    /// `α ⊔ β`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::ite(a, Formula::Always, b)
    }

    /// `¬α`.
    pub fn not(a: Formula) -> Formula {
        Formula::ite(a, Formula::Never, Formula::Always)
    }

    /// `E_ρ α`.
    pub fn expect(role: &str, a: Formula) -> Formula {
        Formula::marginal(a, Formula::Always, role)
    }

    /// Maximum nesting depth of marginalisation.
    pub fn modal_depth(&self) -> usize {
        let mut memo = HashMap::new();
        depth_memo(self, &mut memo)
    }

    /// Number of distinct subformulas (structural sharing counted once).
    pub fn subformula_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !seen.insert(f) {
                continue;
            }
            match f {
                Formula::Ite(a, b, c) => {
                    stack.push(a);
                    stack.push(b);
                    stack.push(c);
                }
                Formula::Marginal { target, given, .. } => {
                    stack.push(target);
                    stack.push(given);
                }
                _ => {}
            }
        }
        seen.len()
    }

    /// Concept names occurring in the formula.
    pub fn concepts(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Role names occurring in the formula.
    pub fn roles(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Marginal { role, .. } = f {
                out.insert(role.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        let mut seen: std::collections::HashSet<*const Formula> = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(g) = stack.pop() {
            if !seen.insert(g as *const Formula) {
                continue;
            }
            f(g);
            match g {
                Formula::Ite(a, b, c) => {
                    stack.push(a);
                    stack.push(b);
                    stack.push(c);
                }
                Formula::Marginal { target, given, .. } => {
                    stack.push(target);
                    stack.push(given);
                }
                _ => {}
            }
        }
    }

    /// Whether the formula is an atom.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Lifts a core formula into the sugar layer (core variants only).
    pub fn to_sugar(&self) -> Sugar {
        match self {
            Formula::Always => Sugar::Always,
            Formula::Never => Sugar::Never,
            Formula::Atom(a) => Sugar::Atom(a.clone()),
            Formula::Ite(a, b, c) => Sugar::Ite(Box::new(a.to_sugar()), Box::new(b.to_sugar()), Box::new(c.to_sugar())),
            Formula::Marginal { target, given, role } => Sugar::Marginal {
                target: Box::new(target.to_sugar()),
                given: Box::new(given.to_sugar()),
                role: role.clone(),
            },
        }
    }
}

fn depth_memo(f: &Formula, memo: &mut HashMap<*const Formula, usize>) -> usize {
    let key = f as *const Formula;
    if let Some(&d) = memo.get(&key) {
        return d;
    }
    let d = match f {
        Formula::Always | Formula::Never | Formula::Atom(_) => 0,
        Formula::Ite(a, b, c) => depth_memo(a, memo).max(depth_memo(b, memo)).max(depth_memo(c, memo)),
        Formula::Marginal { target, given, .. } => 1 + depth_memo(target, memo).max(depth_memo(given, memo)),
    };
    memo.insert(key, d);
    d
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sugar())
    }
}

/// The sugar layer: core operators plus the usual abbreviations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sugar {
    Always,
    Never,
    Atom(Name),
    Ite(Box<Sugar>, Box<Sugar>, Box<Sugar>),
    Marginal { target: Box<Sugar>, given: Box<Sugar>, role: Name },
    And(Box<Sugar>, Box<Sugar>),
    Or(Box<Sugar>, Box<Sugar>),
    Not(Box<Sugar>),
    Implies(Box<Sugar>, Box<Sugar>),
    /// `E_ρ α`, the expected probability of α at a ρ-successor.
    Expect(Name, Box<Sugar>),
    /// `∃ρ.α`, one if some ρ-successor gives α positive probability.
    Exists(Name, Box<Sugar>),
    /// `α^{n/m}`, at least `n` of `m` independent trials of α succeed.
    AtLeast(u32, u32, Box<Sugar>),
}

impl Sugar {
    pub fn atom(n: &str) -> Sugar {
        Sugar::Atom(name(n))
    }
    pub fn and(a: Sugar, b: Sugar) -> Sugar {
        Sugar::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Sugar, b: Sugar) -> Sugar {
        Sugar::Or(Box::new(a), Box::new(b))
    }
    pub fn not(a: Sugar) -> Sugar {
        Sugar::Not(Box::new(a))
    }
    pub fn implies(a: Sugar, b: Sugar) -> Sugar {
        Sugar::Implies(Box::new(a), Box::new(b))
    }
    pub fn ite(a: Sugar, b: Sugar, c: Sugar) -> Sugar {
        Sugar::Ite(Box::new(a), Box::new(b), Box::new(c))
    }
    pub fn marginal(t: Sugar, g: Sugar, role: &str) -> Sugar {
        Sugar::Marginal { target: Box::new(t), given: Box::new(g), role: name(role) }
    }
    pub fn expect(role: &str, a: Sugar) -> Sugar {
        Sugar::Expect(name(role), Box::new(a))
    }
    pub fn exists(role: &str, a: Sugar) -> Sugar {
        Sugar::Exists(name(role), Box::new(a))
    }
    pub fn at_least(n: u32, m: u32, a: Sugar) -> Sugar {
        Sugar::AtLeast(n, m, Box::new(a))
    }

    /// Rewrites every abbreviation into the five core operators.
    pub fn desugar(&self) -> Formula {
        match self {
            Sugar::Always => Formula::Always,
            Sugar::Never => Formula::Never,
            Sugar::Atom(a) => Formula::Atom(a.clone()),
            Sugar::Ite(a, b, c) => Formula::ite(a.desugar(), b.desugar(), c.desugar()),
            Sugar::Marginal { target, given, role } => Formula::Marginal {
                target: Arc::new(target.desugar()),
                given: Arc::new(given.desugar()),
                role: role.clone(),
            },
            Sugar::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Sugar::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Sugar::Not(a) => Formula::not(a.desugar()),
            Sugar::Implies(a, b) => Formula::ite(a.desugar(), b.desugar(), Formula::Always),
            Sugar::Expect(r, a) => Formula::Marginal {
                target: Arc::new(a.desugar()),
                given: Arc::new(Formula::Always),
                role: r.clone(),
            },
            Sugar::Exists(r, a) => Formula::not(Formula::Marginal {
                target: Arc::new(Formula::Never),
                given: Arc::new(a.desugar()),
                role: r.clone(),
            }),
            Sugar::AtLeast(n, m, a) => {
                let base = Arc::new(a.desugar());
                let mut memo = HashMap::new();
                (*at_least(*n, *m, &base, &mut memo)).clone()
            }
        }
    }

    /// Whether the formula uses only the core variants.
    pub fn is_core(&self) -> bool {
        match self {
            Sugar::Always | Sugar::Never | Sugar::Atom(_) => true,
            Sugar::Ite(a, b, c) => a.is_core() && b.is_core() && c.is_core(),
            Sugar::Marginal { target, given, .. } => target.is_core() && given.is_core(),
            _ => false,
        }
    }

    /// Checks every concept and role against `sig`.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        match self {
            Sugar::Always | Sugar::Never => Ok(()),
            Sugar::Atom(a) => sig.check_concept(a),
            Sugar::Ite(a, b, c) => {
                a.check_signature(sig)?;
                b.check_signature(sig)?;
                c.check_signature(sig)
            }
            Sugar::Marginal { target, given, role } => {
                sig.check_role(role)?;
                target.check_signature(sig)?;
                given.check_signature(sig)
            }
            Sugar::And(a, b) | Sugar::Or(a, b) | Sugar::Implies(a, b) => {
                a.check_signature(sig)?;
                b.check_signature(sig)
            }
            Sugar::Not(a) | Sugar::AtLeast(_, _, a) => a.check_signature(sig),
            Sugar::Expect(r, a) | Sugar::Exists(r, a) => {
                sig.check_role(r)?;
                a.check_signature(sig)
            }
        }
    }
}

/// Unrolls `α^{n/m}` with sharing: `(α ? α^{(n-1)/(m-1)} : α^{n/(m-1)})`.
fn at_least(n: u32, m: u32, a: &Arc<Formula>, memo: &mut HashMap<(u32, u32), Arc<Formula>>) -> Arc<Formula> {
    if n == 0 {
        return Arc::new(Formula::Always);
    }
    if m < n {
        return Arc::new(Formula::Never);
    }
    if let Some(f) = memo.get(&(n, m)) {
        return f.clone();
    }
    let hit = at_least(n - 1, m - 1, a, memo);
    let miss = at_least(n, m - 1, a, memo);
    let f = Arc::new(Formula::Ite(a.clone(), hit, miss));
    memo.insert((n, m), f.clone());
    f
}

impl fmt::Display for Sugar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sugar::Always => write!(f, "top"),
            Sugar::Never => write!(f, "bot"),
            Sugar::Atom(a) => write!(f, "{a}"),
            Sugar::Ite(a, b, c) => write!(f, "({a} ? {b} : {c})"),
            Sugar::Marginal { target, given, role } => write!(f, "[{target} | {given}]_{role}"),
            Sugar::And(a, b) => write!(f, "({a} & {b})"),
            Sugar::Or(a, b) => write!(f, "({a} | {b})"),
            Sugar::Implies(a, b) => write!(f, "({a} => {b})"),
            Sugar::Not(a) => write!(f, "!{a}"),
            Sugar::Expect(r, a) => write!(f, "E_{r} {a}"),
            Sugar::Exists(r, a) => write!(f, "Ex_{r} {a}"),
            Sugar::AtLeast(n, m, a) => match **a {
                Sugar::Not(_) | Sugar::Expect(..) | Sugar::Exists(..) => write!(f, "({a})^{{{n}/{m}}}"),
                _ => write!(f, "{a}^{{{n}/{m}}}"),
            },
        }
    }
}

/// A concept of the classical description logic ALC. `Bottom` and `Or` are
/// derived forms needed by positive normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Atom(Name),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(Name, Box<Concept>),
}

impl Concept {
    pub fn atom(n: &str) -> Concept {
        Concept::Atom(name(n))
    }
    pub fn not(c: Concept) -> Concept {
        Concept::Not(Box::new(c))
    }
    pub fn and(a: Concept, b: Concept) -> Concept {
        Concept::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Concept, b: Concept) -> Concept {
        Concept::Or(Box::new(a), Box::new(b))
    }
    pub fn exists(r: &str, c: Concept) -> Concept {
        Concept::Exists(name(r), Box::new(c))
    }

    /// Nesting depth of `∃`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atom(_) => 0,
            Concept::Not(c) => c.modal_depth(),
            Concept::And(a, b) | Concept::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            Concept::Exists(_, c) => 1 + c.modal_depth(),
        }
    }

    /// Concept names occurring in the concept.
    pub fn atoms(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect(&mut out, &mut BTreeSet::new());
        out
    }

    /// Role names occurring in the concept.
    pub fn roles(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect(&self, atoms: &mut BTreeSet<Name>, roles: &mut BTreeSet<Name>) {
        match self {
            Concept::Top | Concept::Bottom => {}
            Concept::Atom(a) => {
                atoms.insert(a.clone());
            }
            Concept::Not(c) => c.collect(atoms, roles),
            Concept::And(a, b) | Concept::Or(a, b) => {
                a.collect(atoms, roles);
                b.collect(atoms, roles);
            }
            Concept::Exists(r, c) => {
                roles.insert(r.clone());
                c.collect(atoms, roles);
            }
        }
    }

    /// Whether negation is applied to atoms only.
    pub fn is_pnf(&self) -> bool {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atom(_) => true,
            Concept::Not(c) => matches!(**c, Concept::Atom(_)),
            Concept::And(a, b) | Concept::Or(a, b) => a.is_pnf() && b.is_pnf(),
            Concept::Exists(_, c) => c.is_pnf(),
        }
    }

    /// The corresponding ADL sugar term, via Table-1 abbreviations.
    pub fn to_sugar(&self) -> Sugar {
        match self {
            Concept::Top => Sugar::Always,
            Concept::Bottom => Sugar::Never,
            Concept::Atom(a) => Sugar::Atom(a.clone()),
            Concept::Not(c) => Sugar::not(c.to_sugar()),
            Concept::And(a, b) => Sugar::and(a.to_sugar(), b.to_sugar()),
            Concept::Or(a, b) => Sugar::or(a.to_sugar(), b.to_sugar()),
            Concept::Exists(r, c) => Sugar::Exists(r.clone(), Box::new(c.to_sugar())),
        }
    }

    /// Reads an ALC concept off a sugar term. Accepts `top`, `bot`, atoms,
    /// `!`, `&`, `|`, `=>` and `Ex_ρ`; anything else is rejected.
    pub fn from_sugar(s: &Sugar) -> Result<Concept> {
        Ok(match s {
            Sugar::Always => Concept::Top,
            Sugar::Never => Concept::Bottom,
            Sugar::Atom(a) => Concept::Atom(a.clone()),
            Sugar::Not(a) => Concept::not(Concept::from_sugar(a)?),
            Sugar::And(a, b) => Concept::and(Concept::from_sugar(a)?, Concept::from_sugar(b)?),
            Sugar::Or(a, b) => Concept::or(Concept::from_sugar(a)?, Concept::from_sugar(b)?),
            Sugar::Implies(a, b) => Concept::or(Concept::not(Concept::from_sugar(a)?), Concept::from_sugar(b)?),
            Sugar::Exists(r, a) => Concept::Exists(r.clone(), Box::new(Concept::from_sugar(a)?)),
            other => {
                return Err(Error::Syntax { pos: 0, msg: format!("`{other}` is not an ALC concept") });
            }
        })
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sugar())
    }
}

/// Declared vocabulary: concept names, role names (always containing `id`)
/// and names of individuals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<Name>,
    pub roles: BTreeSet<Name>,
    pub names: BTreeSet<Name>,
}

impl Signature {
    /// A signature with no concepts and only the `id` role.
    pub fn new() -> Signature {
        let mut roles = BTreeSet::new();
        roles.insert(name(ID_ROLE));
        Signature { concepts: BTreeSet::new(), roles, names: BTreeSet::new() }
    }

    pub fn with(concepts: &[&str], roles: &[&str]) -> Signature {
        let mut s = Signature::new();
        s.concepts.extend(concepts.iter().map(|c| name(c)));
        s.roles.extend(roles.iter().map(|r| name(r)));
        s
    }

    /// Concepts are declared concept names; names of individuals also count
    /// as (absolute) concepts.
    pub fn check_concept(&self, c: &str) -> Result<()> {
        if self.concepts.contains(c) || self.names.contains(c) {
            Ok(())
        } else {
            Err(Error::UnknownConcept(c.to_string()))
        }
    }

    pub fn check_role(&self, r: &str) -> Result<()> {
        if self.roles.contains(r) {
            Ok(())
        } else {
            Err(Error::UnknownRole(r.to_string()))
        }
    }

    /// Union of two signatures.
    pub fn merge(&mut self, other: &Signature) {
        self.concepts.extend(other.concepts.iter().cloned());
        self.roles.extend(other.roles.iter().cloned());
        self.names.extend(other.names.iter().cloned());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desugar_table_rows() {
        let a = Sugar::atom("A");
        assert_eq!(Sugar::not(a.clone()).desugar(), Formula::ite(Formula::atom("A"), Formula::Never, Formula::Always));
        assert_eq!(Sugar::at_least(0, 3, a.clone()).desugar(), Formula::Always);
        assert_eq!(Sugar::at_least(3, 2, a.clone()).desugar(), Formula::Never);
        let expect = Formula::ite(
            Formula::atom("A"),
            Formula::ite(Formula::atom("A"), Formula::Always, Formula::Never),
            Formula::Never,
        );
        assert_eq!(Sugar::at_least(2, 2, a).desugar(), expect);
    }

    #[test]
    fn depth_and_size() {
        assert_eq!(Formula::atom("A").modal_depth(), 0);
        let e = Formula::marginal(Formula::atom("A"), Formula::Always, "r");
        assert_eq!(e.modal_depth(), 1);
        assert_eq!(Formula::marginal(e.clone(), Formula::atom("B"), "s").modal_depth(), 2);
        assert_eq!(Formula::and(Formula::atom("A"), Formula::atom("A")).subformula_count(), 3);
    }

    #[test]
    fn concept_pnf_flag() {
        assert!(Concept::not(Concept::atom("A")).is_pnf());
        assert!(!Concept::not(Concept::not(Concept::atom("A"))).is_pnf());
    }
}
