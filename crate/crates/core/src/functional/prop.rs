//! Reduction of ALC over functional interpretations to propositional logic.
//!
//! Over a functional interpretation every role path `w` from the point names
//! exactly one individual, so `∃ρ.C` at `w` is just `C` at `wρ`. Atoms of the
//! propositional language are pairs `X_w` of a concept name and a role path.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::functional::alc::AlcInterpretation;
use crate::syntax::{Concept, Name};

/// A role path from the point; the empty path is the point itself.
pub type Word = Vec<Name>;

/// A propositional formula over the atoms `X_w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Prop {
    True,
    False,
    Var(Word, Name),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
}

impl Prop {
    /// Truth under the valuation given as the set of true atoms.
    pub fn eval(&self, val: &BTreeSet<(Word, Name)>) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Var(w, a) => val.contains(&(w.clone(), a.clone())),
            Prop::Not(p) => !p.eval(val),
            Prop::And(a, b) => a.eval(val) && b.eval(val),
            Prop::Or(a, b) => a.eval(val) || b.eval(val),
        }
    }

    /// Atoms occurring in the formula.
    pub fn vars(&self) -> BTreeSet<(Word, Name)> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<(Word, Name)>) {
        match self {
            Prop::True | Prop::False => {}
            Prop::Var(w, a) => {
                out.insert((w.clone(), a.clone()));
            }
            Prop::Not(p) => p.collect(out),
            Prop::And(a, b) | Prop::Or(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Number of nodes; the translation is linear in the concept size.
    pub fn size(&self) -> usize {
        match self {
            Prop::True | Prop::False | Prop::Var(..) => 1,
            Prop::Not(p) => 1 + p.size(),
            Prop::And(a, b) | Prop::Or(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// Renders a role path as `ε` or `r.s`.
pub fn word_text(w: &[Name]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::True => write!(f, "true"),
            Prop::False => write!(f, "false"),
            Prop::Var(w, a) => write!(f, "{a}_{}", word_text(w)),
            Prop::Not(p) => write!(f, "!{p}"),
            Prop::And(a, b) => write!(f, "({a} & {b})"),
            Prop::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// The propositional translation `π(C)`.
pub fn prop_translate(c: &Concept) -> Prop {
    translate_at(c, &mut Vec::new())
}

fn translate_at(c: &Concept, w: &mut Word) -> Prop {
    match c {
        Concept::Top => Prop::True,
        Concept::Bottom => Prop::False,
        Concept::Atom(a) => Prop::Var(w.clone(), a.clone()),
        Concept::Not(d) => Prop::Not(Box::new(translate_at(d, w))),
        Concept::And(a, b) => Prop::And(Box::new(translate_at(a, w)), Box::new(translate_at(b, w))),
        Concept::Or(a, b) => Prop::Or(Box::new(translate_at(a, w)), Box::new(translate_at(b, w))),
        Concept::Exists(r, d) => {
            w.push(r.clone());
            let p = translate_at(d, w);
            w.pop();
            p
        }
    }
}

/// The valuation `τ(I_i)`: every `X_w` with `|w| ≤ depth` over the given
/// roles and concept names such that the individual reached by `w` is in `X`.
/// Fails if some path leaves the interpretation or branches.
pub fn tau(itp: &AlcInterpretation, i: usize, depth: usize, atoms: &BTreeSet<Name>, roles: &BTreeSet<Name>) -> Result<BTreeSet<(Word, Name)>> {
    let mut out = BTreeSet::new();
    let mut frontier: Vec<(Word, usize)> = vec![(Vec::new(), i)];
    for level in 0..=depth {
        let mut next = Vec::new();
        for (w, x) in frontier {
            for a in atoms {
                if itp.holds(a, x) {
                    out.insert((w.clone(), a.clone()));
                }
            }
            if level == depth {
                continue;
            }
            for r in roles {
                let succ = itp.successors(r, x);
                if succ.len() != 1 {
                    return Err(Error::Precondition(format!(
                        "interpretation is not functional: `{}` has {} `{r}`-successors",
                        itp.individuals()[x],
                        succ.len()
                    )));
                }
                let mut wr = w.clone();
                wr.push(r.clone());
                next.push((wr, succ[0]));
            }
        }
        frontier = next;
    }
    Ok(out)
}
