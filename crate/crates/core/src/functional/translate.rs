//! Translation of ALC concepts into ADL formulas with the same probability.
//!
//! The automaton of the concept is solved in three-valued logic while atoms
//! are revealed one at a time, giving a binary decision tree over facts
//! "atom `A` holds at role path `w`". Each decision becomes
//! `(P(fact | history) ? yes : no)`. The conditional probability of a fact
//! below a role `ρ` is a marginalisation whose condition is the history
//! already revealed below `ρ`, so the successor distribution is updated by
//! everything seen at that successor so far.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::alc::to_pnf;
use crate::functional::automaton::{compile_automaton, AlternatingAutomaton};
use crate::functional::trees::{tree_cap, Engine, Knowledge, Path, Tri};
use crate::syntax::{Concept, Formula};

/// The ADL formula `α*` with `B_i(α*) = 𝒫^{B_i}(Ĉ)` for every pointed model.
pub fn adl_translate(c: &Concept) -> Result<Formula> {
    adl_translate_with_cap(c, tree_cap())
}

/// [`adl_translate`] with an explicit bound on decision nodes.
pub fn adl_translate_with_cap(c: &Concept, cap: usize) -> Result<Formula> {
    let aut = compile_automaton(&to_pnf(c))?;
    let mut t = Translator { engine: Engine::new(&aut), aut: &aut, nodes: 0, cap };
    t.build(&mut HashMap::new())
}

struct Translator<'a> {
    engine: Engine<'a>,
    aut: &'a AlternatingAutomaton,
    nodes: usize,
    cap: usize,
}

impl Translator<'_> {
    fn build(&mut self, know: &mut Knowledge) -> Result<Formula> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded(format!("more than {} decision nodes while translating", self.cap)));
        }
        let mut memo = HashMap::new();
        let root: Path = Vec::new();
        match self.engine.value(know, &root, self.aut.initial, &mut memo) {
            Tri::True => return Ok(Formula::Always),
            Tri::False => return Ok(Formula::Never),
            Tri::Unknown => {}
        }
        let (w, rel) = self.engine.frontier(know, &root, self.aut.initial, false, &mut memo).expect("undetermined game has a frontier");
        let bit = rel.trailing_zeros();
        let cond = self.condition(&w, bit, know);
        let prev = know.get(&w).copied();
        let (km, kv) = prev.unwrap_or((0, 0));
        know.insert(w.clone(), (km | (1 << bit), kv | (1 << bit)));
        let yes = self.build(know)?;
        know.insert(w.clone(), (km | (1 << bit), kv & !(1 << bit)));
        let no = self.build(know)?;
        match prev {
            Some(p) => know.insert(w, p),
            None => know.remove(&w),
        };
        Ok(ite(cond, yes, no))
    }

    /// Probability that atom `bit` holds at `w` given the knowledge.
    fn condition(&self, w: &[u8], bit: u32, know: &Knowledge) -> Formula {
        match w.split_first() {
            None => Formula::Atom(self.aut.atoms[bit as usize].clone()),
            Some((&r, rest)) => {
                let below = restrict(know, r);
                Formula::Marginal {
                    target: Arc::new(self.condition(rest, bit, &below)),
                    given: Arc::new(self.history(&below)),
                    role: self.aut.roles[r as usize].clone(),
                }
            }
        }
    }

    /// Joint probability of all facts known below the current word.
    fn history(&self, know: &Knowledge) -> Formula {
        let mut out = Formula::Always;
        if let Some(&(km, kv)) = know.get(&Vec::new()) {
            for (k, a) in self.aut.atoms.iter().enumerate() {
                if km & (1 << k) != 0 {
                    let lit = Formula::Atom(a.clone());
                    out = and(out, if kv & (1 << k) != 0 { lit } else { Formula::not(lit) });
                }
            }
        }
        let roles: BTreeMap<u8, ()> = know.keys().filter_map(|w| w.first().map(|&r| (r, ()))).collect();
        for &r in roles.keys() {
            let below = restrict(know, r);
            let h = self.history(&below);
            out = and(out, Formula::Marginal { target: Arc::new(h), given: Arc::new(Formula::Always), role: self.aut.roles[r as usize].clone() });
        }
        out
    }
}

/// Knowledge about the words under role `r`, with the leading `r` stripped.
fn restrict(know: &Knowledge, r: u8) -> Knowledge {
    know.iter().filter(|(w, _)| w.first() == Some(&r)).map(|(w, v)| (w[1..].to_vec(), *v)).collect()
}

fn and(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::Always, _) => b,
        (_, Formula::Always) => a,
        _ => Formula::and(a, b),
    }
}

fn ite(c: Formula, yes: Formula, no: Formula) -> Formula {
    if yes == no {
        return yes;
    }
    if yes == Formula::Always && no == Formula::Never {
        return c;
    }
    Formula::ite(c, yes, no)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate;
    use crate::model::{BeliefModel, PointedModel};
    use crate::parser::parse_concept;
    use crate::rational::q;

    fn unit() -> PointedModel {
        let m = BeliefModel::parse(include_str!("../../../../fixtures/unit.adm")).unwrap();
        PointedModel::at(m, "u").unwrap()
    }

    #[test]
    fn atom_translates_to_itself() {
        assert_eq!(adl_translate(&Concept::atom("A")).unwrap(), Formula::atom("A"));
    }

    #[test]
    fn top_is_always() {
        assert_eq!(adl_translate(&Concept::Top).unwrap(), Formula::Always);
    }

    #[test]
    fn exists_on_self_loop() {
        let mut pm = unit();
        pm.model.add_role("r");
        pm.model.set_weight("r", 0, 0, q(1, 1));
        let f = adl_translate(&parse_concept("Ex_r A", None).unwrap()).unwrap();
        assert_eq!(evaluate(&pm, &f).unwrap(), q(1, 2));
    }

    #[test]
    fn repeated_successor_facts_are_correlated() {
        // Ex_r A & Ex_r !A is unsatisfiable on functional samplings.
        let f = adl_translate(&parse_concept("Ex_r A & Ex_r !A", None).unwrap()).unwrap();
        assert_eq!(f, Formula::Never);
    }
}
