//! Acyclic alternating automata over functional interpretations.
//!
//! In the acceptance game at a position `(x, e)` player ∃ picks a universal
//! state `u ∈ δ_∃(e, λ(x))` (losing if there is none), then player ∀ picks
//! a role `ρ` on which `δ_∀(u, ρ)` is defined (losing if there is none) and
//! play continues at `(ρ-successor of x, δ_∀(u, ρ))`.
//!
//! Labels are bitmasks over the alphabet `X'`: bit `k` stands for `atoms[k]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::functional::alc::AlcInterpretation;
use crate::syntax::{Concept, Name};

/// Largest alphabet the automaton tables are built for.
pub const MAX_ATOMS: usize = 6;

/// A universal state: for each role it accepts, the existential state that
/// play continues in. The empty map is the accepting state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForallState {
    pub moves: BTreeMap<Name, usize>,
}

/// An existential state: `table[label]` lists the universal states ∃ may
/// move to when the current individual carries `label`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExistsState {
    pub table: Vec<Vec<usize>>,
    /// Bits of the label on which `table` actually depends.
    pub reads: u32,
}

/// An acyclic alternating automaton with alphabet `atoms` and roles `roles`.
#[derive(Clone, Debug)]
pub struct AlternatingAutomaton {
    pub atoms: Vec<Name>,
    pub roles: Vec<Name>,
    pub exists: Vec<ExistsState>,
    pub forall: Vec<ForallState>,
    pub initial: usize,
}

impl AlternatingAutomaton {
    /// Number of labels, `2^|X'|`.
    pub fn labels(&self) -> usize {
        1 << self.atoms.len()
    }

    /// Longest chain of role moves from the initial state.
    pub fn depth(&self) -> usize {
        let mut memo = vec![None; self.exists.len()];
        self.depth_of(self.initial, &mut memo)
    }

    fn depth_of(&self, e: usize, memo: &mut Vec<Option<usize>>) -> usize {
        if let Some(d) = memo[e] {
            return d;
        }
        let mut d = 0;
        for us in &self.exists[e].table {
            for &u in us {
                for &next in self.forall[u].moves.values() {
                    d = d.max(1 + self.depth_of(next, memo));
                }
            }
        }
        memo[e] = Some(d);
        d
    }

    /// Whether the state graph has no cycle through role moves.
    pub fn is_acyclic(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(a: &AlternatingAutomaton, e: usize, mark: &mut Vec<u8>) -> bool {
            match mark[e] {
                1 => return false,
                2 => return true,
                _ => {}
            }
            mark[e] = 1;
            for us in &a.exists[e].table {
                for &u in us {
                    for &next in a.forall[u].moves.values() {
                        if !visit(a, next, mark) {
                            return false;
                        }
                    }
                }
            }
            mark[e] = 2;
            true
        }
        let mut mark = vec![0; self.exists.len()];
        (0..self.exists.len()).all(|e| visit(self, e, &mut mark))
    }

    /// The label of `x` in `itp`, as a bitmask over the alphabet.
    pub fn label_of(&self, itp: &AlcInterpretation, x: usize) -> usize {
        self.atoms.iter().enumerate().filter(|(_, a)| itp.holds(a, x)).fold(0, |m, (k, _)| m | (1 << k))
    }
}

struct Builder {
    atoms: Vec<Name>,
    exists: Vec<ExistsState>,
    exists_index: HashMap<Vec<Vec<usize>>, usize>,
    forall: Vec<ForallState>,
    forall_index: HashMap<ForallState, usize>,
    products: HashMap<(usize, usize), usize>,
}

impl Builder {
    fn labels(&self) -> usize {
        1 << self.atoms.len()
    }

    fn intern_forall(&mut self, u: ForallState) -> usize {
        if let Some(&k) = self.forall_index.get(&u) {
            return k;
        }
        self.forall.push(u.clone());
        self.forall_index.insert(u, self.forall.len() - 1);
        self.forall.len() - 1
    }

    fn intern_exists(&mut self, mut table: Vec<Vec<usize>>) -> usize {
        for row in &mut table {
            row.sort_unstable();
            row.dedup();
        }
        if let Some(&k) = self.exists_index.get(&table) {
            return k;
        }
        let mut reads = 0u32;
        for bit in 0..self.atoms.len() {
            if (0..table.len()).any(|l| table[l] != table[l ^ (1 << bit)]) {
                reads |= 1 << bit;
            }
        }
        self.exists.push(ExistsState { table: table.clone(), reads });
        self.exists_index.insert(table, self.exists.len() - 1);
        self.exists.len() - 1
    }

    fn accept(&mut self) -> usize {
        self.intern_forall(ForallState { moves: BTreeMap::new() })
    }

    fn bit(&self, a: &Name) -> usize {
        1 << self.atoms.iter().position(|x| x == a).expect("atom in alphabet")
    }

    fn build(&mut self, c: &Concept) -> usize {
        let n = self.labels();
        match c {
            Concept::Top => {
                let acc = self.accept();
                self.intern_exists(vec![vec![acc]; n])
            }
            Concept::Bottom => self.intern_exists(vec![Vec::new(); n]),
            Concept::Atom(a) => {
                let (acc, b) = (self.accept(), self.bit(a));
                self.intern_exists((0..n).map(|l| if l & b != 0 { vec![acc] } else { Vec::new() }).collect())
            }
            Concept::Not(d) => {
                let Concept::Atom(a) = &**d else { unreachable!("positive normal form") };
                let (acc, b) = (self.accept(), self.bit(a));
                self.intern_exists((0..n).map(|l| if l & b == 0 { vec![acc] } else { Vec::new() }).collect())
            }
            Concept::Exists(r, d) => {
                let e = self.build(d);
                let u = self.intern_forall(ForallState { moves: BTreeMap::from([(r.clone(), e)]) });
                self.intern_exists(vec![vec![u]; n])
            }
            Concept::Or(a, b) => {
                let (ea, eb) = (self.build(a), self.build(b));
                let table = (0..n)
                    .map(|l| {
                        let mut row = self.exists[ea].table[l].clone();
                        row.extend_from_slice(&self.exists[eb].table[l]);
                        row
                    })
                    .collect();
                self.intern_exists(table)
            }
            Concept::And(a, b) => {
                let (ea, eb) = (self.build(a), self.build(b));
                self.product(ea, eb)
            }
        }
    }

    /// Both players play the two automata simultaneously; on a shared role
    /// the unique successor must satisfy both continuations.
    fn product(&mut self, ea: usize, eb: usize) -> usize {
        if ea == eb {
            return ea;
        }
        let key = (ea.min(eb), ea.max(eb));
        if let Some(&k) = self.products.get(&key) {
            return k;
        }
        let n = self.labels();
        let mut table = Vec::with_capacity(n);
        for l in 0..n {
            let (ra, rb) = (self.exists[ea].table[l].clone(), self.exists[eb].table[l].clone());
            let mut row = Vec::new();
            for &ua in &ra {
                for &ub in &rb {
                    row.push(self.merge(ua, ub));
                }
            }
            table.push(row);
        }
        let k = self.intern_exists(table);
        self.products.insert(key, k);
        k
    }

    fn merge(&mut self, ua: usize, ub: usize) -> usize {
        let mut moves = self.forall[ua].moves.clone();
        for (r, eb) in self.forall[ub].moves.clone() {
            let e = match moves.get(&r) {
                Some(&ea) => self.product(ea, eb),
                None => eb,
            };
            moves.insert(r, e);
        }
        self.intern_forall(ForallState { moves })
    }
}

/// Compiles a concept in positive normal form. The alphabet and role set are
/// the atoms and roles occurring in the concept.
pub fn compile_automaton(c: &Concept) -> Result<AlternatingAutomaton> {
    if !c.is_pnf() {
        return Err(Error::Precondition(format!("`{c}` is not in positive normal form")));
    }
    let atoms: Vec<Name> = c.atoms().into_iter().collect();
    if atoms.len() > MAX_ATOMS {
        return Err(Error::CapExceeded(format!("{} concept names; at most {MAX_ATOMS} are supported", atoms.len())));
    }
    let roles: Vec<Name> = c.roles().into_iter().collect();
    let mut b = Builder {
        atoms: atoms.clone(),
        exists: Vec::new(),
        exists_index: HashMap::new(),
        forall: Vec::new(),
        forall_index: HashMap::new(),
        products: HashMap::new(),
    };
    let initial = b.build(c);
    Ok(AlternatingAutomaton { atoms, roles, exists: b.exists, forall: b.forall, initial })
}

/// Whether ∃ wins the acceptance game on the pointed interpretation
/// `(itp, i)`, by backward induction over the acyclic position graph.
pub fn automaton_accepts(aut: &AlternatingAutomaton, itp: &AlcInterpretation, i: usize) -> Result<bool> {
    let mut memo = HashMap::new();
    wins(aut, itp, i, aut.initial, &mut memo)
}

fn wins(aut: &AlternatingAutomaton, itp: &AlcInterpretation, x: usize, e: usize, memo: &mut HashMap<(usize, usize), bool>) -> Result<bool> {
    if let Some(&v) = memo.get(&(x, e)) {
        return Ok(v);
    }
    let label = aut.label_of(itp, x);
    let mut result = false;
    'choices: for &u in &aut.exists[e].table[label] {
        for (r, &next) in &aut.forall[u].moves {
            let succ = itp.successors(r, x);
            let y = match succ.as_slice() {
                [y] => *y,
                [] => {
                    return Err(Error::Precondition(format!(
                        "`{}` has no `{r}`-successor: interpretation not functional or not deep enough",
                        itp.individuals()[x]
                    )))
                }
                _ => return Err(Error::Precondition(format!("`{}` has several `{r}`-successors", itp.individuals()[x]))),
            };
            if !wins(aut, itp, y, next, memo)? {
                continue 'choices;
            }
        }
        result = true;
        break;
    }
    memo.insert((x, e), result);
    Ok(result)
}

/// Atoms the automaton may read, as names.
pub fn read_atoms(aut: &AlternatingAutomaton) -> BTreeSet<Name> {
    let mask = aut.exists.iter().fold(0, |m, e| m | e.reads);
    aut.atoms.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, a)| a.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::alc::{alc_eval, to_pnf};
    use crate::parser::parse_concept;

    fn aut(s: &str) -> AlternatingAutomaton {
        compile_automaton(&to_pnf(&parse_concept(s, None).unwrap())).unwrap()
    }

    fn root(labels: &[&str]) -> AlcInterpretation {
        let mut itp = AlcInterpretation::new(&["x"]).unwrap();
        for a in labels {
            itp.assert_concept(a, 0);
        }
        itp
    }

    #[test]
    fn single_atom() {
        let a = aut("A");
        assert!(automaton_accepts(&a, &root(&["A"]), 0).unwrap());
        assert!(!automaton_accepts(&a, &root(&[]), 0).unwrap());
    }

    #[test]
    fn conjunction_needs_both() {
        let a = aut("A & B");
        assert!(automaton_accepts(&a, &root(&["A", "B"]), 0).unwrap());
        assert!(!automaton_accepts(&a, &root(&["A"]), 0).unwrap());
    }

    #[test]
    fn exists_on_chain() {
        let a = aut("Ex_r A");
        let mut itp = AlcInterpretation::new(&["x", "y"]).unwrap();
        itp.assert_concept("A", 1);
        itp.assert_role("r", 0, 1);
        itp.assert_role("r", 1, 1);
        assert!(automaton_accepts(&a, &itp, 0).unwrap());
        assert_eq!(a.depth(), 1);
        assert!(a.is_acyclic());
    }

    #[test]
    fn shared_role_conjunction_uses_one_successor() {
        let c = parse_concept("Ex_r A & Ex_r !A", None).unwrap();
        let a = compile_automaton(&c).unwrap();
        let mut itp = AlcInterpretation::new(&["x", "y"]).unwrap();
        itp.assert_role("r", 0, 1);
        itp.assert_role("r", 1, 1);
        assert!(!automaton_accepts(&a, &itp, 0).unwrap());
        assert!(!alc_eval(&itp, 0, &c));
    }

    #[test]
    fn rejects_non_pnf() {
        assert!(compile_automaton(&parse_concept("!(A & B)", None).unwrap()).is_err());
    }
}
