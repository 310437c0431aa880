//! Accepted trees of an automaton and the probability measure they induce.
//!
//! Trees are found by sequential reveal: starting from nothing known, the
//! acceptance game is solved in three-valued logic, and while its value is
//! undetermined the first undetermined position's word is revealed with each
//! of its `2^|X'|` labels. Every leaf whose game is won is an accepted tree.
//! The trees produced this way are pairwise incompatible (no sampling
//! extends two of them), so their probabilities add up to the measure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::functional::alc::to_pnf;
use crate::functional::automaton::{compile_automaton, AlternatingAutomaton};
use crate::model::{BeliefModel, PointedModel};
use crate::rational::Q;
use crate::syntax::{Concept, Name};

/// Default bound on reveal-tree nodes; `ADL_TREE_CAP` overrides it.
pub const DEFAULT_TREE_CAP: usize = 100_000;

/// The enumeration cap in force: `ADL_TREE_CAP` if set and valid, else the default.
pub fn tree_cap() -> usize {
    std::env::var("ADL_TREE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_TREE_CAP)
}

/// Kleene truth values for partially revealed samplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Tri {
    True,
    False,
    Unknown,
}

/// Role-index path from the point.
pub(crate) type Path = Vec<u8>;

/// What is known about each word: `(mask of known atoms, their values)`.
pub(crate) type Knowledge = HashMap<Path, (u32, u32)>;

/// Three-valued game solver over an automaton.
pub(crate) struct Engine<'a> {
    pub aut: &'a AlternatingAutomaton,
    moves: Vec<Vec<(u8, usize)>>,
}

impl<'a> Engine<'a> {
    pub fn new(aut: &'a AlternatingAutomaton) -> Engine<'a> {
        let moves = aut
            .forall
            .iter()
            .map(|u| {
                u.moves
                    .iter()
                    .map(|(r, &e)| (aut.roles.iter().position(|x| x == r).expect("role in automaton") as u8, e))
                    .collect()
            })
            .collect();
        Engine { aut, moves }
    }

    /// Unknown bits of `e`'s label that can still change the move table.
    pub fn relevant(&self, e: usize, km: u32, kv: u32) -> u32 {
        let st = &self.aut.exists[e];
        let unknown = st.reads & !km;
        let mut rel = 0;
        for_subsets(unknown, |s| {
            let l = (kv | s) as usize;
            for b in 0..self.aut.atoms.len() {
                if unknown & (1 << b) != 0 && st.table[l] != st.table[l ^ (1 << b)] {
                    rel |= 1 << b;
                }
            }
        });
        rel
    }

    fn known(&self, know: &Knowledge, w: &Path) -> (u32, u32) {
        know.get(w).copied().unwrap_or((0, 0))
    }

    /// Game value at `(w, e)` given `know`.
    pub fn value(&self, know: &Knowledge, w: &Path, e: usize, memo: &mut HashMap<(Path, usize), Tri>) -> Tri {
        if let Some(&v) = memo.get(&(w.clone(), e)) {
            return v;
        }
        let (km, kv) = self.known(know, w);
        let kv = kv & km;
        let rel = self.relevant(e, km, kv);
        let mut acc: Option<Tri> = None;
        let mut subsets = Vec::new();
        for_subsets(rel, |s| subsets.push(s));
        for s in subsets {
            let v = self.row_value(know, w, e, (kv | s) as usize, memo);
            acc = Some(match (acc, v) {
                (None, v) => v,
                (Some(a), v) if a == v => a,
                _ => Tri::Unknown,
            });
            if acc == Some(Tri::Unknown) {
                break;
            }
        }
        let v = acc.unwrap_or(Tri::False);
        memo.insert((w.clone(), e), v);
        v
    }

    fn row_value(&self, know: &Knowledge, w: &Path, e: usize, label: usize, memo: &mut HashMap<(Path, usize), Tri>) -> Tri {
        let mut best = Tri::False;
        for &u in &self.aut.exists[e].table[label] {
            let mut all = Tri::True;
            for &(r, next) in &self.moves[u] {
                let mut wr = w.clone();
                wr.push(r);
                match self.value(know, &wr, next, memo) {
                    Tri::False => {
                        all = Tri::False;
                        break;
                    }
                    Tri::Unknown => all = Tri::Unknown,
                    Tri::True => {}
                }
            }
            match all {
                Tri::True => return Tri::True,
                Tri::Unknown => best = Tri::Unknown,
                Tri::False => {}
            }
        }
        best
    }

    /// Follows undetermined positions from `(w, e)` down to the first one
    /// that needs information about its own word. Returns that word and the
    /// relevant unknown bits there. With `whole_words`, an unrevealed word
    /// is returned as soon as it is reached, even if its label is irrelevant.
    pub fn frontier(
        &self,
        know: &Knowledge,
        w: &Path,
        e: usize,
        whole_words: bool,
        memo: &mut HashMap<(Path, usize), Tri>,
    ) -> Option<(Path, u32)> {
        let (km, kv) = self.known(know, w);
        let kv = kv & km;
        if whole_words && !know.contains_key(w) {
            return Some((w.clone(), self.relevant(e, km, kv)));
        }
        let rel = self.relevant(e, km, kv);
        if rel != 0 {
            return Some((w.clone(), rel));
        }
        for &u in &self.aut.exists[e].table[kv as usize] {
            for &(r, next) in &self.moves[u] {
                let mut wr = w.clone();
                wr.push(r);
                if self.value(know, &wr, next, memo) == Tri::Unknown {
                    return self.frontier(know, &wr, next, whole_words, memo);
                }
            }
        }
        None
    }
}

/// Calls `f` on every subset of `mask`, starting from the empty set.
pub(crate) fn for_subsets(mask: u32, mut f: impl FnMut(u32)) {
    let mut s = 0u32;
    loop {
        f(s);
        if s == mask {
            break;
        }
        s = (s.wrapping_sub(mask)) & mask;
    }
}

/// A finite tree of revealed words: each node carries the full label
/// (the set of atoms of `X'` that hold) and its revealed role-children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AcceptedTree {
    pub label: BTreeSet<Name>,
    pub children: BTreeMap<Name, AcceptedTree>,
}

impl AcceptedTree {
    /// Number of words in the tree.
    pub fn size(&self) -> usize {
        1 + self.children.values().map(AcceptedTree::size).sum::<usize>()
    }

    /// `P_x(T)`: label probability at `x` times, per child role, the
    /// expected probability of the child subtree at the successor.
    pub fn probability(&self, m: &BeliefModel, atoms: &[Name], x: usize) -> Q {
        let mut p = Q::one();
        for a in atoms {
            let l = m.likelihood(a, x);
            p *= if self.label.contains(a) { l } else { Q::one() - l };
            if p.is_zero() {
                return p;
            }
        }
        for (r, child) in &self.children {
            let mut s = Q::zero();
            for (y, w) in m.successors(r, x) {
                s += w * child.probability(m, atoms, y);
            }
            p *= s;
            if p.is_zero() {
                return p;
            }
        }
        p
    }
}

impl fmt::Display for AcceptedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label: Vec<String> = self.label.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", label.join(","))?;
        if !self.children.is_empty() {
            write!(f, "[")?;
            for (k, (r, c)) in self.children.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{r}:{c}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

fn to_tree(aut: &AlternatingAutomaton, know: &Knowledge, w: &Path) -> AcceptedTree {
    let (_, val) = know[w];
    let label = aut.atoms.iter().enumerate().filter(|(k, _)| val & (1 << k) != 0).map(|(_, a)| a.clone()).collect();
    let mut children = BTreeMap::new();
    for (r, role) in aut.roles.iter().enumerate() {
        let mut wr = w.clone();
        wr.push(r as u8);
        if know.contains_key(&wr) {
            children.insert(role.clone(), to_tree(aut, know, &wr));
        }
    }
    AcceptedTree { label, children }
}

/// The accepted trees of `aut` found by sequential reveal, in a
/// deterministic order. Fails when more than `cap` reveal nodes are visited.
pub fn recognized_trees(aut: &AlternatingAutomaton, cap: usize) -> Result<Vec<AcceptedTree>> {
    let engine = Engine::new(aut);
    let full = (1u32 << aut.atoms.len()) - 1;
    let mut out = Vec::new();
    let mut visited = 0usize;
    // The root word is always part of a tree.
    let mut stack: Vec<Knowledge> = Vec::new();
    for l in (0..=full).rev() {
        stack.push(HashMap::from([(Vec::new(), (full, l))]));
    }
    while let Some(know) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::CapExceeded(format!("more than {cap} reveal steps while enumerating accepted trees")));
        }
        let mut memo = HashMap::new();
        match engine.value(&know, &Vec::new(), aut.initial, &mut memo) {
            Tri::True => out.push(to_tree(aut, &know, &Vec::new())),
            Tri::False => {}
            Tri::Unknown => {
                let (w, _) = engine.frontier(&know, &Vec::new(), aut.initial, true, &mut memo).expect("undetermined game has a frontier");
                for l in (0..=full).rev() {
                    let mut k = know.clone();
                    k.insert(w.clone(), (full, l));
                    stack.push(k);
                }
            }
        }
    }
    Ok(out)
}

/// Exact probability of a concept with its contributing trees.
#[derive(Clone, Debug)]
pub struct MeasureResult {
    pub value: Q,
    /// Alphabet the tree labels range over.
    pub atoms: Vec<Name>,
    pub trees: Vec<(AcceptedTree, Q)>,
}

/// Checks that the concept's names are declared by the model.
pub(crate) fn check_concept(m: &BeliefModel, c: &Concept) -> Result<()> {
    let sig = m.signature();
    for a in c.atoms() {
        sig.check_concept(&a)?;
    }
    for r in c.roles() {
        sig.check_role(&r)?;
    }
    Ok(())
}

/// `𝒫^{B_i}(Ĉ)`: the probability that a sampling from the pointed model
/// satisfies `C`, as a sum over accepted trees.
pub fn measure(pm: &PointedModel, c: &Concept) -> Result<MeasureResult> {
    measure_with_cap(pm, c, tree_cap())
}

/// [`measure`] with an explicit enumeration cap.
pub fn measure_with_cap(pm: &PointedModel, c: &Concept, cap: usize) -> Result<MeasureResult> {
    check_concept(&pm.model, c)?;
    let aut = compile_automaton(&to_pnf(c))?;
    let trees = recognized_trees(&aut, cap)?;
    let mut value = Q::zero();
    let mut out = Vec::with_capacity(trees.len());
    for t in trees {
        let p = t.probability(&pm.model, &aut.atoms, pm.point);
        value += &p;
        out.push((t, p));
    }
    Ok(MeasureResult { value, atoms: aut.atoms, trees: out })
}
