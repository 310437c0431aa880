//! Exact model checking: the probability `B_i(α)` that individual `i`
//! satisfies `α`, in exact rational arithmetic.
//!
//! Formulas are hash-consed into a DAG and every (subformula, individual)
//! pair is computed at most once, so one evaluation costs at most
//! `|I| · |subformulas|` node evaluations, each a sum over one role row.

use std::collections::HashMap;
use std::sync::Arc;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{BeliefModel, PointedModel};
use crate::rational::Q;
use crate::syntax::{Formula, Name};

/// A hash-consed formula node; children are node ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Always,
    Never,
    Atom(Name),
    Ite(usize, usize, usize),
    Marginal(usize, usize, Name),
}

/// Structural interning of formulas into a shared node table.
#[derive(Default, Debug, Clone)]
pub struct Interner {
    nodes: Vec<Node>,
    table: HashMap<Node, usize>,
    by_ptr: HashMap<*const Formula, (usize, Arc<Formula>)>,
}

// Raw pointers in `by_ptr` are only used as identity keys while the matching
// `Arc` is held alongside, so the table is safe to move between threads.
unsafe impl Send for Interner {}

impl Interner {
    pub fn new() -> Interner {
        Interner::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    fn add(&mut self, n: Node) -> usize {
        if let Some(&id) = self.table.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.table.insert(n, id);
        id
    }

    /// Interns `f`, returning its node id.
    pub fn intern(&mut self, f: &Formula) -> usize {
        match f {
            Formula::Always => self.add(Node::Always),
            Formula::Never => self.add(Node::Never),
            Formula::Atom(a) => self.add(Node::Atom(a.clone())),
            Formula::Ite(a, b, c) => {
                let (a, b, c) = (self.intern_arc(a), self.intern_arc(b), self.intern_arc(c));
                self.add(Node::Ite(a, b, c))
            }
            Formula::Marginal { target, given, role } => {
                let (t, g) = (self.intern_arc(target), self.intern_arc(given));
                self.add(Node::Marginal(t, g, role.clone()))
            }
        }
    }

    fn intern_arc(&mut self, f: &Arc<Formula>) -> usize {
        let key = Arc::as_ptr(f);
        if let Some((id, _)) = self.by_ptr.get(&key) {
            return *id;
        }
        let id = self.intern(f);
        self.by_ptr.insert(key, (id, f.clone()));
        id
    }

    /// Node ids reachable from `root` (its distinct subformulas).
    pub fn reachable(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(k) = stack.pop() {
            if seen[k] {
                continue;
            }
            seen[k] = true;
            out.push(k);
            match &self.nodes[k] {
                Node::Ite(a, b, c) => stack.extend([*a, *b, *c]),
                Node::Marginal(t, g, _) => stack.extend([*t, *g]),
                _ => {}
            }
        }
        out
    }
}

/// Memoised exact evaluator over one model. Reusing one evaluator across
/// many formulas shares work between common subformulas.
pub struct Evaluator<'m> {
    model: &'m BeliefModel,
    interner: Interner,
    memo: Vec<Vec<Option<Q>>>,
    evaluations: usize,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m BeliefModel) -> Evaluator<'m> {
        Evaluator { model, interner: Interner::new(), memo: Vec::new(), evaluations: 0 }
    }

    /// Number of (subformula, individual) values computed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    /// `B_i(f)`. Names not in the model read as likelihood zero / identity role.
    pub fn eval(&mut self, f: &Formula, i: usize) -> Q {
        let id = self.interner.intern(f);
        self.eval_node(id, i)
    }

    /// `E^ρ_i f = Σ_j ρ(i,j) B_j(f)`.
    pub fn expectation(&mut self, role: &str, f: &Formula, i: usize) -> Q {
        let id = self.interner.intern(f);
        let succ = self.model.successors(role, i);
        let mut acc = Q::zero();
        for (j, w) in succ {
            acc += w * self.eval_node(id, j);
        }
        acc
    }

    fn eval_node(&mut self, id: usize, i: usize) -> Q {
        if self.memo.len() < self.interner.len() {
            let n = self.model.len();
            self.memo.resize_with(self.interner.len(), || vec![None; n]);
        }
        if let Some(v) = &self.memo[id][i] {
            return v.clone();
        }
        let node = self.interner.node(id).clone();
        let v = match node {
            Node::Always => Q::one(),
            Node::Never => Q::zero(),
            Node::Atom(a) => self.model.likelihood(&a, i),
            Node::Ite(c, t, e) => {
                let pc = self.eval_node(c, i);
                let mut v = Q::zero();
                if !pc.is_zero() {
                    v += &pc * self.eval_node(t, i);
                }
                let rest = Q::one() - &pc;
                if !rest.is_zero() {
                    v += rest * self.eval_node(e, i);
                }
                v
            }
            Node::Marginal(t, g, role) => {
                let mut num = Q::zero();
                let mut den = Q::zero();
                for (j, w) in self.model.successors(&role, i) {
                    let pg = self.eval_node(g, j);
                    if pg.is_zero() {
                        continue;
                    }
                    let wg = w * pg;
                    num += &wg * self.eval_node(t, j);
                    den += wg;
                }
                if den.is_zero() {
                    Q::one()
                } else {
                    num / den
                }
            }
        };
        self.evaluations += 1;
        self.memo[id][i] = Some(v.clone());
        v
    }
}

/// Checks that every name in `f` is declared by the model.
pub fn check_formula(model: &BeliefModel, f: &Formula) -> Result<()> {
    let sig = model.signature();
    for c in f.concepts() {
        sig.check_concept(&c)?;
    }
    for r in f.roles() {
        sig.check_role(&r)?;
    }
    Ok(())
}

/// `B_i(f)` at the point of `pm`.
pub fn evaluate(pm: &PointedModel, f: &Formula) -> Result<Q> {
    check_formula(&pm.model, f)?;
    Ok(Evaluator::new(&pm.model).eval(f, pm.point))
}

/// `E^ρ_i f`.
pub fn expectation(m: &BeliefModel, i: usize, role: &str, f: &Formula) -> Result<Q> {
    if i >= m.len() {
        return Err(Error::UnknownIndividual(i.to_string()));
    }
    check_formula(m, f)?;
    m.signature().check_role(role)?;
    Ok(Evaluator::new(m).expectation(role, f, i))
}

/// Direct transcription of the recursive semantics without memoisation.
/// Exponential in the nesting of marginals; kept as a reference oracle.
pub fn evaluate_naive(m: &BeliefModel, f: &Formula, i: usize) -> Q {
    match f {
        Formula::Always => Q::one(),
        Formula::Never => Q::zero(),
        Formula::Atom(a) => m.likelihood(a, i),
        Formula::Ite(c, t, e) => {
            let pc = evaluate_naive(m, c, i);
            &pc * evaluate_naive(m, t, i) + (Q::one() - &pc) * evaluate_naive(m, e, i)
        }
        Formula::Marginal { target, given, role } => {
            let row = m.row(role, i);
            let mut num = Q::zero();
            let mut den = Q::zero();
            for (j, w) in row.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                let pg = evaluate_naive(m, given, j);
                num += w * &pg * evaluate_naive(m, target, j);
                den += w * pg;
            }
            if den.is_zero() {
                Q::one()
            } else {
                num / den
            }
        }
    }
}
