//! Knowledge-base consistency through polynomial constraint solving.
//!
//! The pipeline is: simplify → check acyclicity → exact preprocessing for
//! syntactic contradictions → partition and constraint generation → numeric
//! multi-start search → model extraction and exact re-verification.
//!
//! Verdicts are conservative: `Infeasible` only comes from exact syntactic
//! contradictions, `Consistent` only with a verified witness model, and
//! everything else is `Unknown`.

pub mod partition;
pub mod solver;
pub mod system;

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

pub use partition::{build_partition, ConceptPartition};
pub use solver::{solve_numeric, SolveConfig, SolveOutcome};
pub use system::{ConstraintSystem, Poly, Slot, VarKind};

use crate::error::{Error, Result};
use crate::kb::{kb_satisfied_within, simplify, AAxiom, AxiomKind, KnowledgeBase, Simplified, TAxiom};
use crate::model::BeliefModel;
use crate::rational::{q, Q};
use crate::syntax::{name, Formula, Name};

/// A verified witness for consistency.
#[derive(Clone, Debug)]
pub struct Witness {
    /// Numeric assignment to the system variables.
    pub assignment: Vec<f64>,
    /// Max-norm residual of the assignment.
    pub residual: f64,
    /// Residual tolerance the assignment was accepted under.
    pub tol: f64,
    /// Exact-rational model extracted from the assignment.
    pub model: BeliefModel,
    /// Set when the rounded witness failed re-verification and the exact
    /// dyadic float witness was used instead.
    pub note: Option<String>,
}

/// Result of a consistency check.
#[derive(Clone, Debug)]
pub enum Verdict {
    Consistent(Box<Witness>),
    /// An exact syntactic contradiction.
    Infeasible(String),
    /// The search budget ran out without a verified witness.
    Unknown { best_residual: f64, starts: usize, iters: usize },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent(_))
    }
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Verdict::Infeasible(_))
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Consistent(w) => write!(f, "CONSISTENT residual<={:e}", w.tol),
            Verdict::Infeasible(why) => write!(f, "INFEASIBLE {why}"),
            Verdict::Unknown { best_residual, starts, iters } => {
                write!(f, "UNKNOWN best_residual={best_residual:.3e} starts={starts} iters={iters}")
            }
        }
    }
}

/// Exact checks for direct contradictions in a simple A-Book.
pub fn preprocess(kb: &KnowledgeBase) -> Option<String> {
    let mut concept: BTreeMap<(Name, Formula), Q> = BTreeMap::new();
    let mut role: BTreeMap<(Name, Name, Name), Q> = BTreeMap::new();
    for ax in &kb.abook {
        match ax {
            AAxiom::Concept { a, p, formula } => {
                if let Some(prev) = concept.insert((a.clone(), formula.clone()), p.clone()) {
                    if &prev != p {
                        return Some(format!("{a} asserted to satisfy {formula} with probabilities {prev} and {p}"));
                    }
                }
            }
            AAxiom::Role { a, b, p, role: r } => {
                if let Some(prev) = role.insert((a.clone(), b.clone(), r.clone()), p.clone()) {
                    if &prev != p {
                        return Some(format!("({a},{b}) asserted in {r} with probabilities {prev} and {p}"));
                    }
                }
            }
        }
    }
    let mut sums: BTreeMap<(Name, Name), Q> = BTreeMap::new();
    for ((a, _, r), p) in &role {
        *sums.entry((a.clone(), r.clone())).or_insert_with(Q::zero) += p;
    }
    for ((a, r), s) in sums {
        if s > Q::one() {
            return Some(format!("role assertions ({a},·) in {r} sum to {s} > 1"));
        }
    }
    None
}

/// Tolerance used when re-verifying an extracted model against the KB.
pub fn verify_tolerance() -> Q {
    q(1, 100_000)
}

/// The generated artefacts of one consistency run, for inspection and emission.
pub struct Prepared {
    pub simplified: Simplified,
    pub partition: ConceptPartition,
    pub system: ConstraintSystem,
}

/// Simplifies, checks acyclicity and generates the constraint system.
pub fn prepare(kb: &KnowledgeBase) -> Result<Prepared> {
    let simplified = simplify(kb);
    let tbook = simplified.kb.simple_tbook()?;
    let partition = build_partition(&tbook, &simplified.kb.signature.concepts)?;
    let system = ConstraintSystem::generate(&simplified.kb, &partition)?;
    Ok(Prepared { simplified, partition, system })
}

/// Decides consistency of `kb` within the budget of `cfg`.
pub fn check_consistency(kb: &KnowledgeBase, cfg: &SolveConfig) -> Result<Verdict> {
    if cfg.starts == 0 || cfg.iters == 0 {
        return Err(Error::Precondition("solver budget must be positive".into()));
    }
    kb.check_well_formed()?;
    let prepared = prepare(kb)?;
    if let Some(why) = preprocess(&prepared.simplified.kb) {
        return Ok(Verdict::Infeasible(why));
    }
    solve(kb, &prepared, cfg)
}

/// Numeric search plus witness extraction and verification.
pub fn solve(original: &KnowledgeBase, prepared: &Prepared, cfg: &SolveConfig) -> Result<Verdict> {
    let cs = &prepared.system;
    let out = solve_numeric(cs, cfg);
    if out.residual > cfg.tol {
        return Ok(Verdict::Unknown { best_residual: out.residual, starts: out.starts_run, iters: cfg.iters });
    }
    let tol = verify_tolerance();
    let verified = |m: &BeliefModel| -> bool {
        m.validate().is_empty()
            && kb_satisfied_within(m, &prepared.simplified.kb, &tol).is_ok_and(|v| v.is_empty())
            && kb_satisfied_within(m, original, &tol).is_ok_and(|v| v.is_empty())
    };
    let rounded = cs.extract_model(&out.x, Some(1_000_000))?;
    if verified(&rounded) {
        return Ok(Verdict::Consistent(Box::new(Witness { assignment: out.x, residual: out.residual, tol: cfg.tol, model: rounded, note: None })));
    }
    let exact = cs.extract_model(&out.x, None)?;
    if verified(&exact) {
        return Ok(Verdict::Consistent(Box::new(Witness {
            assignment: out.x,
            residual: out.residual,
            tol: cfg.tol,
            model: exact,
            note: Some("rounded witness failed re-verification; using the exact float witness".into()),
        })));
    }
    Ok(Verdict::Unknown { best_residual: out.residual, starts: out.starts_run, iters: cfg.iters })
}

/// Which bound a query asks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `a ⊨_p α` itself.
    Exactly,
    /// Some model gives `a` probability at most `p` of α.
    AtMost,
    /// Some model gives `a` probability at least `p` of α.
    AtLeast,
}

/// Inserts the query assertion and checks consistency of the result.
pub fn query_bound(kb: &KnowledgeBase, a: &str, alpha: &Formula, p: Q, dir: Direction, cfg: &SolveConfig) -> Result<Verdict> {
    if !kb.signature.names.contains(a) {
        return Err(Error::UnknownName(a.to_string()));
    }
    let mut kb = kb.clone();
    let a = name(a);
    match dir {
        Direction::Exactly => kb.abook.push(AAxiom::Concept { a, p, formula: alpha.clone() }),
        Direction::AtMost | Direction::AtLeast => {
            let mut k = 1;
            let fresh = loop {
                let cand = format!("query{k}");
                if !kb.signature.concepts.contains(cand.as_str()) && !kb.signature.names.contains(cand.as_str()) {
                    break name(&cand);
                }
                k += 1;
            };
            kb.signature.concepts.insert(fresh.clone());
            let qf = Formula::Atom(fresh.clone());
            let ax = if dir == Direction::AtMost {
                TAxiom::new(AxiomKind::NoMoreLikely, alpha.clone(), qf.clone())
            } else {
                TAxiom::new(AxiomKind::NoMoreLikely, qf.clone(), alpha.clone())
            };
            kb.tbook.push(ax);
            kb.abook.push(AAxiom::Concept { a, p, formula: qf });
        }
    }
    check_consistency(&kb, cfg)
}
