//! The `≅` partition of concept names, the class graph `⇒`, and the row
//! counts `#C̄` that size the anonymous part of the constraint template.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::kb::{check_acyclic, SimpleAxiom};
use crate::syntax::{Formula, Name};

/// Equivalence classes of concept names and the counts derived from them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptPartition {
    /// Classes, each a sorted set of concept names; ordered by smallest member.
    pub classes: Vec<BTreeSet<Name>>,
    /// Class index of each concept name.
    pub class_of: BTreeMap<Name, usize>,
    /// `C̄ ⇒ D̄` edges (from defining class to the class under the marginal).
    pub edges: BTreeSet<(usize, usize)>,
    /// `ρ^#(C̄, D̄)` for every non-zero entry.
    pub role_counts: BTreeMap<(usize, Name, usize), usize>,
    /// `#C̄ = Σ_{ρ, D̄} ρ^#(D̄, C̄)`.
    pub counts: Vec<usize>,
}

impl ConceptPartition {
    /// Class representative (smallest member) used in variable names.
    pub fn label(&self, class: usize) -> String {
        self.classes[class].iter().next().map(|n| n.to_string()).unwrap_or_default()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Builds `≅` (reflexive, symmetric, transitive closure of the axiom
/// clauses), the class graph and the counts, over the concepts `x` plus any
/// concept mentioned by the T-Book.
pub fn build_partition(tbook: &[SimpleAxiom], x: &BTreeSet<Name>) -> Result<ConceptPartition> {
    if !check_acyclic(tbook) {
        return Err(Error::Cyclic("a marginal axiom lies on a definition cycle".into()));
    }
    let mut all: BTreeSet<Name> = x.clone();
    for ax in tbook {
        all.extend(ax.concepts());
    }
    let names: Vec<Name> = all.into_iter().collect();
    let idx: BTreeMap<Name, usize> = names.iter().cloned().enumerate().map(|(k, n)| (n, k)).collect();
    let at = |f: &Formula| if let Formula::Atom(a) = f { Some(idx[a]) } else { None };
    let mut uf = UnionFind((0..names.len()).collect());
    for ax in tbook {
        match ax {
            SimpleAxiom::Ite { c, d, e, f } => {
                let members: Vec<usize> = [c, d, e, f].into_iter().filter_map(at).collect();
                for w in members.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
            SimpleAxiom::Marginal { c, d, e, .. } => {
                if let (Some(_), Some(dd), Some(ee)) = (at(c), at(d), at(e)) {
                    uf.union(dd, ee);
                }
            }
            SimpleAxiom::Eq { c, d } => {
                if let (Some(cc), Some(dd)) = (at(c), at(d)) {
                    uf.union(cc, dd);
                }
            }
        }
    }
    let mut root_to_class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<BTreeSet<Name>> = Vec::new();
    let mut class_of = BTreeMap::new();
    for (k, n) in names.iter().enumerate() {
        let r = uf.find(k);
        let c = *root_to_class.entry(r).or_insert_with(|| {
            classes.push(BTreeSet::new());
            classes.len() - 1
        });
        classes[c].insert(n.clone());
        class_of.insert(n.clone(), c);
    }
    let mut role_counts: BTreeMap<(usize, Name, usize), usize> = BTreeMap::new();
    for ax in tbook {
        if let SimpleAxiom::Marginal { c: Formula::Atom(e), d, e: g, role } = ax {
            let from = class_of[e];
            let targets: BTreeSet<usize> = [d, g].into_iter().filter_map(|f| at(f)).map(|k| class_of[&names[k]]).collect();
            for to in targets {
                *role_counts.entry((from, role.clone(), to)).or_insert(0) += 1;
            }
        }
    }
    let edges = role_counts.keys().map(|(a, _, b)| (*a, *b)).collect();
    let mut counts = vec![0; classes.len()];
    for ((_, _, to), n) in &role_counts {
        counts[*to] += n;
    }
    Ok(ConceptPartition { classes, class_of, edges, role_counts, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    fn a(s: &str) -> Formula {
        Formula::atom(s)
    }

    #[test]
    fn ite_axiom_makes_one_class() {
        let t = [SimpleAxiom::Ite { c: a("C"), d: a("D"), e: a("E"), f: a("F") }];
        let p = build_partition(&t, &BTreeSet::new()).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert_eq!(p.classes[0].len(), 4);
    }

    #[test]
    fn marginal_axiom_splits_classes() {
        let t = [SimpleAxiom::Marginal { c: a("C"), d: a("D"), e: a("E"), role: name("r") }];
        let p = build_partition(&t, &BTreeSet::new()).unwrap();
        assert_eq!(p.classes.len(), 2);
        let (cc, dc) = (p.class_of["C"], p.class_of["D"]);
        assert_eq!(p.class_of["E"], dc);
        assert_ne!(cc, dc);
        assert!(p.edges.contains(&(cc, dc)));
        assert_eq!(p.role_counts[&(cc, name("r"), dc)], 1);
        assert!(p.counts[dc] >= 1);
    }

    #[test]
    fn empty_tbook_gives_singletons() {
        let x: BTreeSet<Name> = ["A", "B"].into_iter().map(name).collect();
        let p = build_partition(&[], &x).unwrap();
        assert_eq!(p.classes.len(), 2);
        assert!(p.edges.is_empty());
        assert!(p.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn cyclic_is_rejected() {
        let t = [SimpleAxiom::Marginal { c: a("C"), d: a("C"), e: Formula::Always, role: name("r") }];
        assert!(matches!(build_partition(&t, &BTreeSet::new()), Err(Error::Cyclic(_))));
    }
}
