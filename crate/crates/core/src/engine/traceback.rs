use std::collections::{BTreeMap, BTreeSet};

use super::{Engine, EngineError, FactBase, Limits, Provenance};
use crate::logic::{Context, Formula, Sequent, Substitution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub subst: Substitution,
    /// Node indices of the body facts, in body order.
    pub parents: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphNode {
    pub atom: Formula,
    /// `None` for premise leaves.
    pub step: Option<Step>,
}

/// The derivation of one fact, parents before children, target last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencySubgraph {
    pub target: Formula,
    pub nodes: Vec<SubgraphNode>,
}

impl DependencySubgraph {
    pub fn leaves(&self) -> Vec<&Formula> {
        self.nodes.iter().filter(|n| n.step.is_none()).map(|n| &n.atom).collect()
    }

    /// `(parent, child)` node index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if let Some(s) = &n.step {
                out.extend(s.parents.iter().map(|&p| (p, i)));
            }
        }
        out
    }

    /// Derivation steps, not counting leaves.
    pub fn steps(&self) -> usize {
        self.nodes.iter().filter(|n| n.step.is_some()).count()
    }

    /// `leaf_1 ∧ … ∧ leaf_n ⊢_∅ target`, with `⊤` for no leaves.
    pub fn sequent(&self) -> Sequent {
        let leaves = self.leaves().into_iter().cloned().collect();
        Sequent::new(Context::empty(), Formula::conj(leaves), self.target.clone())
    }

    fn extract(fb: &FactBase, target: usize) -> Self {
        let mut seen = BTreeSet::new();
        let mut stack = vec![target];
        while let Some(i) = stack.pop() {
            if !seen.insert(i) {
                continue;
            }
            if let Provenance::Derived { parents, .. } = fb.provenance(i) {
                stack.extend(parents.iter().copied());
            }
        }
        let order: BTreeMap<usize, usize> = seen.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let nodes = seen
            .iter()
            .map(|&i| SubgraphNode {
                atom: fb.fact(i).clone(),
                step: match fb.provenance(i) {
                    Provenance::Premise => None,
                    Provenance::Derived {
                        rule, subst, parents, ..
                    } => Some(Step {
                        rule: rule.clone(),
                        subst: subst.clone(),
                        parents: parents.iter().map(|p| order[p]).collect(),
                    }),
                },
            })
            .collect();
        DependencySubgraph {
            target: fb.fact(target).clone(),
            nodes,
        }
    }
}

const UNBOUNDED: Limits = Limits {
    max_facts: usize::MAX,
    max_rounds: usize::MAX,
};

impl Engine {
    /// Whether `target` follows from `premises` alone.
    pub fn derives(&self, premises: &[Formula], target: &Formula) -> Result<bool, EngineError> {
        Ok(self.saturate(premises, UNBOUNDED)?.contains(target))
    }

    /// A subgraph re-deriving `target` whose premise leaves are
    /// subset-minimal: dropping any one of them loses the target.
    pub fn traceback(&self, fb: &FactBase, target: &Formula) -> Result<DependencySubgraph, EngineError> {
        let idx = fb.index_of(target).ok_or_else(|| EngineError::TargetAbsent {
            atom: target.to_string(),
        })?;
        let first = DependencySubgraph::extract(fb, idx);
        let mut leaves: Vec<Formula> = first.leaves().into_iter().cloned().collect();
        let mut removed_any = false;
        let mut i = 0;
        while i < leaves.len() {
            let mut rest = leaves.clone();
            rest.remove(i);
            if self.derives(&rest, target)? {
                leaves = rest;
                removed_any = true;
            } else {
                i += 1;
            }
        }
        if !removed_any {
            return Ok(first);
        }
        let fb2 = self.saturate(&leaves, UNBOUNDED)?;
        let idx2 = fb2.index_of(target).expect("re-derivation checked");
        Ok(DependencySubgraph::extract(&fb2, idx2))
    }
}
