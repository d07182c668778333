use std::collections::HashMap;

use super::{DependencySubgraph, Engine, EngineError, HornRule, RuleOrigin};
use crate::kernel::{conj_project, ProofTree};
use crate::logic::{Context, Formula, Substitution, Term, Theory, Variable};

fn eq(a: &Variable, b: &Variable) -> Formula {
    Formula::Eq(Term::Var(a.clone()), Term::Var(b.clone()))
}

fn swap(ctx: &Context, l: &Formula, r: &Formula) -> ProofTree {
    ProofTree::and_intro(
        ProofTree::and_elim_r(ctx.clone(), l.clone(), r.clone()),
        ProofTree::and_elim_l(ctx.clone(), l.clone(), r.clone()),
    )
    .expect("same antecedent")
}

/// Kernel proof of a built-in equality rule, over the rule's own context.
pub(crate) fn equality_lemma(rule: &HornRule) -> ProofTree {
    let ctx = &rule.context;
    let vars = ctx.vars();
    if rule.name.starts_with("eq.sym.") {
        let (x, y) = (&vars[0], &vars[1]);
        let u = Variable::new("u", x.sort.clone());
        let ctx3 = ctx.with(u.clone()).expect("fresh");
        let e = ProofTree::eq_subst(ctx3, x.clone(), y.clone(), eq(x, &u)).expect("in context");
        let back = Substitution::renaming([(x.clone(), x.clone()), (y.clone(), y.clone()), (u, x.clone())])
            .expect("same sort");
        let s = ProofTree::subst(e, back, ctx.clone()).expect("total");
        let refl = ProofTree::cut(
            ProofTree::truth(ctx.clone(), eq(x, y)),
            ProofTree::eq_refl(ctx.clone(), x.clone()).expect("in context"),
        )
        .expect("⊤ matches");
        let pair = ProofTree::and_intro(ProofTree::identity(ctx.clone(), eq(x, y)), refl).expect("same antecedent");
        ProofTree::cut(pair, s).expect("shapes agree")
    } else if rule.name.starts_with("eq.trans.") {
        let (x, y, z) = (&vars[0], &vars[1], &vars[2]);
        let e = ProofTree::eq_subst(ctx.clone(), y.clone(), z.clone(), eq(x, y)).expect("in context");
        ProofTree::cut(swap(ctx, &eq(x, y), &eq(y, z)), e).expect("shapes agree")
    } else {
        let Formula::And(atom, equation) = &rule.premise else {
            unreachable!("rewrite rules are conjunctions")
        };
        let Formula::Eq(Term::Var(xi), Term::Var(y)) = equation.as_ref() else {
            unreachable!("rewrite rules end in an equation")
        };
        let e = ProofTree::eq_subst(ctx.clone(), xi.clone(), y.clone(), atom.as_ref().clone()).expect("in context");
        ProofTree::cut(swap(ctx, atom, equation), e).expect("shapes agree")
    }
}

impl Engine {
    /// Kernel proof of `conj(leaves) ⊢_∅ target` for a traceback subgraph.
    pub fn elaborate(&self, g: &DependencySubgraph) -> Result<ProofTree, EngineError> {
        let ctx = Context::empty();
        let gamma = g.sequent().premise;
        let by_atom: HashMap<&Formula, usize> = g.nodes.iter().enumerate().map(|(i, n)| (&n.atom, i)).collect();
        let mut proofs: Vec<ProofTree> = Vec::with_capacity(g.nodes.len());
        for node in &g.nodes {
            let fail = |reason: String| EngineError::ElaborationFailed {
                fact: node.atom.to_string(),
                reason,
            };
            let Some(step) = &node.step else {
                let p = conj_project(&ctx, &gamma, &node.atom).ok_or_else(|| fail("leaf not among premises".into()))?;
                proofs.push(p);
                continue;
            };
            let rule = self
                .rule(&step.rule)
                .ok_or_else(|| fail(format!("unknown rule `{}`", step.rule)))?;
            let lemma = match rule.origin {
                RuleOrigin::Axiom => ProofTree::axiom(self.theory(), &rule.name, None).map_err(|e| fail(e.to_string()))?,
                RuleOrigin::Builtin => equality_lemma(rule),
            };
            let inst = ProofTree::subst(lemma, step.subst.clone(), ctx.clone()).map_err(|e| fail(e.to_string()))?;
            if inst.conclusion.conclusion != node.atom {
                return Err(fail(format!(
                    "rule `{}` concludes `{}`",
                    rule.name, inst.conclusion.conclusion
                )));
            }
            let body = self.assemble(&ctx, &gamma, &inst.conclusion.premise, &by_atom, &proofs, &fail)?;
            proofs.push(ProofTree::cut(body, inst).map_err(|e| fail(e.to_string()))?);
        }
        proofs.pop().ok_or_else(|| EngineError::ElaborationFailed {
            fact: g.target.to_string(),
            reason: "empty subgraph".into(),
        })
    }

    fn assemble(
        &self,
        ctx: &Context,
        gamma: &Formula,
        shape: &Formula,
        by_atom: &HashMap<&Formula, usize>,
        proofs: &[ProofTree],
        fail: &dyn Fn(String) -> EngineError,
    ) -> Result<ProofTree, EngineError> {
        match shape {
            Formula::Top => Ok(ProofTree::truth(ctx.clone(), gamma.clone())),
            Formula::And(l, r) => {
                let pl = self.assemble(ctx, gamma, l, by_atom, proofs, fail)?;
                let pr = self.assemble(ctx, gamma, r, by_atom, proofs, fail)?;
                ProofTree::and_intro(pl, pr).map_err(|e| fail(e.to_string()))
            }
            atom => by_atom
                .get(atom)
                .and_then(|&i| proofs.get(i))
                .cloned()
                .ok_or_else(|| fail(format!("body atom `{atom}` is not derived earlier"))),
        }
    }
}

/// Convenience wrapper building an [`Engine`] for `t`.
pub fn elaborate(t: &Theory, g: &DependencySubgraph) -> Result<ProofTree, EngineError> {
    Engine::new(t).elaborate(g)
}
