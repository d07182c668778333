use std::collections::BTreeSet;

use super::{KernelError, ProofPath, ProofTree, Rule, RuleTag};
use crate::logic::{
    alpha_eq, substitute, wf_sequent, wf_term, Context, Formula, Sequent, Substitution, Term, Theory,
    Variable,
};

/// Checks every node bottom-up and returns the root sequent.
///
/// Errors carry the path of the first offending node in post-order.
pub fn check_proof(theory: &Theory, proof: &ProofTree) -> Result<Sequent, KernelError> {
    check_at(theory, proof, &ProofPath::root())?;
    Ok(proof.conclusion.clone())
}

fn check_at(theory: &Theory, node: &ProofTree, path: &ProofPath) -> Result<(), KernelError> {
    for (i, child) in node.premises.iter().enumerate() {
        check_at(theory, child, &path.child(i))?;
    }
    wf_sequent(&theory.signature, &node.conclusion).map_err(|source| KernelError::IllFormedSequent {
        path: path.clone(),
        source,
    })?;
    Node { theory, node, path }.check()
}

struct Node<'a> {
    theory: &'a Theory,
    node: &'a ProofTree,
    path: &'a ProofPath,
}

impl Node<'_> {
    fn tag(&self) -> RuleTag {
        self.node.rule.tag()
    }

    fn mismatch(&self, reason: impl Into<String>) -> KernelError {
        KernelError::RuleMismatch {
            path: self.path.clone(),
            rule: self.tag(),
            reason: reason.into(),
        }
    }

    fn payload(&self, reason: impl Into<String>) -> KernelError {
        KernelError::PayloadError {
            path: self.path.clone(),
            rule: self.tag(),
            reason: reason.into(),
        }
    }

    fn arity(&self, n: usize) -> Result<(), KernelError> {
        let got = self.node.premises.len();
        if got != n {
            return Err(self.mismatch(format!("expected {n} premises, found {got}")));
        }
        Ok(())
    }

    fn child(&self, i: usize) -> &Sequent {
        &self.node.premises[i].conclusion
    }

    fn same(&self, what: &str, got: &Formula, want: &Formula) -> Result<(), KernelError> {
        if alpha_eq(got, want) {
            Ok(())
        } else {
            Err(self.mismatch(format!("{what} is `{got}`, expected `{want}`")))
        }
    }

    fn same_context(&self, other: &Context) -> Result<(), KernelError> {
        if *other == self.node.conclusion.context {
            Ok(())
        } else {
            Err(self.mismatch("premise context differs from the conclusion context"))
        }
    }

    fn in_context(&self, v: &Variable) -> Result<(), KernelError> {
        if self.node.conclusion.context.contains(v) {
            Ok(())
        } else {
            Err(self.payload(format!("`{v}` is not in the context")))
        }
    }

    fn check(&self) -> Result<(), KernelError> {
        let c = &self.node.conclusion;
        match &self.node.rule {
            Rule::Axiom(name) => {
                self.arity(0)?;
                let ax = self.theory.axiom(name).ok_or_else(|| KernelError::UnknownAxiom {
                    path: self.path.clone(),
                    name: name.clone(),
                })?;
                let from = ax.sequent.context.vars();
                let to = c.context.vars();
                if from.len() != to.len() || from.iter().zip(to).any(|(a, b)| a.sort != b.sort) {
                    return Err(self.mismatch("context is not a renaming of the axiom context"));
                }
                let r = Substitution::renaming(from.iter().cloned().zip(to.iter().cloned()))
                    .map_err(|e| self.mismatch(e.to_string()))?;
                self.same("premise", &c.premise, &substitute(&ax.sequent.premise, &r))?;
                self.same("conclusion", &c.conclusion, &substitute(&ax.sequent.conclusion, &r))
            }
            Rule::Identity => {
                self.arity(0)?;
                self.same("conclusion", &c.conclusion, &c.premise)
            }
            Rule::Cut => {
                self.arity(2)?;
                let (a, b) = (self.child(0), self.child(1));
                self.same_context(&a.context)?;
                self.same_context(&b.context)?;
                self.same("cut formula", &b.premise, &a.conclusion)?;
                self.same("premise", &c.premise, &a.premise)?;
                self.same("conclusion", &c.conclusion, &b.conclusion)
            }
            Rule::Subst(s) => {
                self.arity(1)?;
                let k = self.child(0);
                let dom: BTreeSet<&Variable> = s.iter().map(|(v, _)| v).collect();
                let ctx: BTreeSet<&Variable> = k.context.vars().iter().collect();
                if dom != ctx {
                    return Err(self.payload("domain is not the premise context"));
                }
                for (v, t) in s.iter() {
                    let sort = wf_term(&self.theory.signature, &c.context, t)
                        .map_err(|e| self.payload(format!("{} := {t}: {e}", v.name)))?;
                    if sort != v.sort {
                        return Err(self.payload(format!("{} := {t} changes sort", v.name)));
                    }
                }
                self.same("premise", &c.premise, &substitute(&k.premise, s))?;
                self.same("conclusion", &c.conclusion, &substitute(&k.conclusion, s))
            }
            Rule::Truth => {
                self.arity(0)?;
                self.same("conclusion", &c.conclusion, &Formula::Top)
            }
            Rule::Falsum => {
                self.arity(0)?;
                self.same("premise", &c.premise, &Formula::Bottom)
            }
            Rule::AndElimL | Rule::AndElimR => {
                self.arity(0)?;
                let Formula::And(l, r) = &c.premise else {
                    return Err(self.mismatch("premise is not a conjunction"));
                };
                let want = if matches!(self.node.rule, Rule::AndElimL) { l } else { r };
                self.same("conclusion", &c.conclusion, want)
            }
            Rule::AndIntro => {
                self.arity(2)?;
                let (a, b) = (self.child(0), self.child(1));
                self.same_context(&a.context)?;
                self.same_context(&b.context)?;
                self.same("left premise", &a.premise, &c.premise)?;
                self.same("right premise", &b.premise, &c.premise)?;
                let want = Formula::and(a.conclusion.clone(), b.conclusion.clone());
                self.same("conclusion", &c.conclusion, &want)
            }
            Rule::OrIntro(i) => {
                self.arity(0)?;
                let Formula::Or(list) = &c.conclusion else {
                    return Err(self.mismatch("conclusion is not a disjunction"));
                };
                let f = list
                    .get(*i)
                    .ok_or_else(|| self.payload(format!("index {i} out of range for {} disjuncts", list.len())))?;
                self.same("premise", &c.premise, f)
            }
            Rule::OrElim => {
                let Formula::Or(list) = &c.premise else {
                    return Err(self.mismatch("premise is not a disjunction"));
                };
                self.arity(list.len())?;
                for (j, f) in list.iter().enumerate() {
                    let k = self.child(j);
                    self.same_context(&k.context)?;
                    self.same("case premise", &k.premise, f)?;
                    self.same("case conclusion", &k.conclusion, &c.conclusion)?;
                }
                Ok(())
            }
            Rule::ExistsFwd(v) => {
                self.arity(1)?;
                let k = self.child(0);
                if !k.context.contains(v) {
                    return Err(self.payload(format!("`{v}` is not in the premise context")));
                }
                if k.context.without(v) != c.context {
                    return Err(self.mismatch("context is not the premise context minus the variable"));
                }
                if c.conclusion.free_vars().contains(v) {
                    return Err(self.mismatch(format!("`{}` occurs free in the conclusion", v.name)));
                }
                self.same("premise", &c.premise, &Formula::exists(v.clone(), k.premise.clone()))?;
                self.same("conclusion", &c.conclusion, &k.conclusion)
            }
            Rule::ExistsBwd(v) => {
                self.arity(1)?;
                let k = self.child(0);
                let Formula::Exists(bound, body) = &k.premise else {
                    return Err(self.mismatch("premise of the premise is not existential"));
                };
                if bound.sort != v.sort {
                    return Err(self.payload("variable sort differs from the binder"));
                }
                if k.context.with(v.clone()).ok().as_ref() != Some(&c.context) {
                    return Err(self.mismatch("context is not the premise context plus the variable"));
                }
                if k.conclusion.free_vars().contains(v) {
                    return Err(self.mismatch(format!("`{}` occurs free in the conclusion", v.name)));
                }
                let r = Substitution::renaming([(bound.clone(), v.clone())]).expect("sorts checked");
                self.same("premise", &c.premise, &substitute(body, &r))?;
                self.same("conclusion", &c.conclusion, &k.conclusion)
            }
            Rule::EqRefl(v) => {
                self.arity(0)?;
                self.in_context(v)?;
                self.same("premise", &c.premise, &Formula::Top)?;
                let eq = Formula::Eq(Term::Var(v.clone()), Term::Var(v.clone()));
                self.same("conclusion", &c.conclusion, &eq)
            }
            Rule::EqSubst(v, w) => {
                self.arity(0)?;
                self.in_context(v)?;
                self.in_context(w)?;
                let s = Substitution::renaming([(v.clone(), w.clone())])
                    .map_err(|e| self.payload(e.to_string()))?;
                let Formula::And(eq, body) = &c.premise else {
                    return Err(self.mismatch("premise is not `v = w & φ`"));
                };
                let want_eq = Formula::Eq(Term::Var(v.clone()), Term::Var(w.clone()));
                self.same("equation", eq, &want_eq)?;
                self.same("conclusion", &c.conclusion, &substitute(body, &s))
            }
            Rule::Frobenius => {
                self.arity(0)?;
                let Formula::And(f, ex) = &c.premise else {
                    return Err(self.mismatch("premise is not a conjunction"));
                };
                let Formula::Exists(v, g) = ex.as_ref() else {
                    return Err(self.mismatch("right conjunct is not existential"));
                };
                if f.free_vars().contains(v) {
                    return Err(self.mismatch(format!("`{}` occurs free in the left conjunct", v.name)));
                }
                let want = Formula::exists(v.clone(), Formula::and(f.as_ref().clone(), g.as_ref().clone()));
                self.same("conclusion", &c.conclusion, &want)
            }
            Rule::Distributivity => {
                self.arity(0)?;
                let Formula::And(f, or) = &c.premise else {
                    return Err(self.mismatch("premise is not a conjunction"));
                };
                let Formula::Or(list) = or.as_ref() else {
                    return Err(self.mismatch("right conjunct is not a disjunction"));
                };
                let want = Formula::Or(
                    list.iter()
                        .map(|g| Formula::and(f.as_ref().clone(), g.clone()))
                        .collect(),
                );
                self.same("conclusion", &c.conclusion, &want)
            }
        }
    }
}
