//! Horn-fragment forward chaining with provenance, minimal traceback and
//! elaboration of derivations into kernel proofs.
//!
//! Equality is handled by ordinary Horn rules added per sort and relation
//! (`eq.sym.S`, `eq.trans.S`, `eq.rw.R.i`) whenever equations can occur, so
//! every derived fact carries the same kind of provenance.

mod elaborate;
mod saturate;
mod traceback;

use std::collections::HashMap;

use thiserror::Error;

use crate::logic::{
    wf_formula, Context, Formula, Sequent, Signature, Sort, Substitution, Term, Theory, Variable,
};

pub use elaborate::elaborate;
pub use saturate::{FactBase, Limits, LimitKind, Provenance, SaturationStats, Strategy};
pub use traceback::{DependencySubgraph, Step, SubgraphNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleOrigin {
    Axiom,
    Builtin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornRule {
    pub name: String,
    pub context: Context,
    /// The axiom premise as written; its atoms, left to right, are the body.
    pub premise: Formula,
    pub body: Vec<Formula>,
    pub head: Formula,
    pub origin: RuleOrigin,
}

impl HornRule {
    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.context.clone(), self.premise.clone(), self.head.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub axiom: String,
    pub sequent: Sequent,
    pub reason: String,
}

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("{kind} limit exceeded")]
    LimitExceeded { kind: LimitKind, partial: Box<FactBase> },
    #[error("`{atom}` is not a usable premise: {reason}")]
    InvalidPremise { atom: String, reason: String },
    #[error("`{atom}` is not in the fact base")]
    TargetAbsent { atom: String },
    #[error("cannot elaborate `{fact}`: {reason}")]
    ElaborationFailed { fact: String, reason: String },
}

fn body_atoms(f: &Formula, out: &mut Vec<Formula>) -> Result<(), String> {
    match f {
        Formula::Top => Ok(()),
        Formula::And(l, r) => {
            body_atoms(l, out)?;
            body_atoms(r, out)
        }
        Formula::Rel(..) | Formula::Eq(..) => {
            out.push(f.clone());
            Ok(())
        }
        other => Err(format!("premise contains `{other}`, which is not an atom")),
    }
}

fn no_invention(f: &Formula) -> Result<(), String> {
    let args: Vec<&Term> = match f {
        Formula::Rel(_, args) => args.iter().collect(),
        Formula::Eq(l, r) => vec![l, r],
        _ => Vec::new(),
    };
    for t in args {
        if let Term::App(name, a) = t {
            if !a.is_empty() {
                return Err(format!("function application `{name}(..)` would invent terms"));
            }
        }
    }
    Ok(())
}

/// Splits the axioms into Horn rules and the rest; nothing is dropped.
pub fn horn_partition(t: &Theory) -> (Vec<HornRule>, Vec<Rejected>) {
    let mut rules = Vec::new();
    let mut rejected = Vec::new();
    for ax in &t.axioms {
        let s = &ax.sequent;
        let res = (|| {
            let mut body = Vec::new();
            body_atoms(&s.premise, &mut body)?;
            match &s.conclusion {
                Formula::Rel(..) | Formula::Eq(..) | Formula::Bottom => {}
                other => return Err(format!("conclusion `{other}` is not a single atom or false")),
            }
            for a in body.iter().chain([&s.conclusion]) {
                no_invention(a)?;
            }
            Ok(body)
        })();
        match res {
            Ok(body) => rules.push(HornRule {
                name: ax.name.clone(),
                context: s.context.clone(),
                premise: s.premise.clone(),
                body,
                head: s.conclusion.clone(),
                origin: RuleOrigin::Axiom,
            }),
            Err(reason) => rejected.push(Rejected {
                axiom: ax.name.clone(),
                sequent: s.clone(),
                reason,
            }),
        }
    }
    (rules, rejected)
}

fn mentions_eq(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::And(l, r) => mentions_eq(l) || mentions_eq(r),
        Formula::Or(list) => list.iter().any(mentions_eq),
        Formula::Exists(_, b) => mentions_eq(b),
        _ => false,
    }
}

/// Symmetry, transitivity and one rewriting rule per relation argument.
pub fn equality_rules(sig: &Signature) -> Vec<HornRule> {
    let mut out = Vec::new();
    let var = |n: &str, s: &Sort| Variable::new(n, s.clone());
    let eq = |a: &Variable, b: &Variable| Formula::Eq(Term::Var(a.clone()), Term::Var(b.clone()));
    for s in sig.sorts() {
        let (x, y, z) = (var("x", s), var("y", s), var("z", s));
        out.push(HornRule {
            name: format!("eq.sym.{s}"),
            context: Context::new_unchecked(vec![x.clone(), y.clone()]),
            premise: eq(&x, &y),
            body: vec![eq(&x, &y)],
            head: eq(&y, &x),
            origin: RuleOrigin::Builtin,
        });
        out.push(HornRule {
            name: format!("eq.trans.{s}"),
            context: Context::new_unchecked(vec![x.clone(), y.clone(), z.clone()]),
            premise: Formula::and(eq(&x, &y), eq(&y, &z)),
            body: vec![eq(&x, &y), eq(&y, &z)],
            head: eq(&x, &z),
            origin: RuleOrigin::Builtin,
        });
    }
    for r in sig.relations() {
        for i in 0..r.arity() {
            let xs: Vec<Variable> = r
                .arg_sorts
                .iter()
                .enumerate()
                .map(|(j, s)| var(&format!("x{}", j + 1), s))
                .collect();
            let y = var("y", &r.arg_sorts[i]);
            let atom = Formula::rel(r.name.clone(), xs.iter().cloned().map(Term::Var).collect());
            let mut moved: Vec<Term> = xs.iter().cloned().map(Term::Var).collect();
            moved[i] = Term::Var(y.clone());
            let premise = Formula::and(atom.clone(), eq(&xs[i], &y));
            let mut ctx = xs.clone();
            ctx.push(y);
            out.push(HornRule {
                name: format!("eq.rw.{}.{}", r.name, i + 1),
                context: Context::new_unchecked(ctx),
                body: vec![atom, premise_right(&premise)],
                premise,
                head: Formula::rel(r.name.clone(), moved),
                origin: RuleOrigin::Builtin,
            });
        }
    }
    out
}

fn premise_right(f: &Formula) -> Formula {
    match f {
        Formula::And(_, r) => r.as_ref().clone(),
        _ => unreachable!("built as a conjunction"),
    }
}

/// Ground constants of a signature in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Universe {
    pub(crate) names: Vec<String>,
    pub(crate) by_name: HashMap<String, u32>,
    pub(crate) by_sort: Vec<Vec<u32>>,
    pub(crate) sort_of: Vec<usize>,
}

impl Universe {
    fn new(sig: &Signature) -> Self {
        let mut names = Vec::new();
        let mut by_name = HashMap::new();
        let mut by_sort = vec![Vec::new(); sig.sorts().len()];
        let mut sort_of = Vec::new();
        for f in sig.functions().filter(|f| f.arity() == 0) {
            let id = names.len() as u32;
            let s = sig.sorts().iter().position(|s| *s == f.result_sort).expect("sort resolves");
            by_sort[s].push(id);
            sort_of.push(s);
            by_name.insert(f.name.clone(), id);
            names.push(f.name.clone());
        }
        Universe {
            names,
            by_name,
            by_sort,
            sort_of,
        }
    }
}

/// A theory prepared for saturation: its Horn rules, the equality rules
/// when needed, and the constants terms range over.
#[derive(Debug, Clone)]
pub struct Engine {
    theory: Theory,
    rules: Vec<HornRule>,
    eq_rules: Vec<HornRule>,
    rejected: Vec<Rejected>,
    eq_in_rules: bool,
    compiled: saturate::Compiled,
}

impl Engine {
    pub fn new(theory: &Theory) -> Self {
        let (rules, rejected) = horn_partition(theory);
        let eq_in_rules = rules.iter().any(|r| mentions_eq(&r.premise) || mentions_eq(&r.head));
        let eq_rules = equality_rules(&theory.signature);
        let compiled = saturate::Compiled::new(&theory.signature, &rules, &eq_rules);
        Engine {
            theory: theory.clone(),
            rules,
            eq_rules,
            rejected,
            eq_in_rules,
            compiled,
        }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    /// Horn rules from the theory, in declaration order.
    pub fn rules(&self) -> &[HornRule] {
        &self.rules
    }

    pub fn rejected(&self) -> &[Rejected] {
        &self.rejected
    }

    pub fn rule(&self, name: &str) -> Option<&HornRule> {
        self.rules.iter().chain(&self.eq_rules).find(|r| r.name == name)
    }

    /// Constant names in declaration order.
    pub fn constants(&self) -> &[String] {
        &self.compiled.universe.names
    }

    fn validate(&self, atom: &Formula) -> Result<(), EngineError> {
        let bad = |reason: String| EngineError::InvalidPremise {
            atom: atom.to_string(),
            reason,
        };
        match atom {
            Formula::Rel(..) | Formula::Eq(..) | Formula::Bottom => {}
            _ => return Err(bad("not an atom".into())),
        }
        wf_formula(&self.theory.signature, &Context::empty(), atom).map_err(|e| bad(e.to_string()))?;
        no_invention(atom).map_err(bad)
    }

    pub fn saturate(&self, premises: &[Formula], limits: Limits) -> Result<FactBase, EngineError> {
        self.saturate_with(premises, limits, Strategy::SemiNaive)
    }

    pub fn saturate_with(
        &self,
        premises: &[Formula],
        limits: Limits,
        strategy: Strategy,
    ) -> Result<FactBase, EngineError> {
        for p in premises {
            self.validate(p)?;
        }
        let with_eq = self.eq_in_rules || premises.iter().any(mentions_eq);
        self.compiled.run(premises, limits, strategy, with_eq)
    }
}

pub fn is_inconsistent(fb: &FactBase) -> bool {
    fb.contains(&Formula::Bottom)
}

/// Substitution sending each context variable to a named constant.
pub(crate) fn grounding(ctx: &Context, consts: &[String]) -> Substitution {
    Substitution::from_map_unchecked(
        ctx.vars()
            .iter()
            .cloned()
            .zip(consts.iter().map(|c| Term::constant(c.clone())))
            .collect(),
    )
}

#[cfg(test)]
mod tests;
