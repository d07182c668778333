//! Proof trees for observable logic and their checker.
//!
//! The calculus has sixteen rules plus axiom instances:
//!
//! | rule | shape |
//! |---|---|
//! | identity | `φ ⊢ φ` |
//! | cut | `φ ⊢ ψ`, `ψ ⊢ χ` / `φ ⊢ χ` |
//! | subst | `φ ⊢_y ψ` / `φ[s] ⊢_x ψ[s]` for `s : y → terms(x)` |
//! | truth | `φ ⊢ ⊤` |
//! | falsum | `⊥ ⊢ φ` |
//! | and_elim_l, and_elim_r | `φ ∧ ψ ⊢ φ`, `φ ∧ ψ ⊢ ψ` |
//! | and_intro | `φ ⊢ ψ`, `φ ⊢ χ` / `φ ⊢ ψ ∧ χ` |
//! | or_intro | `ψ_i ⊢ ⋁ ψ` |
//! | or_elim | `ψ_i ⊢ χ` for all `i` / `⋁ ψ ⊢ χ` |
//! | exists_fwd | `φ ⊢_{x,y} ψ` / `∃y φ ⊢_x ψ` |
//! | exists_bwd | `∃y φ ⊢_x ψ` / `φ ⊢_{x,y} ψ` |
//! | eq_refl | `⊤ ⊢_x v = v` |
//! | eq_subst | `(v = w) ∧ φ ⊢ φ[w/v]` |
//! | frobenius | `φ ∧ ∃y ψ ⊢ ∃y (φ ∧ ψ)` |
//! | distributivity | `φ ∧ ⋁ ψ ⊢ ⋁ (φ ∧ ψ_i)` |
//!
//! Axiom nodes conclude a theory axiom up to a positional renaming of its
//! context; any other instantiation goes through `subst`.

mod check;
mod derived;

use std::fmt;

use thiserror::Error;

use crate::logic::{
    alpha_eq, substitute, Context, Formula, LogicError, Sequent, Substitution, Term, Theory, Variable,
};

pub use check::check_proof;
pub use derived::{conj_project, rearrange};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    Axiom,
    Identity,
    Cut,
    Subst,
    Truth,
    Falsum,
    AndElimL,
    AndElimR,
    AndIntro,
    OrIntro,
    OrElim,
    ExistsFwd,
    ExistsBwd,
    EqRefl,
    EqSubst,
    Frobenius,
    Distributivity,
}

impl RuleTag {
    pub const ALL: [RuleTag; 17] = [
        RuleTag::Axiom,
        RuleTag::Identity,
        RuleTag::Cut,
        RuleTag::Subst,
        RuleTag::Truth,
        RuleTag::Falsum,
        RuleTag::AndElimL,
        RuleTag::AndElimR,
        RuleTag::AndIntro,
        RuleTag::OrIntro,
        RuleTag::OrElim,
        RuleTag::ExistsFwd,
        RuleTag::ExistsBwd,
        RuleTag::EqRefl,
        RuleTag::EqSubst,
        RuleTag::Frobenius,
        RuleTag::Distributivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::Axiom => "axiom",
            RuleTag::Identity => "identity",
            RuleTag::Cut => "cut",
            RuleTag::Subst => "subst",
            RuleTag::Truth => "truth",
            RuleTag::Falsum => "falsum",
            RuleTag::AndElimL => "and_elim_l",
            RuleTag::AndElimR => "and_elim_r",
            RuleTag::AndIntro => "and_intro",
            RuleTag::OrIntro => "or_intro",
            RuleTag::OrElim => "or_elim",
            RuleTag::ExistsFwd => "exists_fwd",
            RuleTag::ExistsBwd => "exists_bwd",
            RuleTag::EqRefl => "eq_refl",
            RuleTag::EqSubst => "eq_subst",
            RuleTag::Frobenius => "frobenius",
            RuleTag::Distributivity => "distributivity",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleTag> {
        RuleTag::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule together with its payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom(String),
    Identity,
    Cut,
    Subst(Substitution),
    Truth,
    Falsum,
    AndElimL,
    AndElimR,
    AndIntro,
    OrIntro(usize),
    OrElim,
    ExistsFwd(Variable),
    ExistsBwd(Variable),
    EqRefl(Variable),
    EqSubst(Variable, Variable),
    Frobenius,
    Distributivity,
}

impl Rule {
    pub fn tag(&self) -> RuleTag {
        match self {
            Rule::Axiom(_) => RuleTag::Axiom,
            Rule::Identity => RuleTag::Identity,
            Rule::Cut => RuleTag::Cut,
            Rule::Subst(_) => RuleTag::Subst,
            Rule::Truth => RuleTag::Truth,
            Rule::Falsum => RuleTag::Falsum,
            Rule::AndElimL => RuleTag::AndElimL,
            Rule::AndElimR => RuleTag::AndElimR,
            Rule::AndIntro => RuleTag::AndIntro,
            Rule::OrIntro(_) => RuleTag::OrIntro,
            Rule::OrElim => RuleTag::OrElim,
            Rule::ExistsFwd(_) => RuleTag::ExistsFwd,
            Rule::ExistsBwd(_) => RuleTag::ExistsBwd,
            Rule::EqRefl(_) => RuleTag::EqRefl,
            Rule::EqSubst(..) => RuleTag::EqSubst,
            Rule::Frobenius => RuleTag::Frobenius,
            Rule::Distributivity => RuleTag::Distributivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProofTree {
    pub rule: Rule,
    pub premises: Vec<ProofTree>,
    pub conclusion: Sequent,
}

/// Location of a node: child indices from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProofPath(pub Vec<usize>);

impl ProofPath {
    pub fn root() -> Self {
        Self::default()
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        ProofPath(v)
    }

    pub fn is_prefix_of(&self, other: &ProofPath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for ProofPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("at {path}: {rule} does not apply: {reason}")]
    RuleMismatch {
        path: ProofPath,
        rule: RuleTag,
        reason: String,
    },
    #[error("at {path}: unknown axiom `{name}`")]
    UnknownAxiom { path: ProofPath, name: String },
    #[error("at {path}: ill-formed sequent: {source}")]
    IllFormedSequent { path: ProofPath, source: LogicError },
    #[error("at {path}: bad {rule} payload: {reason}")]
    PayloadError {
        path: ProofPath,
        rule: RuleTag,
        reason: String,
    },
    #[error("{rule}: precondition violated: {condition}")]
    PreconditionViolated { rule: RuleTag, condition: String },
}

impl KernelError {
    pub fn path(&self) -> Option<&ProofPath> {
        match self {
            KernelError::RuleMismatch { path, .. }
            | KernelError::UnknownAxiom { path, .. }
            | KernelError::IllFormedSequent { path, .. }
            | KernelError::PayloadError { path, .. } => Some(path),
            KernelError::PreconditionViolated { .. } => None,
        }
    }
}

fn violated(rule: RuleTag, condition: impl Into<String>) -> KernelError {
    KernelError::PreconditionViolated {
        rule,
        condition: condition.into(),
    }
}

fn leaf(rule: Rule, context: Context, premise: Formula, conclusion: Formula) -> ProofTree {
    ProofTree {
        rule,
        premises: Vec::new(),
        conclusion: Sequent::new(context, premise, conclusion),
    }
}

impl ProofTree {
    pub fn tag(&self) -> RuleTag {
        self.rule.tag()
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::size).sum::<usize>()
    }

    /// Height; a single node has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(ProofTree::depth).max().unwrap_or(0)
    }

    /// Node at `path`, if any.
    pub fn at(&self, path: &ProofPath) -> Option<&ProofTree> {
        let mut node = self;
        for &i in &path.0 {
            node = node.premises.get(i)?;
        }
        Some(node)
    }

    pub fn at_mut(&mut self, path: &ProofPath) -> Option<&mut ProofTree> {
        let mut node = self;
        for &i in &path.0 {
            node = node.premises.get_mut(i)?;
        }
        Some(node)
    }

    /// Every node path in pre-order.
    pub fn paths(&self) -> Vec<ProofPath> {
        let mut out = Vec::new();
        let mut stack = vec![(self, ProofPath::root())];
        while let Some((node, path)) = stack.pop() {
            for (i, child) in node.premises.iter().enumerate().rev() {
                stack.push((child, path.child(i)));
            }
            out.push(path);
        }
        out
    }

    /// The axiom itself, renamed positionally onto `context`.
    pub fn axiom(theory: &Theory, name: &str, context: Option<Context>) -> Result<ProofTree, KernelError> {
        let ax = theory
            .axiom(name)
            .ok_or_else(|| violated(RuleTag::Axiom, format!("no axiom named `{name}`")))?;
        let seq = match context {
            None => ax.sequent.clone(),
            Some(ctx) => {
                let from = ax.sequent.context.vars();
                if from.len() != ctx.len() || from.iter().zip(ctx.vars()).any(|(a, b)| a.sort != b.sort) {
                    return Err(violated(RuleTag::Axiom, "renaming must preserve context length and sorts"));
                }
                let r = Substitution::renaming(from.iter().cloned().zip(ctx.vars().iter().cloned()))
                    .map_err(|e| violated(RuleTag::Axiom, e.to_string()))?;
                Sequent::new(
                    ctx,
                    substitute(&ax.sequent.premise, &r),
                    substitute(&ax.sequent.conclusion, &r),
                )
            }
        };
        Ok(ProofTree {
            rule: Rule::Axiom(name.to_string()),
            premises: Vec::new(),
            conclusion: seq,
        })
    }

    pub fn identity(ctx: Context, f: Formula) -> ProofTree {
        leaf(Rule::Identity, ctx, f.clone(), f)
    }

    pub fn cut(p1: ProofTree, p2: ProofTree) -> Result<ProofTree, KernelError> {
        let (a, b) = (&p1.conclusion, &p2.conclusion);
        if a.context != b.context {
            return Err(violated(RuleTag::Cut, "premises have different contexts"));
        }
        if !alpha_eq(&a.conclusion, &b.premise) {
            return Err(violated(
                RuleTag::Cut,
                format!("`{}` does not match `{}`", a.conclusion, b.premise),
            ));
        }
        let conclusion = Sequent::new(a.context.clone(), a.premise.clone(), b.conclusion.clone());
        Ok(ProofTree {
            rule: Rule::Cut,
            premises: vec![p1, p2],
            conclusion,
        })
    }

    /// Re-expresses `p` in `ctx` along `s`, which must map every variable of
    /// `p`'s context to a term over `ctx`.
    pub fn subst(p: ProofTree, s: Substitution, ctx: Context) -> Result<ProofTree, KernelError> {
        let from = &p.conclusion.context;
        if s.len() != from.len() || from.vars().iter().any(|v| s.get(v).is_none()) {
            return Err(violated(
                RuleTag::Subst,
                "substitution domain must be exactly the premise context",
            ));
        }
        for (_, t) in s.iter() {
            let mut vs = Default::default();
            t.vars(&mut vs);
            if let Some(v) = vs.iter().find(|v| !ctx.contains(v)) {
                return Err(violated(
                    RuleTag::Subst,
                    format!("`{}` is not in the target context", v.name),
                ));
            }
        }
        let conclusion = Sequent::new(
            ctx,
            substitute(&p.conclusion.premise, &s),
            substitute(&p.conclusion.conclusion, &s),
        );
        Ok(ProofTree {
            rule: Rule::Subst(s),
            premises: vec![p],
            conclusion,
        })
    }

    pub fn truth(ctx: Context, f: Formula) -> ProofTree {
        leaf(Rule::Truth, ctx, f, Formula::Top)
    }

    pub fn falsum(ctx: Context, f: Formula) -> ProofTree {
        leaf(Rule::Falsum, ctx, Formula::Bottom, f)
    }

    pub fn and_elim_l(ctx: Context, f: Formula, g: Formula) -> ProofTree {
        leaf(Rule::AndElimL, ctx, Formula::and(f.clone(), g), f)
    }

    pub fn and_elim_r(ctx: Context, f: Formula, g: Formula) -> ProofTree {
        leaf(Rule::AndElimR, ctx, Formula::and(f, g.clone()), g)
    }

    pub fn and_intro(p1: ProofTree, p2: ProofTree) -> Result<ProofTree, KernelError> {
        let (a, b) = (&p1.conclusion, &p2.conclusion);
        if a.context != b.context {
            return Err(violated(RuleTag::AndIntro, "premises have different contexts"));
        }
        if !alpha_eq(&a.premise, &b.premise) {
            return Err(violated(RuleTag::AndIntro, "premises have different antecedents"));
        }
        let conclusion = Sequent::new(
            a.context.clone(),
            a.premise.clone(),
            Formula::and(a.conclusion.clone(), b.conclusion.clone()),
        );
        Ok(ProofTree {
            rule: Rule::AndIntro,
            premises: vec![p1, p2],
            conclusion,
        })
    }

    pub fn or_intro(ctx: Context, list: Vec<Formula>, i: usize) -> Result<ProofTree, KernelError> {
        let f = list
            .get(i)
            .cloned()
            .ok_or_else(|| violated(RuleTag::OrIntro, format!("index {i} out of range")))?;
        Ok(leaf(Rule::OrIntro(i), ctx, f, Formula::Or(list)))
    }

    /// Case analysis: one proof `ψ_i ⊢ χ` per disjunct.
    pub fn or_elim(ctx: Context, cases: Vec<ProofTree>, chi: Formula) -> Result<ProofTree, KernelError> {
        for c in &cases {
            if c.conclusion.context != ctx {
                return Err(violated(RuleTag::OrElim, "case has a different context"));
            }
            if !alpha_eq(&c.conclusion.conclusion, &chi) {
                return Err(violated(RuleTag::OrElim, "case concludes something else"));
            }
        }
        let list = cases.iter().map(|c| c.conclusion.premise.clone()).collect();
        Ok(ProofTree {
            rule: Rule::OrElim,
            premises: cases,
            conclusion: Sequent::new(ctx, Formula::Or(list), chi),
        })
    }

    /// From `φ ⊢_{x,v} ψ` infer `∃v φ ⊢_x ψ`.
    pub fn exists_adj_fwd(p: ProofTree, v: Variable) -> Result<ProofTree, KernelError> {
        let seq = &p.conclusion;
        if !seq.context.contains(&v) {
            return Err(violated(RuleTag::ExistsFwd, format!("`{}` is not in the context", v.name)));
        }
        if seq.conclusion.free_vars().contains(&v) {
            return Err(violated(
                RuleTag::ExistsFwd,
                format!("`{}` occurs free in the conclusion", v.name),
            ));
        }
        let conclusion = Sequent::new(
            seq.context.without(&v),
            Formula::exists(v.clone(), seq.premise.clone()),
            seq.conclusion.clone(),
        );
        Ok(ProofTree {
            rule: Rule::ExistsFwd(v),
            premises: vec![p],
            conclusion,
        })
    }

    /// From `∃y φ ⊢_x ψ` infer `φ[v/y] ⊢_{x,v} ψ`.
    pub fn exists_adj_bwd(p: ProofTree, v: Variable) -> Result<ProofTree, KernelError> {
        let seq = &p.conclusion;
        let Formula::Exists(bound, body) = &seq.premise else {
            return Err(violated(RuleTag::ExistsBwd, "premise is not existential"));
        };
        if bound.sort != v.sort {
            return Err(violated(RuleTag::ExistsBwd, "variable sort differs from the binder"));
        }
        if seq.conclusion.free_vars().contains(&v) {
            return Err(violated(
                RuleTag::ExistsBwd,
                format!("`{}` occurs free in the conclusion", v.name),
            ));
        }
        let ctx = seq
            .context
            .with(v.clone())
            .map_err(|e| violated(RuleTag::ExistsBwd, e.to_string()))?;
        let r = Substitution::renaming([(bound.clone(), v.clone())]).expect("sorts checked");
        let conclusion = Sequent::new(ctx, substitute(body, &r), seq.conclusion.clone());
        Ok(ProofTree {
            rule: Rule::ExistsBwd(v),
            premises: vec![p],
            conclusion,
        })
    }

    pub fn eq_refl(ctx: Context, v: Variable) -> Result<ProofTree, KernelError> {
        if !ctx.contains(&v) {
            return Err(violated(RuleTag::EqRefl, format!("`{}` is not in the context", v.name)));
        }
        let eq = Formula::Eq(Term::Var(v.clone()), Term::Var(v.clone()));
        Ok(leaf(Rule::EqRefl(v), ctx, Formula::Top, eq))
    }

    /// `(v = w) ∧ φ ⊢ φ[w/v]`.
    pub fn eq_subst(ctx: Context, v: Variable, w: Variable, f: Formula) -> Result<ProofTree, KernelError> {
        if !ctx.contains(&v) || !ctx.contains(&w) {
            return Err(violated(RuleTag::EqSubst, "both variables must be in the context"));
        }
        let s = Substitution::renaming([(v.clone(), w.clone())])
            .map_err(|e| violated(RuleTag::EqSubst, e.to_string()))?;
        let conclusion = substitute(&f, &s);
        let premise = Formula::and(Formula::Eq(Term::Var(v.clone()), Term::Var(w.clone())), f);
        Ok(leaf(Rule::EqSubst(v, w), ctx, premise, conclusion))
    }

    /// `φ ∧ ∃v ψ ⊢ ∃v (φ ∧ ψ)`; `v` must not occur free in `φ`.
    pub fn frobenius(ctx: Context, f: Formula, v: Variable, g: Formula) -> Result<ProofTree, KernelError> {
        if f.free_vars().contains(&v) {
            return Err(violated(
                RuleTag::Frobenius,
                format!("`{}` occurs free in the left conjunct", v.name),
            ));
        }
        let premise = Formula::and(f.clone(), Formula::exists(v.clone(), g.clone()));
        let conclusion = Formula::exists(v, Formula::and(f, g));
        Ok(leaf(Rule::Frobenius, ctx, premise, conclusion))
    }

    /// `φ ∧ ⋁ ψ ⊢ ⋁ (φ ∧ ψ_i)`.
    pub fn distributivity(ctx: Context, f: Formula, list: Vec<Formula>) -> ProofTree {
        let conclusion = Formula::Or(list.iter().map(|g| Formula::and(f.clone(), g.clone())).collect());
        let premise = Formula::and(f, Formula::Or(list));
        leaf(Rule::Distributivity, ctx, premise, conclusion)
    }
}

pub fn proof_size(p: &ProofTree) -> usize {
    p.size()
}

pub fn proof_depth(p: &ProofTree) -> usize {
    p.depth()
}

#[cfg(test)]
mod tests;
