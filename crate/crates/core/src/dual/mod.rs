//! Covering claims over the syntactic site and the sieve calculus.
//!
//! A sequent `φ ⊢_x ψ` corresponds to the claim that the sieve generated by
//! `[x | φ ∧ ψ] ↪ [x | φ]` covers `[x | φ]`. Sieve proofs use five rules:
//!
//! * `axiom_cover`: the dual of an axiom;
//! * `maximality`: a family containing an isomorphism onto the base;
//! * `stability`: pullback of a claim along a morphism into its base;
//! * `transitivity`: a claim on the base plus one claim per family source;
//! * `widening`: replacing a family by one it factors through.
//!
//! Objects are compared up to their set of conjuncts (alpha-equivalent
//! conjuncts identified, `⊤` dropped), which is how pullbacks by
//! conjunction are computed.

mod check;
mod search;
mod translate;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::kernel::{KernelError, ProofPath, RuleTag};
use crate::logic::{alpha_key, wf_sequent, Context, Formula, LogicError, Sequent, Substitution, Theory};

pub use check::check_sieve_proof;
pub use search::{kernel_search, sieve_search, KernelSearch, SearchSpace, SieveSearch};
pub use translate::{compile_proof, dualize_proof};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteObject {
    pub context: Context,
    pub formula: Formula,
}

impl SiteObject {
    pub fn new(context: Context, formula: Formula) -> Self {
        SiteObject { context, formula }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MorphismKind {
    /// `[x | φ ∧ ψ] ↪ [x | φ]` with `ψ` the extra conjunct.
    EntailMono { extra: Formula },
    /// Context morphism `[y | φ[s]] → [x | φ]` for `s` from `x` to terms
    /// over `y`.
    SubstMap { subst: Substitution },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteMorphism {
    pub source: SiteObject,
    pub target: SiteObject,
    pub kind: MorphismKind,
}

impl SiteMorphism {
    pub fn mono(target: SiteObject, extra: Formula) -> Self {
        let source = SiteObject::new(
            target.context.clone(),
            Formula::and(target.formula.clone(), extra.clone()),
        );
        SiteMorphism {
            source,
            target,
            kind: MorphismKind::EntailMono { extra },
        }
    }

    pub fn extra(&self) -> Option<&Formula> {
        match &self.kind {
            MorphismKind::EntailMono { extra } => Some(extra),
            MorphismKind::SubstMap { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoveringClaim {
    pub base: SiteObject,
    pub family: Vec<SiteMorphism>,
}

impl CoveringClaim {
    /// The sequent whose dual this is, when the family is a single mono.
    pub fn as_sequent(&self) -> Option<Sequent> {
        match self.family.as_slice() {
            [m] => m.extra().map(|e| {
                Sequent::new(self.base.context.clone(), self.base.formula.clone(), e.clone())
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SieveTag {
    AxiomCover,
    Maximality,
    Stability,
    Transitivity,
    Widening,
}

impl SieveTag {
    pub const ALL: [SieveTag; 5] = [
        SieveTag::AxiomCover,
        SieveTag::Maximality,
        SieveTag::Stability,
        SieveTag::Transitivity,
        SieveTag::Widening,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SieveTag::AxiomCover => "axiom_cover",
            SieveTag::Maximality => "maximality",
            SieveTag::Stability => "stability",
            SieveTag::Transitivity => "transitivity",
            SieveTag::Widening => "widening",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        SieveTag::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for SieveTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SieveRule {
    AxiomCover(String),
    Maximality,
    Stability(SiteMorphism),
    Transitivity,
    Widening,
}

impl SieveRule {
    pub fn tag(&self) -> SieveTag {
        match self {
            SieveRule::AxiomCover(_) => SieveTag::AxiomCover,
            SieveRule::Maximality => SieveTag::Maximality,
            SieveRule::Stability(_) => SieveTag::Stability,
            SieveRule::Transitivity => SieveTag::Transitivity,
            SieveRule::Widening => SieveTag::Widening,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SieveProof {
    pub rule: SieveRule,
    pub children: Vec<SieveProof>,
    pub conclusion: CoveringClaim,
}

impl SieveProof {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(SieveProof::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(SieveProof::depth).max().unwrap_or(0)
    }

    pub fn at_mut(&mut self, path: &ProofPath) -> Option<&mut SieveProof> {
        let mut node = self;
        for &i in &path.0 {
            node = node.children.get_mut(i)?;
        }
        Some(node)
    }

    pub fn paths(&self) -> Vec<ProofPath> {
        let mut out = Vec::new();
        let mut stack = vec![(self, ProofPath::root())];
        while let Some((node, path)) = stack.pop() {
            for (i, c) in node.children.iter().enumerate().rev() {
                stack.push((c, path.child(i)));
            }
            out.push(path);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("ill-formed sequent: {0}")]
    IllFormedSequent(LogicError),
    #[error("at {path}: ill-formed object: {source}")]
    IllFormedObject { path: ProofPath, source: LogicError },
    #[error("at {path}: {rule} does not apply: {reason}")]
    RuleMismatch {
        path: ProofPath,
        rule: SieveTag,
        reason: String,
    },
    #[error("at {path}: unknown axiom `{name}`")]
    UnknownAxiom { path: ProofPath, name: String },
    #[error("at {path}: cannot pull back: {reason}")]
    PullbackError { path: ProofPath, reason: String },
    #[error("at {path}: rule {tag} has no sieve counterpart")]
    UnsupportedRule { path: ProofPath, tag: RuleTag },
    #[error("not a dual statement: {reason}")]
    NotADualStatement { reason: String },
    #[error("at {path}: cannot compile: {reason}")]
    CompileFailed { path: ProofPath, reason: String },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl DualError {
    pub fn path(&self) -> Option<&ProofPath> {
        match self {
            DualError::IllFormedObject { path, .. }
            | DualError::RuleMismatch { path, .. }
            | DualError::UnknownAxiom { path, .. }
            | DualError::PullbackError { path, .. }
            | DualError::UnsupportedRule { path, .. }
            | DualError::CompileFailed { path, .. } => Some(path),
            _ => None,
        }
    }
}

/// Conjuncts up to alpha-equivalence, flattened, without `⊤`.
pub fn conj_set(f: &Formula) -> BTreeSet<Formula> {
    fn go(f: &Formula, out: &mut BTreeSet<Formula>) {
        match f {
            Formula::And(l, r) => {
                go(l, out);
                go(r, out);
            }
            Formula::Top => {}
            other => {
                out.insert(alpha_key(other));
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

pub fn conj_eq(a: &Formula, b: &Formula) -> bool {
    conj_set(a) == conj_set(b)
}

/// Every conjunct of `a` is a conjunct of `b`.
pub fn conj_within(a: &Formula, b: &Formula) -> bool {
    conj_set(a).is_subset(&conj_set(b))
}

pub fn object_eq(a: &SiteObject, b: &SiteObject) -> bool {
    a.context == b.context && conj_eq(&a.formula, &b.formula)
}

pub fn morphism_eq(a: &SiteMorphism, b: &SiteMorphism) -> bool {
    object_eq(&a.source, &b.source)
        && object_eq(&a.target, &b.target)
        && match (&a.kind, &b.kind) {
            (MorphismKind::EntailMono { extra: x }, MorphismKind::EntailMono { extra: y }) => conj_eq(x, y),
            (MorphismKind::SubstMap { subst: s }, MorphismKind::SubstMap { subst: t }) => s == t,
            _ => false,
        }
}

/// Same base and the same family, member by member.
pub fn claim_eq(a: &CoveringClaim, b: &CoveringClaim) -> bool {
    object_eq(&a.base, &b.base)
        && a.family.len() == b.family.len()
        && a.family.iter().zip(&b.family).all(|(x, y)| morphism_eq(x, y))
}

/// `σ*`: the single mono `[x | φ ∧ ψ] ↪ [x | φ]` over `[x | φ]`.
pub fn dualize_statement(t: &Theory, s: &Sequent) -> Result<CoveringClaim, DualError> {
    wf_sequent(&t.signature, s).map_err(DualError::IllFormedSequent)?;
    Ok(dual_of(s))
}

pub(crate) fn dual_of(s: &Sequent) -> CoveringClaim {
    let base = SiteObject::new(s.context.clone(), s.premise.clone());
    CoveringClaim {
        family: vec![SiteMorphism::mono(base.clone(), s.conclusion.clone())],
        base,
    }
}
