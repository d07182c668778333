use super::{dual_of, CoveringClaim, DualError, MorphismKind, SieveProof, SieveRule, SiteMorphism, SiteObject};
use crate::kernel::{check_proof, rearrange, ProofPath, ProofTree, Rule};
use crate::logic::{alpha_eq, substitute, Context, Formula, Theory};

/// Translates a kernel-checked proof into a sieve proof of the dual claim.
///
/// Supported rules: axiom, identity, cut, substitution, truth, both
/// and-eliminations and and-introduction.
pub fn dualize_proof(t: &Theory, p: &ProofTree) -> Result<SieveProof, DualError> {
    check_proof(t, p)?;
    dualize_at(p, ProofPath::root())
}

fn dualize_at(p: &ProofTree, path: ProofPath) -> Result<SieveProof, DualError> {
    let conclusion = dual_of(&p.conclusion);
    let ctx = &p.conclusion.context;
    let leaf = |rule| SieveProof {
        rule,
        children: Vec::new(),
        conclusion: conclusion.clone(),
    };
    match &p.rule {
        Rule::Axiom(name) => Ok(leaf(SieveRule::AxiomCover(name.clone()))),
        Rule::Identity | Rule::Truth | Rule::AndElimL | Rule::AndElimR => Ok(leaf(SieveRule::Maximality)),
        Rule::Subst(s) => {
            let child = dualize_at(&p.premises[0], path.child(0))?;
            let from = &p.premises[0].conclusion;
            let f = SiteMorphism {
                source: SiteObject::new(ctx.clone(), substitute(&from.premise, s)),
                target: SiteObject::new(from.context.clone(), from.premise.clone()),
                kind: MorphismKind::SubstMap { subst: s.clone() },
            };
            Ok(SieveProof {
                rule: SieveRule::Stability(f),
                children: vec![child],
                conclusion,
            })
        }
        Rule::Cut | Rule::AndIntro => {
            let d1 = dualize_at(&p.premises[0], path.child(0))?;
            let d2 = dualize_at(&p.premises[1], path.child(1))?;
            let (phi, psi) = (&p.conclusion.premise, &p.premises[0].conclusion.conclusion);
            // Cut pulls the second claim back from `ψ`, and-intro from `φ`.
            let (along, extra) = if matches!(p.rule, Rule::Cut) {
                (SiteObject::new(ctx.clone(), psi.clone()), phi.clone())
            } else {
                (SiteObject::new(ctx.clone(), phi.clone()), psi.clone())
            };
            let f = SiteMorphism {
                source: SiteObject::new(ctx.clone(), Formula::and(phi.clone(), psi.clone())),
                target: along,
                kind: MorphismKind::EntailMono { extra },
            };
            let pulled = pull_back(&f, d2);
            let composite = compose(d1, pulled);
            Ok(SieveProof {
                rule: SieveRule::Widening,
                children: vec![composite],
                conclusion,
            })
        }
        other => Err(DualError::UnsupportedRule { path, tag: other.tag() }),
    }
}

fn pull_back(f: &SiteMorphism, q: SieveProof) -> SieveProof {
    let base = f.source.clone();
    let family = q
        .conclusion
        .family
        .iter()
        .map(|m| SiteMorphism::mono(base.clone(), m.extra().expect("dual claims are monos").clone()))
        .collect();
    SieveProof {
        rule: SieveRule::Stability(f.clone()),
        children: vec![q],
        conclusion: CoveringClaim { base, family },
    }
}

fn compose(first: SieveProof, local: SieveProof) -> SieveProof {
    let base = first.conclusion.base.clone();
    let e = first.conclusion.family[0].extra().expect("dual claims are monos").clone();
    let family = local
        .conclusion
        .family
        .iter()
        .map(|n| SiteMorphism {
            source: n.source.clone(),
            target: base.clone(),
            kind: MorphismKind::EntailMono {
                extra: Formula::and(e.clone(), n.extra().expect("dual claims are monos").clone()),
            },
        })
        .collect();
    SieveProof {
        rule: SieveRule::Transitivity,
        children: vec![first, local],
        conclusion: CoveringClaim { base, family },
    }
}

/// Compiles a sieve proof of a dual claim back to a kernel proof of the
/// sequent it is the dual of.
pub fn compile_proof(t: &Theory, q: &SieveProof) -> Result<ProofTree, DualError> {
    if q.conclusion.as_sequent().is_none() {
        return Err(DualError::NotADualStatement {
            reason: format!("family has {} members", q.conclusion.family.len()),
        });
    }
    super::check_sieve_proof(t, q)?;
    let p = compile_at(t, q, ProofPath::root())?;
    check_proof(t, &p)?;
    Ok(p)
}

fn compile_at(t: &Theory, q: &SieveProof, path: ProofPath) -> Result<ProofTree, DualError> {
    let fail = |reason: &str| DualError::CompileFailed {
        path: path.clone(),
        reason: reason.to_string(),
    };
    let goal = q
        .conclusion
        .as_sequent()
        .ok_or_else(|| fail("intermediate claim has more than one member"))?;
    let ctx = &goal.context;
    let (b, e) = (&goal.premise, &goal.conclusion);
    let sub = |i: usize| compile_at(t, &q.children[i], path.child(i));
    let proof = match &q.rule {
        SieveRule::AxiomCover(name) => ProofTree::axiom(t, name, Some(ctx.clone()))?,
        SieveRule::Maximality => rearrange(ctx, b, e).ok_or_else(|| fail("extra is not a conjunct of the base"))?,
        SieveRule::Stability(f) => {
            let p0 = sub(0)?;
            match &f.kind {
                MorphismKind::EntailMono { .. } => {
                    let into = rearrange(ctx, b, &p0.conclusion.premise)
                        .ok_or_else(|| fail("base does not entail the premise base"))?;
                    ProofTree::cut(into, p0)?
                }
                MorphismKind::SubstMap { subst } => ProofTree::subst(p0, subst.clone(), ctx.clone())?,
            }
        }
        SieveRule::Transitivity => {
            if q.children.len() != 2 {
                return Err(fail("transitivity over more than one member"));
            }
            let p0 = sub(0)?;
            let p1 = sub(1)?;
            let with = keep(ctx, b, p0.clone())?;
            let into = rearrange(ctx, &with.conclusion.conclusion, &p1.conclusion.premise)
                .ok_or_else(|| fail("local base is not reached"))?;
            let reach = ProofTree::cut(ProofTree::cut(with, into)?, p1)?;
            ProofTree::and_intro(p0, reach)?
        }
        SieveRule::Widening => {
            let p0 = sub(0)?;
            keep(ctx, b, p0)?
        }
    };
    adjust(ctx, proof, b, e).ok_or_else(|| fail("conclusion cannot be rearranged to the goal"))
}

/// `b ⊢ b ∧ ψ` from `b ⊢ ψ`.
fn keep(ctx: &Context, b: &Formula, p: ProofTree) -> Result<ProofTree, DualError> {
    Ok(ProofTree::and_intro(ProofTree::identity(ctx.clone(), b.clone()), p)?)
}

/// Wraps `p` with conjunct rearrangements so that it proves exactly `b ⊢ e`.
fn adjust(ctx: &Context, p: ProofTree, b: &Formula, e: &Formula) -> Option<ProofTree> {
    let mut p = p;
    if !alpha_eq(&p.conclusion.premise, b) {
        let pre = rearrange(ctx, b, &p.conclusion.premise)?;
        p = ProofTree::cut(pre, p).ok()?;
    }
    if !alpha_eq(&p.conclusion.conclusion, e) {
        let mut with = p.conclusion.conclusion.clone();
        if !super::conj_within(e, &with) {
            p = keep(ctx, b, p).ok()?;
            with = p.conclusion.conclusion.clone();
        }
        let post = rearrange(ctx, &with, e)?;
        p = ProofTree::cut(p, post).ok()?;
    }
    if !alpha_eq(&p.conclusion.premise, b) || !alpha_eq(&p.conclusion.conclusion, e) {
        return None;
    }
    Some(p)
}
