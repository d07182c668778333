use super::ProofTree;
use crate::logic::{alpha_eq, Context, Formula};

/// `from ⊢ target` where `target` is a conjunct (at any nesting) of `from`,
/// built from identity, and-elimination and cut.
pub fn conj_project(ctx: &Context, from: &Formula, target: &Formula) -> Option<ProofTree> {
    if alpha_eq(from, target) {
        return Some(ProofTree::identity(ctx.clone(), from.clone()));
    }
    let Formula::And(l, r) = from else {
        return None;
    };
    let (l, r) = (l.as_ref(), r.as_ref());
    if let Some(p) = conj_project(ctx, l, target) {
        let elim = ProofTree::and_elim_l(ctx.clone(), l.clone(), r.clone());
        return Some(cut_or_skip(elim, p));
    }
    let p = conj_project(ctx, r, target)?;
    let elim = ProofTree::and_elim_r(ctx.clone(), l.clone(), r.clone());
    Some(cut_or_skip(elim, p))
}

fn cut_or_skip(first: ProofTree, second: ProofTree) -> ProofTree {
    if matches!(second.rule, super::Rule::Identity) {
        return first;
    }
    ProofTree::cut(first, second).expect("adjacent sequents agree")
}

/// `from ⊢ to` whenever every conjunct of `to` other than `⊤` is a conjunct
/// of `from`.
pub fn rearrange(ctx: &Context, from: &Formula, to: &Formula) -> Option<ProofTree> {
    if let Some(p) = conj_project(ctx, from, to) {
        return Some(p);
    }
    match to {
        Formula::Top => Some(ProofTree::truth(ctx.clone(), from.clone())),
        Formula::And(a, b) => {
            let pa = rearrange(ctx, from, a)?;
            let pb = rearrange(ctx, from, b)?;
            Some(ProofTree::and_intro(pa, pb).expect("same antecedent"))
        }
        _ => None,
    }
}
