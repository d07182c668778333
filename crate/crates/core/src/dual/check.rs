use super::{
    claim_eq, conj_eq, conj_set, conj_within, dual_of, object_eq, CoveringClaim, DualError, MorphismKind, SieveProof,
    SieveRule, SieveTag, SiteMorphism, SiteObject,
};
use crate::kernel::ProofPath;
use crate::logic::{substitute, wf_formula, wf_term, Sequent, Theory};

/// Checks `q` bottom-up and returns its conclusion.
pub fn check_sieve_proof(t: &Theory, q: &SieveProof) -> Result<CoveringClaim, DualError> {
    check_at(t, q, ProofPath::root())
}

fn check_at(t: &Theory, q: &SieveProof, path: ProofPath) -> Result<CoveringClaim, DualError> {
    let mut below = Vec::with_capacity(q.children.len());
    for (i, c) in q.children.iter().enumerate() {
        below.push(check_at(t, c, path.child(i))?);
    }
    well_formed(t, &q.conclusion, &path)?;
    let node = Node {
        t,
        path: &path,
        tag: q.rule.tag(),
        claim: &q.conclusion,
    };
    match &q.rule {
        SieveRule::AxiomCover(name) => node.axiom_cover(name, &below),
        SieveRule::Maximality => node.maximality(&below),
        SieveRule::Stability(f) => node.stability(f, &below),
        SieveRule::Transitivity => node.transitivity(&below),
        SieveRule::Widening => node.widening(&below),
    }?;
    Ok(q.conclusion.clone())
}

fn well_formed(t: &Theory, c: &CoveringClaim, path: &ProofPath) -> Result<(), DualError> {
    let obj = |o: &SiteObject| {
        wf_formula(&t.signature, &o.context, &o.formula).map_err(|source| DualError::IllFormedObject {
            path: path.clone(),
            source,
        })
    };
    obj(&c.base)?;
    for m in &c.family {
        obj(&m.source)?;
        obj(&m.target)?;
        if let Some(e) = m.extra() {
            obj(&SiteObject::new(m.target.context.clone(), e.clone()))?;
        }
    }
    Ok(())
}

struct Node<'a> {
    t: &'a Theory,
    path: &'a ProofPath,
    tag: SieveTag,
    claim: &'a CoveringClaim,
}

impl Node<'_> {
    fn mismatch(&self, reason: impl Into<String>) -> DualError {
        DualError::RuleMismatch {
            path: self.path.clone(),
            rule: self.tag,
            reason: reason.into(),
        }
    }

    fn arity(&self, below: &[CoveringClaim], n: usize) -> Result<(), DualError> {
        if below.len() != n {
            return Err(self.mismatch(format!("expected {n} premises, found {}", below.len())));
        }
        Ok(())
    }

    /// A morphism is valid when its kind agrees with its endpoints.
    fn valid(&self, m: &SiteMorphism) -> Result<(), String> {
        match &m.kind {
            MorphismKind::EntailMono { extra } => {
                if m.source.context != m.target.context {
                    return Err("mono changes the context".into());
                }
                let mut expected = conj_set(&m.target.formula);
                expected.extend(conj_set(extra));
                if conj_set(&m.source.formula) != expected {
                    return Err(format!(
                        "source `{}` is not `{} ∧ {}`",
                        m.source.formula, m.target.formula, extra
                    ));
                }
                Ok(())
            }
            MorphismKind::SubstMap { subst } => {
                let tvars = m.target.context.vars();
                if subst.len() != tvars.len() || tvars.iter().any(|v| subst.get(v).is_none()) {
                    return Err("substitution domain must be the target context".into());
                }
                for (v, term) in subst.iter() {
                    let sort = wf_term(&self.t.signature, &m.source.context, term).map_err(|e| e.to_string())?;
                    if sort != v.sort {
                        return Err(format!("`{}` changes sort", v.name));
                    }
                }
                if !conj_eq(&m.source.formula, &substitute(&m.target.formula, subst)) {
                    return Err(format!("source `{}` is not the target substituted", m.source.formula));
                }
                Ok(())
            }
        }
    }

    fn family_valid(&self) -> Result<(), DualError> {
        for (i, m) in self.claim.family.iter().enumerate() {
            if !object_eq(&m.target, &self.claim.base) {
                return Err(self.mismatch(format!("member {i} does not land in the base")));
            }
            self.valid(m).map_err(|r| self.mismatch(format!("member {i}: {r}")))?;
        }
        Ok(())
    }

    fn axiom_cover(&self, name: &str, below: &[CoveringClaim]) -> Result<(), DualError> {
        self.arity(below, 0)?;
        let ax = self.t.axiom(name).ok_or_else(|| DualError::UnknownAxiom {
            path: self.path.clone(),
            name: name.to_string(),
        })?;
        let ctx = &self.claim.base.context;
        let renamed = crate::kernel::ProofTree::axiom(self.t, name, Some(ctx.clone()))
            .map(|p| p.conclusion)
            .map_err(|_| self.mismatch(format!("context does not fit axiom `{}`", ax.name)))?;
        let expected = dual_of(&Sequent::new(ctx.clone(), renamed.premise, renamed.conclusion));
        if !claim_eq(&expected, self.claim) {
            return Err(self.mismatch(format!("claim is not the dual of `{name}`")));
        }
        Ok(())
    }

    fn maximality(&self, below: &[CoveringClaim]) -> Result<(), DualError> {
        self.arity(below, 0)?;
        self.family_valid()?;
        let top = self
            .claim
            .family
            .iter()
            .any(|m| m.extra().is_some() && object_eq(&m.source, &self.claim.base));
        if !top {
            return Err(self.mismatch("no member is an isomorphism onto the base"));
        }
        Ok(())
    }

    fn stability(&self, f: &SiteMorphism, below: &[CoveringClaim]) -> Result<(), DualError> {
        self.arity(below, 1)?;
        let child = &below[0];
        self.valid(f).map_err(|r| self.mismatch(format!("pullback morphism: {r}")))?;
        if !object_eq(&f.target, &child.base) {
            return Err(self.mismatch("pullback morphism does not land in the premise base"));
        }
        let base = f.source.clone();
        let mut family = Vec::with_capacity(child.family.len());
        for (i, m) in child.family.iter().enumerate() {
            let Some(e) = m.extra() else {
                return Err(DualError::PullbackError {
                    path: self.path.clone(),
                    reason: format!("member {i} is not a mono"),
                });
            };
            let e = match &f.kind {
                MorphismKind::EntailMono { .. } => e.clone(),
                MorphismKind::SubstMap { subst } => substitute(e, subst),
            };
            family.push(SiteMorphism::mono(base.clone(), e));
        }
        let expected = CoveringClaim { base, family };
        if !claim_eq(&expected, self.claim) {
            return Err(self.mismatch("claim is not the pullback of the premise"));
        }
        Ok(())
    }

    fn transitivity(&self, below: &[CoveringClaim]) -> Result<(), DualError> {
        let Some((first, rest)) = below.split_first() else {
            return Err(self.mismatch("expected at least one premise"));
        };
        if rest.len() != first.family.len() {
            return Err(self.mismatch(format!(
                "{} members but {} local claims",
                first.family.len(),
                rest.len()
            )));
        }
        let base = first.base.clone();
        let mut family = Vec::new();
        for (i, (m, local)) in first.family.iter().zip(rest).enumerate() {
            let Some(e) = m.extra() else {
                return Err(self.mismatch(format!("member {i} is not a mono")));
            };
            if !object_eq(&local.base, &m.source) {
                return Err(self.mismatch(format!("local claim {} is not over member {i}", i + 1)));
            }
            for n in &local.family {
                let Some(e2) = n.extra() else {
                    return Err(self.mismatch(format!("local claim {} has a non-mono member", i + 1)));
                };
                family.push(SiteMorphism {
                    source: n.source.clone(),
                    target: base.clone(),
                    kind: MorphismKind::EntailMono {
                        extra: crate::logic::Formula::and(e.clone(), e2.clone()),
                    },
                });
            }
        }
        let expected = CoveringClaim { base, family };
        if !claim_eq(&expected, self.claim) {
            return Err(self.mismatch("claim is not the composite family"));
        }
        Ok(())
    }

    fn widening(&self, below: &[CoveringClaim]) -> Result<(), DualError> {
        self.arity(below, 1)?;
        let child = &below[0];
        if !object_eq(&child.base, &self.claim.base) {
            return Err(self.mismatch("base changes"));
        }
        self.family_valid()?;
        for (i, m) in child.family.iter().enumerate() {
            let factors = self.claim.family.iter().any(|w| {
                w.source.context == m.source.context && conj_within(&w.source.formula, &m.source.formula)
            });
            if !factors {
                return Err(self.mismatch(format!("premise member {i} does not factor through the family")));
            }
        }
        Ok(())
    }
}
