//! Bounded breadth-first proof search in both calculi over a finite
//! universe of conjunctive statements.
//!
//! The universe fixes one context and a set of formulas closed under taking
//! conjuncts. Every intermediate sequent of a kernel proof must lie in the
//! universe, except axiom leaves, which keep their own context and enter it
//! through substitution. Sieve claims are tracked up to their conjunct sets.
//! Disjunction, existential and equality rules have no instance inside a
//! universe without `∨`, `∃`, `=` or `⊥`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{dual_of, CoveringClaim, MorphismKind, SieveProof, SieveRule, SiteMorphism, SiteObject};
use crate::kernel::ProofTree;
use crate::logic::{substitute, Context, Formula, Sequent, Substitution, Term, Theory, Variable};

#[derive(Debug, Clone)]
pub struct SearchSpace {
    pub theory: Theory,
    pub context: Context,
    pub formulas: Vec<Formula>,
}

impl SearchSpace {
    /// Atoms of every relation over `vars` variables of each sort, `⊤`, and
    /// binary conjunctions of those, up to formula depth `depth` (1 or 2).
    pub fn conjunctive(t: &Theory, vars: usize, depth: usize) -> Self {
        let mut ctx_vars = Vec::new();
        for sort in t.signature.sorts() {
            for i in 0..vars {
                let name = ["x", "y", "z", "w"].get(i).map(|s| s.to_string()).unwrap_or(format!("v{i}"));
                let name = if t.signature.sorts().len() == 1 {
                    name
                } else {
                    format!("{name}_{}", sort.name())
                };
                ctx_vars.push(Variable::new(name, sort.clone()));
            }
        }
        let context = Context::new(ctx_vars).expect("distinct names");
        let mut atoms = Vec::new();
        for rel in t.signature.relations() {
            let choices: Vec<Vec<&Variable>> = rel
                .arg_sorts
                .iter()
                .map(|s| context.vars().iter().filter(|v| &v.sort == s).collect())
                .collect();
            let mut idx = vec![0usize; choices.len()];
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            'odo: loop {
                let args = idx.iter().zip(&choices).map(|(&i, c)| Term::Var(c[i].clone())).collect();
                atoms.push(Formula::rel(rel.name.clone(), args));
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        continue 'odo;
                    }
                    idx[k] = 0;
                }
                break;
            }
        }
        atoms.push(Formula::Top);
        let mut formulas = atoms.clone();
        if depth >= 2 {
            for a in &atoms {
                for b in &atoms {
                    formulas.push(Formula::and(a.clone(), b.clone()));
                }
            }
        }
        SearchSpace {
            theory: t.clone(),
            context,
            formulas,
        }
    }

    pub fn candidates(&self) -> Vec<Sequent> {
        let mut out = Vec::with_capacity(self.formulas.len() * self.formulas.len());
        for p in &self.formulas {
            for c in &self.formulas {
                out.push(Sequent::new(self.context.clone(), p.clone(), c.clone()));
            }
        }
        out
    }

    fn substitutions_from(&self, from: &Context) -> Vec<Substitution> {
        let mut out = vec![Vec::<(Variable, Term)>::new()];
        for v in from.vars() {
            let targets: Vec<&Variable> = self.context.vars().iter().filter(|w| w.sort == v.sort).collect();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    targets.iter().map(move |w| {
                        let mut p = prefix.clone();
                        p.push((v.clone(), Term::Var((*w).clone())));
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|pairs| Substitution::from_map_unchecked(pairs.into_iter().collect()))
            .collect()
    }
}

/// Kernel proofs of height at most `depth`, keyed by conclusion.
#[derive(Debug, Clone, Default)]
pub struct KernelSearch {
    found: HashMap<Sequent, ProofTree>,
    /// Height after which no new statement appeared, if reached.
    pub saturated_at: Option<usize>,
}

impl KernelSearch {
    pub fn len(&self) -> usize {
        self.found.len()
    }

    pub fn is_empty(&self) -> bool {
        self.found.is_empty()
    }

    pub fn proves(&self, s: &Sequent) -> Option<&ProofTree> {
        self.found.get(s)
    }
}

pub fn kernel_search(space: &SearchSpace, depth: usize) -> KernelSearch {
    let t = &space.theory;
    let ctx = &space.context;
    let in_f: BTreeSet<&Formula> = space.formulas.iter().collect();
    let in_u = |s: &Sequent| s.context == *ctx && in_f.contains(&s.premise) && in_f.contains(&s.conclusion);
    let mut found: HashMap<Sequent, ProofTree> = HashMap::new();
    let mut saturated_at = None;
    for level in 1..=depth {
        let mut next: Vec<ProofTree> = Vec::new();
        for f in &space.formulas {
            next.push(ProofTree::identity(ctx.clone(), f.clone()));
            next.push(ProofTree::truth(ctx.clone(), f.clone()));
            if let Formula::And(l, r) = f {
                next.push(ProofTree::and_elim_l(ctx.clone(), l.as_ref().clone(), r.as_ref().clone()));
                next.push(ProofTree::and_elim_r(ctx.clone(), l.as_ref().clone(), r.as_ref().clone()));
            }
        }
        for v in ctx.vars() {
            next.extend(ProofTree::eq_refl(ctx.clone(), v.clone()));
        }
        for ax in &t.axioms {
            next.extend(ProofTree::axiom(t, &ax.name, None));
        }
        let known: Vec<&ProofTree> = found.values().collect();
        let mut by_premise: BTreeMap<&Formula, Vec<&ProofTree>> = BTreeMap::new();
        for p in &known {
            if p.conclusion.context == *ctx {
                by_premise.entry(&p.conclusion.premise).or_default().push(p);
            }
        }
        for p in &known {
            for s in space.substitutions_from(&p.conclusion.context) {
                next.extend(ProofTree::subst((*p).clone(), s, ctx.clone()));
            }
            if p.conclusion.context != *ctx {
                continue;
            }
            if let Some(after) = by_premise.get(&p.conclusion.conclusion) {
                for q in after {
                    next.extend(ProofTree::cut((*p).clone(), (*q).clone()));
                }
            }
            for q in &by_premise[&p.conclusion.premise] {
                let both = Formula::and(p.conclusion.conclusion.clone(), q.conclusion.conclusion.clone());
                if in_f.contains(&both) {
                    next.extend(ProofTree::and_intro((*p).clone(), (*q).clone()));
                }
            }
        }
        let mut grew = false;
        for p in next {
            let axiom_leaf = matches!(p.rule, crate::kernel::Rule::Axiom(_));
            if (axiom_leaf || in_u(&p.conclusion)) && !found.contains_key(&p.conclusion) {
                found.insert(p.conclusion.clone(), p);
                grew = true;
            }
        }
        if !grew {
            saturated_at = Some(level - 1);
            break;
        }
    }
    found.retain(|s, _| in_u(s));
    KernelSearch { found, saturated_at }
}

type Class = (Context, BTreeSet<Formula>, BTreeSet<Formula>);

fn class_of(s: &Sequent) -> Class {
    (s.context.clone(), super::conj_set(&s.premise), super::conj_set(&s.conclusion))
}

fn conj_of(set: &BTreeSet<Formula>) -> Formula {
    Formula::conj(set.iter().cloned().collect())
}

/// Sieve proofs of height at most `depth`, keyed by conjunct classes of
/// their single-member conclusions.
#[derive(Debug, Clone, Default)]
pub struct SieveSearch {
    found: HashMap<Class, SieveProof>,
    pub saturated_at: Option<usize>,
}

impl SieveSearch {
    pub fn len(&self) -> usize {
        self.found.len()
    }

    pub fn is_empty(&self) -> bool {
        self.found.is_empty()
    }

    /// A proof whose conclusion is exactly the dual of `s`.
    pub fn proves(&self, s: &Sequent) -> Option<SieveProof> {
        let mut q = self.found.get(&class_of(s))?.clone();
        q.conclusion = dual_of(s);
        Some(q)
    }
}

fn claim(ctx: &Context, a: &BTreeSet<Formula>, b: &BTreeSet<Formula>) -> CoveringClaim {
    dual_of(&Sequent::new(ctx.clone(), conj_of(a), conj_of(b)))
}

pub fn sieve_search(space: &SearchSpace, depth: usize) -> SieveSearch {
    let t = &space.theory;
    let ctx = &space.context;
    let atoms: Vec<Formula> = space.formulas.iter().filter(|f| f.is_atom()).cloned().collect();
    let classes: BTreeSet<BTreeSet<Formula>> = (0u64..1 << atoms.len())
        .map(|bits| (0..atoms.len()).filter(|i| bits >> i & 1 == 1).map(|i| atoms[i].clone()).collect())
        .collect();
    let in_u = |c: &Class| c.0 == *ctx && classes.contains(&c.1) && classes.contains(&c.2);
    let mut found: HashMap<Class, SieveProof> = HashMap::new();
    let mut saturated_at = None;
    for level in 1..=depth {
        let mut next: Vec<(Class, SieveProof)> = Vec::new();
        let node = |rule, children, c: &Class| {
            (
                c.clone(),
                SieveProof {
                    rule,
                    children,
                    conclusion: claim(&c.0, &c.1, &c.2),
                },
            )
        };
        for ax in &t.axioms {
            let c = class_of(&ax.sequent);
            let mut n = node(SieveRule::AxiomCover(ax.name.clone()), vec![], &c);
            n.1.conclusion = dual_of(&ax.sequent);
            next.push(n);
        }
        for a in &classes {
            for b in &classes {
                if b.is_subset(a) {
                    next.push(node(SieveRule::Maximality, vec![], &(ctx.clone(), a.clone(), b.clone())));
                }
            }
        }
        let known: Vec<(&Class, &SieveProof)> = found.iter().collect();
        let mut by_base: BTreeMap<&BTreeSet<Formula>, Vec<(&Class, &SieveProof)>> = BTreeMap::new();
        for (c, q) in &known {
            if c.0 == *ctx {
                by_base.entry(&c.1).or_default().push((c, q));
            }
        }
        for (c, q) in &known {
            let base = SiteObject::new(c.0.clone(), conj_of(&c.1));
            for s in space.substitutions_from(&c.0) {
                let sub = |set: &BTreeSet<Formula>| set.iter().flat_map(|f| super::conj_set(&substitute(f, &s))).collect();
                let pulled: Class = (ctx.clone(), sub(&c.1), sub(&c.2));
                let f = SiteMorphism {
                    source: SiteObject::new(ctx.clone(), conj_of(&pulled.1)),
                    target: base.clone(),
                    kind: MorphismKind::SubstMap { subst: s },
                };
                next.push(node(SieveRule::Stability(f), vec![(*q).clone()], &pulled));
            }
            if c.0 != *ctx {
                continue;
            }
            for wider in &classes {
                if c.1.is_subset(wider) && c.1 != *wider {
                    let extra: BTreeSet<Formula> = wider.difference(&c.1).cloned().collect();
                    let f = SiteMorphism {
                        source: SiteObject::new(ctx.clone(), conj_of(wider)),
                        target: base.clone(),
                        kind: MorphismKind::EntailMono { extra: conj_of(&extra) },
                    };
                    let pulled = (ctx.clone(), wider.clone(), c.2.clone());
                    next.push(node(SieveRule::Stability(f), vec![(*q).clone()], &pulled));
                }
            }
            let local: BTreeSet<Formula> = c.1.union(&c.2).cloned().collect();
            if let Some(after) = by_base.get(&local) {
                for (d, r) in after {
                    let family: BTreeSet<Formula> = c.2.union(&d.2).cloned().collect();
                    if classes.contains(&family) {
                        let mut n = node(
                            SieveRule::Transitivity,
                            vec![(*q).clone(), (*r).clone()],
                            &(ctx.clone(), c.1.clone(), family),
                        );
                        n.1.conclusion.family[0].kind = MorphismKind::EntailMono {
                            extra: Formula::and(conj_of(&c.2), conj_of(&d.2)),
                        };
                        next.push(n);
                    }
                }
            }
            for b in &classes {
                if b.is_subset(&local) && *b != c.2 {
                    next.push(node(
                        SieveRule::Widening,
                        vec![(*q).clone()],
                        &(ctx.clone(), c.1.clone(), b.clone()),
                    ));
                }
            }
        }
        let mut grew = false;
        for (c, q) in next {
            let axiom_leaf = matches!(q.rule, SieveRule::AxiomCover(_));
            if (axiom_leaf || in_u(&c)) && !found.contains_key(&c) {
                found.insert(c, q);
                grew = true;
            }
        }
        if !grew {
            saturated_at = Some(level - 1);
            break;
        }
    }
    found.retain(|c, _| in_u(c));
    SieveSearch { found, saturated_at }
}
