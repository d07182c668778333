#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use obsdual_core::logic::{
    sequent_alpha_eq, Context, Formula, FunctionSymbol, RelationSymbol, Sequent, Signature, Sort, Term,
    Theory, Variable,
};

pub fn theory_alpha_eq(a: &Theory, b: &Theory) -> bool {
    a.id == b.id
        && a.signature == b.signature
        && a.axioms.len() == b.axioms.len()
        && a.axioms
            .iter()
            .zip(&b.axioms)
            .all(|(x, y)| x.name == y.name && sequent_alpha_eq(&x.sequent, &y.sequent))
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    sig: &'a Signature,
}

impl<R: Rng> Gen<'_, R> {
    fn term(&mut self, sort: &Sort, scope: &[Variable], depth: usize) -> Term {
        let vars: Vec<&Variable> = scope.iter().filter(|v| &v.sort == sort).collect();
        let funcs: Vec<&FunctionSymbol> = self
            .sig
            .functions()
            .filter(|f| &f.result_sort == sort && (depth > 0 || f.arity() == 0))
            .collect();
        if !vars.is_empty() && (funcs.is_empty() || self.rng.gen_bool(0.6)) {
            return Term::Var((*vars.choose(self.rng).unwrap()).clone());
        }
        let f = (*funcs.choose(self.rng).expect("every sort has a constant")).clone();
        let args = f.arg_sorts.iter().map(|s| self.term(s, scope, depth - 1)).collect();
        Term::App(f.name.clone(), args)
    }

    fn atom(&mut self, scope: &[Variable]) -> Formula {
        let rels: Vec<RelationSymbol> = self.sig.relations().cloned().collect();
        if self.rng.gen_bool(0.2) {
            let sort = self.sig.sorts().choose(self.rng).unwrap().clone();
            return Formula::Eq(self.term(&sort, scope, 1), self.term(&sort, scope, 1));
        }
        let r = rels.choose(self.rng).unwrap();
        Formula::rel(&r.name, r.arg_sorts.iter().map(|s| self.term(s, scope, 1)).collect())
    }

    fn formula(&mut self, scope: &mut Vec<Variable>, depth: usize) -> Formula {
        let pick = if depth == 0 { self.rng.gen_range(0..4) } else { self.rng.gen_range(0..8) };
        match pick {
            0 | 1 => self.atom(scope),
            2 => Formula::Top,
            3 => Formula::Bottom,
            4 | 5 => Formula::and(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            6 => {
                let n = self.rng.gen_range(0..4);
                Formula::Or((0..n).map(|_| self.formula(scope, depth - 1)).collect())
            }
            _ => {
                let free: Vec<&str> = ["x0", "x1", "y", "z"]
                    .into_iter()
                    .filter(|n| scope.iter().all(|v| v.name != *n))
                    .collect();
                let Some(name) = free.choose(self.rng) else {
                    return self.atom(scope);
                };
                let sort = self.sig.sorts().choose(self.rng).unwrap().clone();
                let v = Variable::new(*name, sort);
                scope.push(v.clone());
                let body = self.formula(scope, depth - 1);
                scope.pop();
                Formula::exists(v, body)
            }
        }
    }
}

/// A random well-formed theory exercising every connective, binder
/// shadowing and nested function terms.
pub fn random_theory<R: Rng>(rng: &mut R, id: &str) -> Theory {
    let mut sig = Signature::new();
    let nsorts = rng.gen_range(1..=2);
    let sorts: Vec<Sort> = (0..nsorts).map(|i| Sort::new(format!("S{i}"))).collect();
    for s in &sorts {
        sig.add_sort(s.clone()).unwrap();
    }
    for (i, s) in sorts.iter().enumerate() {
        sig.add_function(FunctionSymbol::constant(format!("k{i}"), s.clone())).unwrap();
    }
    for i in 0..rng.gen_range(0..=2) {
        let arity = rng.gen_range(1..=2);
        let args = (0..arity).map(|_| sorts.choose(rng).unwrap().clone()).collect();
        sig.add_function(FunctionSymbol::new(format!("f{i}"), args, sorts.choose(rng).unwrap().clone()))
            .unwrap();
    }
    for i in 0..rng.gen_range(1..=3) {
        let arity = rng.gen_range(1..=3);
        let args = (0..arity).map(|_| sorts.choose(rng).unwrap().clone()).collect();
        sig.add_relation(RelationSymbol::new(format!("R{i}"), args)).unwrap();
    }
    let mut t = Theory::new(id, sig.clone());
    for i in 0..rng.gen_range(0..=4) {
        let ctx: Vec<Variable> = (0..rng.gen_range(0..=3))
            .map(|j| Variable::new(format!("v{j}"), sorts.choose(rng).unwrap().clone()))
            .collect();
        let mut g = Gen { rng: &mut *rng, sig: &sig };
        let mut scope = ctx.clone();
        let premise = g.formula(&mut scope, 2);
        let conclusion = g.formula(&mut scope, 3);
        t.add_axiom(format!("ax{i}"), Sequent::new(Context::new(ctx).unwrap(), premise, conclusion))
            .unwrap();
    }
    t
}

/// A random range-restricted Horn theory over constants `c0..` together
/// with ground premises from which at least one new fact follows.
pub struct HornInstance {
    pub theory: Theory,
    pub constants: Vec<String>,
    pub premises: Vec<Formula>,
}

pub fn random_horn<R: Rng>(rng: &mut R) -> HornInstance {
    loop {
        let h = horn_candidate(rng);
        if naive_closure(&h.theory, &h.constants, &h.premises).len() > h.premises.len() {
            return h;
        }
    }
}

fn horn_candidate<R: Rng>(rng: &mut R) -> HornInstance {
    let v = Sort::new("V");
    let mut sig = Signature::new();
    sig.add_sort(v.clone()).unwrap();
    let constants: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| format!("c{i}")).collect();
    for c in &constants {
        sig.add_function(FunctionSymbol::constant(c, v.clone())).unwrap();
    }
    let rels: Vec<(String, usize)> = (0..rng.gen_range(1..=3))
        .map(|i| (format!("P{i}"), rng.gen_range(1..=2)))
        .collect();
    for (name, arity) in &rels {
        sig.add_relation(RelationSymbol::new(name, vec![v.clone(); *arity])).unwrap();
    }
    let pool: Vec<Variable> = ["x", "y", "z"].iter().map(|n| Variable::new(*n, v.clone())).collect();
    let mut t = Theory::new("H", sig);
    let atom = |rng: &mut R, args: &[Term]| {
        let (name, arity) = rels.choose(rng).unwrap();
        Formula::rel(name, (0..*arity).map(|_| args.choose(rng).unwrap().clone()).collect())
    };
    let vars: Vec<Term> = pool.iter().cloned().map(Term::Var).collect();
    for i in 0..rng.gen_range(1..=6) {
        let body: Vec<Formula> = (0..rng.gen_range(1..=3)).map(|_| atom(rng, &vars)).collect();
        let mut bound = BTreeSet::new();
        for b in &body {
            bound.extend(b.free_vars());
        }
        let in_body: Vec<Term> = bound.iter().cloned().map(Term::Var).collect();
        let head = atom(rng, &in_body);
        let ctx: Vec<Variable> = pool.iter().filter(|x| bound.contains(*x)).cloned().collect();
        t.add_axiom(format!("r{i}"), Sequent::new(Context::new(ctx).unwrap(), Formula::conj(body), head))
            .unwrap();
    }
    let consts: Vec<Term> = constants.iter().map(Term::constant).collect();
    let seeded = t.axioms.choose(rng).unwrap().clone();
    let env: BTreeMap<&Variable, &String> = seeded
        .sequent
        .context
        .vars()
        .iter()
        .map(|v| (v, constants.choose(rng).unwrap()))
        .collect();
    let mut premises: Vec<Formula> = body_atoms(&seeded.sequent.premise).iter().map(|b| ground(b, &env)).collect();
    for _ in 0..rng.gen_range(0..=3) {
        premises.push(atom(rng, &consts));
    }
    premises.sort();
    premises.dedup();
    HornInstance {
        theory: t,
        constants,
        premises,
    }
}

fn ground_term(t: &Term, env: &BTreeMap<&Variable, &String>) -> Term {
    match t {
        Term::Var(v) => Term::constant(env[v].as_str()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| ground_term(a, env)).collect()),
    }
}

fn ground(f: &Formula, env: &BTreeMap<&Variable, &String>) -> Formula {
    match f {
        Formula::Rel(r, args) => Formula::rel(r, args.iter().map(|a| ground_term(a, env)).collect()),
        other => panic!("not a Horn atom: {other:?}"),
    }
}

fn body_atoms(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Top => Vec::new(),
        Formula::And(l, r) => [body_atoms(l), body_atoms(r)].concat(),
        atom => vec![atom.clone()],
    }
}

/// Naive fixpoint over every assignment of constants to rule variables.
pub fn naive_closure(t: &Theory, constants: &[String], premises: &[Formula]) -> BTreeSet<Formula> {
    let mut facts: BTreeSet<Formula> = premises.iter().cloned().collect();
    loop {
        let mut added = Vec::new();
        for ax in &t.axioms {
            let vars = ax.sequent.context.vars();
            let body = body_atoms(&ax.sequent.premise);
            let mut idx = vec![0usize; vars.len()];
            loop {
                let env: BTreeMap<&Variable, &String> = vars.iter().zip(&idx).map(|(v, &i)| (v, &constants[i])).collect();
                if body.iter().all(|b| facts.contains(&ground(b, &env))) {
                    let head = ground(&ax.sequent.conclusion, &env);
                    if !facts.contains(&head) {
                        added.push(head);
                    }
                }
                let Some(k) = (0..idx.len()).find(|&k| idx[k] + 1 < constants.len()) else {
                    break;
                };
                idx[k] += 1;
                idx[..k].iter_mut().for_each(|i| *i = 0);
            }
        }
        if added.is_empty() {
            return facts;
        }
        facts.extend(added);
    }
}

fn replace_term(t: &Term, map: &BTreeMap<String, Variable>) -> Term {
    match t {
        Term::App(c, args) if args.is_empty() && map.contains_key(c) => Term::Var(map[c].clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| replace_term(a, map)).collect()),
        v => v.clone(),
    }
}

fn replace(f: &Formula, map: &BTreeMap<String, Variable>) -> Formula {
    match f {
        Formula::Rel(r, args) => Formula::rel(r, args.iter().map(|a| replace_term(a, map)).collect()),
        Formula::Eq(l, r) => Formula::Eq(replace_term(l, map), replace_term(r, map)),
        Formula::And(l, r) => Formula::and(replace(l, map), replace(r, map)),
        Formula::Or(list) => Formula::Or(list.iter().map(|g| replace(g, map)).collect()),
        Formula::Exists(v, body) => Formula::exists(v.clone(), replace(body, map)),
        other => other.clone(),
    }
}

/// Turns the named constants of a sequent into context variables, so the
/// sequent can be checked in models of the theory without those constants.
pub fn generalize(s: &Sequent, constants: &[(String, Sort)]) -> Sequent {
    let map: BTreeMap<String, Variable> = constants
        .iter()
        .map(|(c, sort)| (c.clone(), Variable::new(format!("g_{c}"), sort.clone())))
        .collect();
    let mut ctx = s.context.vars().to_vec();
    ctx.extend(map.values().cloned());
    Sequent::new(
        Context::new(ctx).unwrap(),
        replace(&s.premise, &map),
        replace(&s.conclusion, &map),
    )
}
