//! Name resolution and sort inference from syntax items to logic values.

use std::collections::HashMap;

use super::parser::{Item, Named, RawFormula, RawTerm};
use super::{Diagnostics, ParseDiagnostic, SourceFile, Span};
use crate::logic::{
    wf_sequent, Context, FunctionSymbol, Formula, RelationSymbol, Sequent, Signature, Sort, Term, Theory,
    Variable,
};

/// A parsed problem: the theory extended with the declared points as
/// constants, ground atomic premises and an optional goal.
#[derive(Debug, Clone)]
pub struct Problem {
    pub theory_ref: Option<String>,
    pub theory: Theory,
    pub constants: Vec<FunctionSymbol>,
    pub premises: Vec<Formula>,
    pub goal: Option<Formula>,
}

pub fn theory(src: &SourceFile, items: &[Item], base: Option<&Theory>) -> Result<Theory, Diagnostics> {
    let mut diags = Vec::new();
    let mut declared_id: Option<String> = None;
    let mut out = match base {
        Some(t) => t.clone(),
        None => Theory::new(
            src.stem().unwrap_or_else(|| "anonymous".to_string()),
            Signature::new(),
        ),
    };
    for item in items {
        match item {
            Item::Theory(n) => {
                if declared_id.is_some() {
                    diags.push(ParseDiagnostic::error(n.span, "theory name declared twice"));
                } else {
                    declared_id = Some(n.name.clone());
                }
            }
            Item::Axiom {
                name,
                context,
                premise,
                conclusion,
                span,
            } => {
                let resolver = Resolver {
                    sig: &out.signature,
                };
                let Some(seq) = resolver.sequent(context.as_deref(), premise, conclusion, *span, &mut diags) else {
                    continue;
                };
                if let Err(e) = out.add_axiom(name.name.clone(), seq) {
                    diags.push(ParseDiagnostic::error(name.span, e.to_string()));
                }
            }
            Item::Points { names, .. } => {
                diags.push(ParseDiagnostic::error(names[0].span, "`points` is only allowed in problem files"));
            }
            Item::Assume(list) => {
                diags.push(ParseDiagnostic::error(list[0].span(), "`assume` is only allowed in problem files"));
            }
            Item::Goal(f) => {
                diags.push(ParseDiagnostic::error(f.span(), "`goal` is only allowed in problem files"));
            }
            other => declare(&mut out.signature, other, &mut diags),
        }
    }
    if let Some(id) = declared_id {
        out.id = id;
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

fn declare(sig: &mut Signature, item: &Item, diags: &mut Diagnostics) {
    let (res, span) = match item {
        Item::Sort(n) => (sig.add_sort(Sort::new(&n.name)), n.span),
        Item::Fn { name, args, result } => (
            sig.add_function(FunctionSymbol::new(
                &name.name,
                args.iter().map(|a| Sort::new(&a.name)).collect(),
                Sort::new(&result.name),
            )),
            name.span,
        ),
        Item::Rel { name, args } => (
            sig.add_relation(RelationSymbol::new(
                &name.name,
                args.iter().map(|a| Sort::new(&a.name)).collect(),
            )),
            name.span,
        ),
        _ => return,
    };
    if let Err(e) = res {
        diags.push(ParseDiagnostic::error(span, e.to_string()));
    }
}

pub fn problem(items: &[Item], base: &Theory) -> Result<Problem, Diagnostics> {
    let mut diags = Vec::new();
    let mut theory = base.clone();
    let mut theory_ref = None;
    let mut constants = Vec::new();
    let mut premises = Vec::new();
    let mut goal = None;
    for item in items {
        match item {
            Item::Theory(n) => {
                if n.name != base.id {
                    diags.push(ParseDiagnostic::error(
                        n.span,
                        format!("problem refers to theory `{}` but `{}` was loaded", n.name, base.id),
                    ));
                }
                theory_ref = Some(n.name.clone());
            }
            Item::Points { names, sort } => {
                let Some(sort) = points_sort(&theory.signature, names, sort.as_ref(), &mut diags) else {
                    continue;
                };
                for n in names {
                    let c = FunctionSymbol::constant(&n.name, sort.clone());
                    match theory.signature.add_function(c.clone()) {
                        Ok(()) => constants.push(c),
                        Err(e) => diags.push(ParseDiagnostic::error(n.span, e.to_string())),
                    }
                }
            }
            Item::Assume(list) => {
                let resolver = Resolver {
                    sig: &theory.signature,
                };
                for raw in list {
                    if let Some(f) = resolver.closed(raw, "premise", &mut diags) {
                        if !f.is_atom() {
                            diags.push(ParseDiagnostic::error(raw.span(), "premise must be a ground atom"));
                        } else {
                            premises.push(f);
                        }
                    }
                }
            }
            Item::Goal(raw) => {
                if goal.is_some() {
                    diags.push(ParseDiagnostic::error(raw.span(), "goal declared twice"));
                    continue;
                }
                let resolver = Resolver {
                    sig: &theory.signature,
                };
                goal = resolver.closed(raw, "goal", &mut diags);
            }
            Item::Axiom { span, .. } => {
                diags.push(ParseDiagnostic::error(*span, "axioms belong in the theory file"));
            }
            other => declare(&mut theory.signature, other, &mut diags),
        }
    }
    if diags.is_empty() {
        Ok(Problem {
            theory_ref,
            theory,
            constants,
            premises,
            goal,
        })
    } else {
        Err(diags)
    }
}

fn points_sort(sig: &Signature, names: &[Named], sort: Option<&Named>, diags: &mut Diagnostics) -> Option<Sort> {
    if let Some(s) = sort {
        let sort = Sort::new(&s.name);
        if sig.has_sort(&sort) {
            return Some(sort);
        }
        diags.push(ParseDiagnostic::error(s.span, format!("unknown sort `{}`", s.name)));
        return None;
    }
    match sig.sorts() {
        [only] => Some(only.clone()),
        sorts => {
            let point = Sort::new("Point");
            if sorts.contains(&point) {
                Some(point)
            } else {
                diags.push(ParseDiagnostic::error(
                    names[0].span,
                    "cannot choose a sort for these points; write `points a b : S.`",
                ));
                None
            }
        }
    }
}

struct Resolver<'a> {
    sig: &'a Signature,
}

/// Variables visible while converting one formula.
struct Env {
    ctx: Vec<Variable>,
    bound: Vec<Variable>,
}

impl Env {
    fn lookup(&self, name: &str) -> Option<&Variable> {
        self.bound
            .iter()
            .rev()
            .find(|v| v.name == name)
            .or_else(|| self.ctx.iter().find(|v| v.name == name))
    }
}

impl<'a> Resolver<'a> {
    fn is_constant(&self, name: &str) -> bool {
        self.sig.function(name).map(|f| f.arity() == 0).unwrap_or(false)
    }

    fn sequent(
        &self,
        context: Option<&[(Named, Named)]>,
        premise: &RawFormula,
        conclusion: &RawFormula,
        span: Span,
        diags: &mut Diagnostics,
    ) -> Option<Sequent> {
        let before = diags.len();
        let vars = match context {
            Some(pairs) => {
                let mut vars = Vec::new();
                for (v, s) in pairs {
                    let sort = Sort::new(&s.name);
                    if !self.sig.has_sort(&sort) {
                        diags.push(ParseDiagnostic::error(s.span, format!("unknown sort `{}`", s.name)));
                    }
                    if vars.iter().any(|w: &Variable| w.name == v.name) {
                        diags.push(ParseDiagnostic::error(
                            v.span,
                            format!("variable `{}` occurs twice in the context", v.name),
                        ));
                    }
                    vars.push(Variable::new(&v.name, sort));
                }
                vars
            }
            None => self.infer_context(premise, conclusion, diags),
        };
        let env = Env {
            ctx: vars.clone(),
            bound: Vec::new(),
        };
        let mut env = env;
        let p = self.formula(premise, &mut env, diags);
        let c = self.formula(conclusion, &mut env, diags);
        if diags.len() > before {
            return None;
        }
        let seq = Sequent::new(Context::new(vars).ok()?, p?, c?);
        if let Err(e) = wf_sequent(self.sig, &seq) {
            diags.push(ParseDiagnostic::error(span, e.to_string()));
            return None;
        }
        Some(seq)
    }

    /// Free variables of the premise in order of first appearance, with
    /// sorts inferred from argument positions and equations.
    fn infer_context(&self, premise: &RawFormula, conclusion: &RawFormula, diags: &mut Diagnostics) -> Vec<Variable> {
        let mut order: Vec<(String, Span)> = Vec::new();
        collect_free_names(premise, &mut Vec::new(), &mut |name, span| {
            if !self.is_constant(name) && !order.iter().any(|(n, _)| n == name) {
                order.push((name.to_string(), span));
            }
        });
        let mut sorts: HashMap<String, Sort> = HashMap::new();
        loop {
            let mut changed = false;
            for f in [premise, conclusion] {
                self.infer(f, &mut Vec::new(), &order, &mut sorts, &mut changed, diags);
            }
            if !changed {
                break;
            }
        }
        let mut out = Vec::new();
        for (name, span) in order {
            match sorts.get(&name) {
                Some(s) => out.push(Variable::new(name, s.clone())),
                None => diags.push(ParseDiagnostic::error(
                    span,
                    format!("cannot infer the sort of `{name}`; add a context annotation"),
                )),
            }
        }
        out
    }

    fn infer(
        &self,
        f: &RawFormula,
        bound: &mut Vec<(String, Sort)>,
        free: &[(String, Span)],
        sorts: &mut HashMap<String, Sort>,
        changed: &mut bool,
        diags: &mut Diagnostics,
    ) {
        match f {
            RawFormula::Rel(name, args, _) => {
                if let Some(r) = self.sig.relation(name) {
                    for (arg, sort) in args.iter().zip(&r.arg_sorts) {
                        self.infer_term(arg, Some(sort), bound, free, sorts, changed, diags);
                    }
                }
            }
            RawFormula::Eq(l, r, _) => {
                let ls = self.known_sort(l, bound, sorts);
                let rs = self.known_sort(r, bound, sorts);
                self.infer_term(l, rs.as_ref(), bound, free, sorts, changed, diags);
                self.infer_term(r, ls.as_ref(), bound, free, sorts, changed, diags);
            }
            RawFormula::Top(_) | RawFormula::Bottom(_) => {}
            RawFormula::And(l, r) => {
                self.infer(l, bound, free, sorts, changed, diags);
                self.infer(r, bound, free, sorts, changed, diags);
            }
            RawFormula::Or(list, _) => {
                for g in list {
                    self.infer(g, bound, free, sorts, changed, diags);
                }
            }
            RawFormula::Exists { var, sort, body, .. } => {
                bound.push((var.clone(), Sort::new(sort)));
                self.infer(body, bound, free, sorts, changed, diags);
                bound.pop();
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn infer_term(
        &self,
        t: &RawTerm,
        expected: Option<&Sort>,
        bound: &mut Vec<(String, Sort)>,
        free: &[(String, Span)],
        sorts: &mut HashMap<String, Sort>,
        changed: &mut bool,
        diags: &mut Diagnostics,
    ) {
        match t {
            RawTerm::Name(name, span) => {
                let Some(want) = expected else { return };
                if bound.iter().any(|(n, _)| n == name) || !free.iter().any(|(n, _)| n == name) {
                    return;
                }
                match sorts.get(name) {
                    None => {
                        sorts.insert(name.clone(), want.clone());
                        *changed = true;
                    }
                    Some(have) if have != want => {
                        let msg = format!("`{name}` is used both as {have} and as {want}");
                        if !diags.iter().any(|d| d.message == msg) {
                            diags.push(ParseDiagnostic::error(*span, msg));
                        }
                    }
                    Some(_) => {}
                }
            }
            RawTerm::App(name, args, _) => {
                if let Some(func) = self.sig.function(name) {
                    for (arg, sort) in args.iter().zip(&func.arg_sorts) {
                        self.infer_term(arg, Some(sort), bound, free, sorts, changed, diags);
                    }
                }
            }
        }
    }

    fn known_sort(&self, t: &RawTerm, bound: &[(String, Sort)], sorts: &HashMap<String, Sort>) -> Option<Sort> {
        match t {
            RawTerm::Name(name, _) => {
                if let Some((_, s)) = bound.iter().rev().find(|(n, _)| n == name) {
                    return Some(s.clone());
                }
                if let Some(s) = sorts.get(name) {
                    return Some(s.clone());
                }
                self.sig
                    .function(name)
                    .filter(|f| f.arity() == 0)
                    .map(|f| f.result_sort.clone())
            }
            RawTerm::App(name, _, _) => self.sig.function(name).map(|f| f.result_sort.clone()),
        }
    }

    /// Resolves a formula that must have no free variables.
    fn closed(&self, raw: &RawFormula, what: &str, diags: &mut Diagnostics) -> Option<Formula> {
        let mut free = Vec::new();
        collect_free_names(raw, &mut Vec::new(), &mut |name, span| {
            if !self.is_constant(name) {
                free.push((name.to_string(), span));
            }
        });
        if let Some((name, span)) = free.first() {
            let msg = if what == "premise" {
                format!("premise is not ground: `{name}` is neither a declared point nor a constant")
            } else {
                format!("{what} has free variable `{name}`; declare it with `points`")
            };
            diags.push(ParseDiagnostic::error(*span, msg));
            return None;
        }
        let mut env = Env {
            ctx: Vec::new(),
            bound: Vec::new(),
        };
        let before = diags.len();
        let f = self.formula(raw, &mut env, diags)?;
        let seq = Sequent::new(Context::empty(), Formula::Top, f);
        if let Err(e) = wf_sequent(self.sig, &seq) {
            diags.push(ParseDiagnostic::error(raw.span(), e.to_string()));
            return None;
        }
        (diags.len() == before).then_some(seq.conclusion)
    }

    fn formula(&self, f: &RawFormula, env: &mut Env, diags: &mut Diagnostics) -> Option<Formula> {
        match f {
            RawFormula::Rel(name, args, span) => {
                if self.sig.relation(name).is_none() {
                    let msg = if self.sig.function(name).is_some() {
                        format!("`{name}` is a function symbol, not a relation")
                    } else {
                        format!("unknown relation `{name}`")
                    };
                    diags.push(ParseDiagnostic::error(*span, msg));
                    return None;
                }
                let args: Option<Vec<Term>> = args.iter().map(|a| self.term(a, env, diags)).collect();
                Some(Formula::Rel(name.clone(), args?))
            }
            RawFormula::Eq(l, r, _) => {
                let l = self.term(l, env, diags);
                let r = self.term(r, env, diags);
                Some(Formula::Eq(l?, r?))
            }
            RawFormula::Top(_) => Some(Formula::Top),
            RawFormula::Bottom(_) => Some(Formula::Bottom),
            RawFormula::And(l, r) => {
                let l = self.formula(l, env, diags);
                let r = self.formula(r, env, diags);
                Some(Formula::and(l?, r?))
            }
            RawFormula::Or(list, _) => {
                let items: Vec<Option<Formula>> = list.iter().map(|g| self.formula(g, env, diags)).collect();
                Some(Formula::Or(items.into_iter().collect::<Option<Vec<_>>>()?))
            }
            RawFormula::Exists { var, sort, body, span } => {
                let sort = Sort::new(sort);
                if !self.sig.has_sort(&sort) {
                    diags.push(ParseDiagnostic::error(*span, format!("unknown sort `{sort}`")));
                    return None;
                }
                let v = Variable::new(var, sort);
                env.bound.push(v.clone());
                let body = self.formula(body, env, diags);
                env.bound.pop();
                Some(Formula::exists(v, body?))
            }
        }
    }

    fn term(&self, t: &RawTerm, env: &Env, diags: &mut Diagnostics) -> Option<Term> {
        match t {
            RawTerm::Name(name, span) => {
                if let Some(v) = env.lookup(name) {
                    return Some(Term::Var(v.clone()));
                }
                if self.is_constant(name) {
                    return Some(Term::constant(name));
                }
                diags.push(ParseDiagnostic::error(*span, format!("free variable `{name}` not in context")));
                None
            }
            RawTerm::App(name, args, span) => {
                if self.sig.function(name).is_none() {
                    diags.push(ParseDiagnostic::error(*span, format!("unknown function symbol `{name}`")));
                    return None;
                }
                let args: Vec<Option<Term>> = args.iter().map(|a| self.term(a, env, diags)).collect();
                Some(Term::App(name.clone(), args.into_iter().collect::<Option<Vec<_>>>()?))
            }
        }
    }
}

fn collect_free_names(f: &RawFormula, bound: &mut Vec<String>, out: &mut impl FnMut(&str, Span)) {
    fn term(t: &RawTerm, bound: &[String], out: &mut impl FnMut(&str, Span)) {
        match t {
            RawTerm::Name(n, span) => {
                if !bound.contains(n) {
                    out(n, *span);
                }
            }
            RawTerm::App(_, args, _) => args.iter().for_each(|a| term(a, bound, out)),
        }
    }
    match f {
        RawFormula::Rel(_, args, _) => args.iter().for_each(|a| term(a, bound, out)),
        RawFormula::Eq(l, r, _) => {
            term(l, bound, out);
            term(r, bound, out);
        }
        RawFormula::Top(_) | RawFormula::Bottom(_) => {}
        RawFormula::And(l, r) => {
            collect_free_names(l, bound, out);
            collect_free_names(r, bound, out);
        }
        RawFormula::Or(list, _) => list.iter().for_each(|g| collect_free_names(g, bound, out)),
        RawFormula::Exists { var, body, .. } => {
            bound.push(var.clone());
            collect_free_names(body, bound, out);
            bound.pop();
        }
    }
}
