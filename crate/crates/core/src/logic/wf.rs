use super::{Context, Formula, LogicError, Sequent, Signature, Sort, Term, Theory, Variable};

/// Variables visible at a point: the context plus enclosing binders.
struct Scope<'a> {
    ctx: &'a Context,
    binders: Vec<&'a Variable>,
}

impl<'a> Scope<'a> {
    fn contains(&self, v: &Variable) -> bool {
        // innermost declaration of the name wins
        if let Some(b) = self.binders.iter().rev().find(|b| b.name == v.name) {
            return *b == v;
        }
        self.ctx.contains(v)
    }

    fn has_name(&self, name: &str) -> bool {
        self.binders.iter().any(|b| b.name == name) || self.ctx.lookup(name).is_some()
    }
}

/// Sort of `t`, checking arity and argument sorts against `sig` and every
/// variable against `ctx`.
pub fn wf_term(sig: &Signature, ctx: &Context, t: &Term) -> Result<Sort, LogicError> {
    let scope = Scope {
        ctx,
        binders: Vec::new(),
    };
    term_in_scope(sig, &scope, t)
}

fn term_in_scope(sig: &Signature, scope: &Scope<'_>, t: &Term) -> Result<Sort, LogicError> {
    match t {
        Term::Var(v) => {
            if scope.contains(v) {
                Ok(v.sort.clone())
            } else {
                Err(LogicError::UnknownVariable {
                    name: v.name.clone(),
                })
            }
        }
        Term::App(name, args) => {
            let symbol = sig.function(name).ok_or_else(|| LogicError::UnknownSymbol {
                name: name.clone(),
            })?;
            check_args(sig, scope, name, &symbol.arg_sorts, args, || t.to_string())?;
            Ok(symbol.result_sort.clone())
        }
    }
}

fn check_args(
    sig: &Signature,
    scope: &Scope<'_>,
    symbol: &str,
    expected: &[Sort],
    args: &[Term],
    render: impl Fn() -> String,
) -> Result<(), LogicError> {
    if expected.len() != args.len() {
        return Err(LogicError::ArityMismatch {
            symbol: symbol.to_string(),
            expected: expected.len(),
            found: args.len(),
            at: render(),
        });
    }
    for (i, (want, arg)) in expected.iter().zip(args).enumerate() {
        let got = term_in_scope(sig, scope, arg)?;
        if &got != want {
            return Err(LogicError::SortMismatch {
                at: render(),
                position: i + 1,
                expected: want.clone(),
                found: got,
            });
        }
    }
    Ok(())
}

/// Sort of a term that is closed or whose variables carry their own sorts.
/// Used where no context is at hand (substitution building).
pub fn term_sort(sig: &Signature, t: &Term) -> Result<Sort, LogicError> {
    let mut vars = std::collections::BTreeSet::new();
    t.vars(&mut vars);
    let ctx = Context::new_unchecked(vars.into_iter().collect());
    let scope = Scope {
        ctx: &ctx,
        binders: Vec::new(),
    };
    term_in_scope(sig, &scope, t)
}

pub fn wf_formula(sig: &Signature, ctx: &Context, f: &Formula) -> Result<(), LogicError> {
    let mut scope = Scope {
        ctx,
        binders: Vec::new(),
    };
    formula_in_scope(sig, &mut scope, f)
}

fn formula_in_scope<'a>(
    sig: &Signature,
    scope: &mut Scope<'a>,
    f: &'a Formula,
) -> Result<(), LogicError> {
    match f {
        Formula::Rel(name, args) => {
            let symbol = sig.relation(name).ok_or_else(|| LogicError::UnknownSymbol {
                name: name.clone(),
            })?;
            check_args(sig, scope, name, &symbol.arg_sorts, args, || f.to_string())
        }
        Formula::Eq(l, r) => {
            let ls = term_in_scope(sig, scope, l)?;
            let rs = term_in_scope(sig, scope, r)?;
            if ls != rs {
                return Err(LogicError::SortMismatch {
                    at: f.to_string(),
                    position: 2,
                    expected: ls,
                    found: rs,
                });
            }
            Ok(())
        }
        Formula::Top | Formula::Bottom => Ok(()),
        Formula::And(l, r) => {
            formula_in_scope(sig, scope, l)?;
            formula_in_scope(sig, scope, r)
        }
        Formula::Or(list) => list.iter().try_for_each(|g| formula_in_scope(sig, scope, g)),
        Formula::Exists(v, body) => {
            if !sig.has_sort(&v.sort) {
                return Err(LogicError::UnknownSort {
                    name: v.sort.name().to_string(),
                });
            }
            if scope.has_name(&v.name) {
                return Err(LogicError::DuplicateBinder {
                    name: v.name.clone(),
                });
            }
            scope.binders.push(v);
            let res = formula_in_scope(sig, scope, body);
            scope.binders.pop();
            res
        }
    }
}

pub fn wf_context(sig: &Signature, ctx: &Context) -> Result<(), LogicError> {
    ctx.check_distinct()?;
    for v in ctx.vars() {
        if !sig.has_sort(&v.sort) {
            return Err(LogicError::UnknownSort {
                name: v.sort.name().to_string(),
            });
        }
    }
    Ok(())
}

pub fn wf_sequent(sig: &Signature, s: &Sequent) -> Result<(), LogicError> {
    wf_context(sig, &s.context)?;
    wf_formula(sig, &s.context, &s.premise)?;
    wf_formula(sig, &s.context, &s.conclusion)
}

pub fn wf_theory(t: &Theory) -> Result<(), LogicError> {
    for (i, ax) in t.axioms.iter().enumerate() {
        if t.axioms[..i].iter().any(|a| a.name == ax.name) {
            return Err(LogicError::DuplicateAxiom {
                name: ax.name.clone(),
            });
        }
        wf_sequent(&t.signature, &ax.sequent).map_err(|e| LogicError::InAxiom {
            axiom: ax.name.clone(),
            source: Box::new(e),
        })?;
    }
    Ok(())
}
