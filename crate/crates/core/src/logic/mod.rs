//! Many-sorted observable logic: signatures, terms, formulas, sequents and
//! theories.
//!
//! Formulas are built from atoms (`R(t..)`, `t = u`), `true`, `false`, binary
//! conjunction, finite disjunction lists and existential quantification. There
//! is no implication, negation or universal quantifier inside formulas; a
//! [`Sequent`] `premise |-[ctx] conclusion` is the only entailment form.

mod alpha;
mod subst;
mod wf;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

pub use alpha::{alpha_eq, alpha_key, sequent_alpha_eq};
pub use subst::{fresh_name, substitute, Substitution};
pub use wf::{term_sort, wf_context, wf_formula, wf_sequent, wf_term, wf_theory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("free variable `{name}` not in context")]
    UnknownVariable { name: String },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("unknown sort `{name}`")]
    UnknownSort { name: String },
    #[error("`{symbol}` expects {expected} argument(s) but `{at}` has {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
        at: String,
    },
    #[error("sort mismatch at argument {position} of `{at}`: expected {expected}, found {found}")]
    SortMismatch {
        at: String,
        position: usize,
        expected: Sort,
        found: Sort,
    },
    #[error("binder `{name}` shadows a variable already in scope")]
    DuplicateBinder { name: String },
    #[error("variable `{name}` occurs twice in the context")]
    DuplicateContextVariable { name: String },
    #[error("name collision on `{name}`")]
    NameCollision { name: String },
    #[error("relation `{name}` must take at least one argument")]
    NullaryRelation { name: String },
    #[error("axiom `{name}` is declared twice")]
    DuplicateAxiom { name: String },
    #[error("in axiom `{axiom}`: {source}")]
    InAxiom {
        axiom: String,
        source: Box<LogicError>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(String);

impl Sort {
    pub fn new(name: impl Into<String>) -> Self {
        Sort(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `f : S1 x .. x Sn -> T`. Arity zero declares a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionSymbol {
    pub name: String,
    pub arg_sorts: Vec<Sort>,
    pub result_sort: Sort,
}

impl FunctionSymbol {
    pub fn new(name: impl Into<String>, arg_sorts: Vec<Sort>, result_sort: Sort) -> Self {
        Self {
            name: name.into(),
            arg_sorts,
            result_sort,
        }
    }

    pub fn constant(name: impl Into<String>, sort: Sort) -> Self {
        Self::new(name, Vec::new(), sort)
    }

    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

/// `R ⊆ S1 x .. x Sn` with `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arg_sorts: Vec<Sort>,
}

impl RelationSymbol {
    pub fn new(name: impl Into<String>, arg_sorts: Vec<Sort>) -> Self {
        Self {
            name: name.into(),
            arg_sorts,
        }
    }

    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

/// Non-logical vocabulary. Declaration order is kept so printing is stable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<Sort>,
    functions: IndexMap<String, FunctionSymbol>,
    relations: IndexMap<String, RelationSymbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn functions(&self) -> impl Iterator<Item = &FunctionSymbol> {
        self.functions.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationSymbol> {
        self.relations.values()
    }

    pub fn has_sort(&self, sort: &Sort) -> bool {
        self.sorts.contains(sort)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionSymbol> {
        self.functions.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelationSymbol> {
        self.relations.get(name)
    }

    /// 0-ary function symbols of the given sort, in declaration order.
    pub fn constants_of<'a>(&'a self, sort: &'a Sort) -> impl Iterator<Item = &'a FunctionSymbol> {
        self.functions
            .values()
            .filter(move |f| f.arity() == 0 && &f.result_sort == sort)
    }

    pub fn is_empty(&self) -> bool {
        self.sorts.is_empty() && self.functions.is_empty() && self.relations.is_empty()
    }

    pub fn add_sort(&mut self, sort: Sort) -> Result<(), LogicError> {
        if sort.name().is_empty() {
            return Err(LogicError::UnknownSort {
                name: String::new(),
            });
        }
        if self.has_sort(&sort) {
            return Err(LogicError::NameCollision {
                name: sort.name().to_string(),
            });
        }
        self.sorts.push(sort);
        Ok(())
    }

    pub fn add_function(&mut self, symbol: FunctionSymbol) -> Result<(), LogicError> {
        if self.functions.contains_key(&symbol.name) {
            return Err(LogicError::NameCollision { name: symbol.name });
        }
        for sort in symbol.arg_sorts.iter().chain([&symbol.result_sort]) {
            self.require_sort(sort)?;
        }
        self.functions.insert(symbol.name.clone(), symbol);
        Ok(())
    }

    pub fn add_relation(&mut self, symbol: RelationSymbol) -> Result<(), LogicError> {
        if self.relations.contains_key(&symbol.name) {
            return Err(LogicError::NameCollision { name: symbol.name });
        }
        if symbol.arg_sorts.is_empty() {
            return Err(LogicError::NullaryRelation { name: symbol.name });
        }
        for sort in &symbol.arg_sorts {
            self.require_sort(sort)?;
        }
        self.relations.insert(symbol.name.clone(), symbol);
        Ok(())
    }

    fn require_sort(&self, sort: &Sort) -> Result<(), LogicError> {
        if self.has_sort(sort) {
            Ok(())
        } else {
            Err(LogicError::UnknownSort {
                name: sort.name().to_string(),
            })
        }
    }
}

/// Union of `sig` and `delta`. Symbols in `delta` may refer to sorts of `sig`.
/// Any name declared in both is a collision.
pub fn extend_signature(sig: &Signature, delta: &Signature) -> Result<Signature, LogicError> {
    let mut out = sig.clone();
    for sort in &delta.sorts {
        out.add_sort(sort.clone())?;
    }
    for f in delta.functions.values() {
        out.add_function(f.clone())?;
    }
    for r in delta.relations.values() {
        out.add_relation(r.clone())?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub sort: Sort,
}

impl Variable {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Self {
            name: name.into(),
            sort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Variable),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>, sort: &Sort) -> Self {
        Term::Var(Variable::new(name, sort.clone()))
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    Top,
    Bottom,
    And(Box<Formula>, Box<Formula>),
    /// Finite disjunction; the empty list is falsity.
    Or(Vec<Formula>),
    Exists(Variable, Box<Formula>),
}

impl Formula {
    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Rel(name.into(), args)
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn exists(var: Variable, body: Formula) -> Self {
        Formula::Exists(var, Box::new(body))
    }

    /// Right-nested conjunction of `parts`; `Top` when empty.
    pub fn conj(parts: Vec<Formula>) -> Self {
        let mut iter = parts.into_iter().rev();
        match iter.next() {
            None => Formula::Top,
            Some(last) => iter.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Rel(..) | Formula::Eq(..))
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Height of the syntax tree; atoms, `true` and `false` have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Rel(..) | Formula::Eq(..) | Formula::Top | Formula::Bottom => 1,
            Formula::And(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Or(list) => 1 + list.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Exists(_, body) => 1 + body.depth(),
        }
    }

    /// Leaves of the `And` tree, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::And(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                other => out.push(other),
            }
        }
        out
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<Variable> {
    f.free_vars()
}

fn collect_free(f: &Formula, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
    let add_term = |t: &Term, bound: &Vec<Variable>, out: &mut BTreeSet<Variable>| {
        let mut vs = BTreeSet::new();
        t.vars(&mut vs);
        out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
    };
    match f {
        Formula::Rel(_, args) => args.iter().for_each(|t| add_term(t, bound, out)),
        Formula::Eq(l, r) => {
            add_term(l, bound, out);
            add_term(r, bound, out);
        }
        Formula::Top | Formula::Bottom => {}
        Formula::And(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Formula::Or(list) => list.iter().for_each(|g| collect_free(g, bound, out)),
        Formula::Exists(v, body) => {
            bound.push(v.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

/// Ordered, duplicate-free (by name) list of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(Vec<Variable>);

impl Context {
    pub fn new(vars: Vec<Variable>) -> Result<Self, LogicError> {
        let ctx = Context(vars);
        ctx.check_distinct()?;
        Ok(ctx)
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub(crate) fn new_unchecked(vars: Vec<Variable>) -> Self {
        Context(vars)
    }

    pub fn vars(&self) -> &[Variable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &Variable) -> bool {
        self.0.contains(v)
    }

    pub fn lookup(&self, name: &str) -> Option<&Variable> {
        self.0.iter().find(|v| v.name == name)
    }

    pub fn position(&self, v: &Variable) -> Option<usize> {
        self.0.iter().position(|w| w == v)
    }

    /// Context with `v` appended.
    pub fn with(&self, v: Variable) -> Result<Self, LogicError> {
        let mut vars = self.0.clone();
        vars.push(v);
        Context::new(vars)
    }

    /// Context with `v` removed, order otherwise preserved.
    pub fn without(&self, v: &Variable) -> Self {
        Context(self.0.iter().filter(|w| *w != v).cloned().collect())
    }

    fn check_distinct(&self) -> Result<(), LogicError> {
        for (i, v) in self.0.iter().enumerate() {
            if self.0[..i].iter().any(|w| w.name == v.name) {
                return Err(LogicError::DuplicateContextVariable {
                    name: v.name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// `premise |-[context] conclusion`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub context: Context,
    pub premise: Formula,
    pub conclusion: Formula,
}

impl Sequent {
    pub fn new(context: Context, premise: Formula, conclusion: Formula) -> Self {
        Self {
            context,
            premise,
            conclusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub sequent: Sequent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub id: String,
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
}

impl Theory {
    pub fn new(id: impl Into<String>, signature: Signature) -> Self {
        Self {
            id: id.into(),
            signature,
            axioms: Vec::new(),
        }
    }

    /// Adds a named axiom after checking it against the signature.
    pub fn add_axiom(&mut self, name: impl Into<String>, sequent: Sequent) -> Result<(), LogicError> {
        let name = name.into();
        if self.axiom(&name).is_some() {
            return Err(LogicError::DuplicateAxiom { name });
        }
        wf_sequent(&self.signature, &sequent).map_err(|e| LogicError::InAxiom {
            axiom: name.clone(),
            source: Box::new(e),
        })?;
        self.axioms.push(Axiom { name, sequent });
        Ok(())
    }

    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.name == name)
    }

    /// Same axioms over `sig` extended by `delta`.
    pub fn extended(&self, delta: &Signature) -> Result<Theory, LogicError> {
        Ok(Theory {
            id: self.id.clone(),
            signature: extend_signature(&self.signature, delta)?,
            axioms: self.axioms.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point() -> Sort {
        Sort::new("Point")
    }

    fn euclid_sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_sort(point()).unwrap();
        sig.add_relation(RelationSymbol::new("B", vec![point(); 3]))
            .unwrap();
        sig
    }

    #[test]
    fn extend_with_triangle_sort() {
        let mut delta = Signature::new();
        delta.add_sort(Sort::new("Triangle")).unwrap();
        let ext = extend_signature(&euclid_sig(), &delta).unwrap();
        assert_eq!(ext.sorts().len(), 2);
    }

    #[test]
    fn extend_with_empty_delta_is_identity() {
        let sig = euclid_sig();
        assert_eq!(extend_signature(&sig, &Signature::new()).unwrap(), sig);
    }

    #[test]
    fn extend_with_duplicate_relation_collides() {
        // delta refers to Point without declaring it, so build it unchecked
        let mut delta = Signature::new();
        delta.sorts.push(point());
        delta
            .add_relation(RelationSymbol::new("B", vec![point(); 3]))
            .unwrap();
        delta.sorts.clear();
        let err = extend_signature(&euclid_sig(), &delta).unwrap_err();
        assert_eq!(err, LogicError::NameCollision { name: "B".into() });
    }

    #[test]
    fn free_vars_examples() {
        let v = Sort::new("V");
        let x = Variable::new("x", v.clone());
        let y = Variable::new("y", v.clone());
        let e = Formula::rel("E", vec![Term::Var(x.clone()), Term::Var(y.clone())]);
        assert_eq!(e.free_vars(), [x.clone(), y.clone()].into());
        let ex = Formula::exists(y, e);
        assert_eq!(ex.free_vars(), [x].into());
        assert!(Formula::Top.free_vars().is_empty());
    }

    #[test]
    fn conj_nests_to_the_right() {
        let a = Formula::rel("A", vec![]);
        let b = Formula::rel("B", vec![]);
        let c = Formula::rel("C", vec![]);
        let f = Formula::conj(vec![a.clone(), b.clone(), c.clone()]);
        assert_eq!(f, Formula::and(a.clone(), Formula::and(b.clone(), c.clone())));
        assert_eq!(f.conjuncts(), vec![&a, &b, &c]);
        assert_eq!(Formula::conj(vec![]), Formula::Top);
    }

    #[test]
    fn duplicate_context_names_rejected() {
        let err = Context::new(vec![
            Variable::new("x", point()),
            Variable::new("x", Sort::new("Line")),
        ])
        .unwrap_err();
        assert!(matches!(err, LogicError::DuplicateContextVariable { .. }));
    }
}
