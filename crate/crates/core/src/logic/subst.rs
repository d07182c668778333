use std::collections::{BTreeMap, BTreeSet};

use super::{term_sort, Formula, LogicError, Signature, Term, Variable};

/// Sort-preserving finite map from variables to terms, applied simultaneously.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Variable, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a substitution, rejecting any pair whose term sort differs
    /// from the variable's sort.
    pub fn from_pairs(
        sig: &Signature,
        pairs: impl IntoIterator<Item = (Variable, Term)>,
    ) -> Result<Self, LogicError> {
        let mut map = BTreeMap::new();
        for (v, t) in pairs {
            let sort = term_sort(sig, &t)?;
            if sort != v.sort {
                return Err(LogicError::SortMismatch {
                    at: format!("{} := {}", v.name, t),
                    position: 1,
                    expected: v.sort.clone(),
                    found: sort,
                });
            }
            map.insert(v, t);
        }
        Ok(Substitution(map))
    }

    /// Variable-to-variable renaming; sorts must agree.
    pub fn renaming(pairs: impl IntoIterator<Item = (Variable, Variable)>) -> Result<Self, LogicError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if from.sort != to.sort {
                return Err(LogicError::SortMismatch {
                    at: format!("{} := {}", from.name, to.name),
                    position: 1,
                    expected: from.sort,
                    found: to.sort,
                });
            }
            map.insert(from, Term::Var(to));
        }
        Ok(Substitution(map))
    }

    pub(crate) fn from_map_unchecked(map: BTreeMap<Variable, Term>) -> Self {
        Substitution(map)
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    /// `other ∘ self`: apply `self`, then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<Variable, Term> = self
            .0
            .iter()
            .map(|(v, t)| (v.clone(), other.apply_term(t)))
            .collect();
        for (v, t) in &other.0 {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Substitution(map)
    }

    fn without(&self, v: &Variable) -> Substitution {
        let mut map = self.0.clone();
        map.remove(v);
        Substitution(map)
    }
}

/// Smallest priming of `base` (`x`, `x'`, `x''`, ...) not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding simultaneous substitution. A binder is renamed only when
/// a substituted term would otherwise be captured by it.
pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    if s.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| s.apply_term(t)).collect()),
        Formula::Eq(l, r) => Formula::Eq(s.apply_term(l), s.apply_term(r)),
        Formula::Top => Formula::Top,
        Formula::Bottom => Formula::Bottom,
        Formula::And(l, r) => Formula::and(substitute(l, s), substitute(r, s)),
        Formula::Or(list) => Formula::Or(list.iter().map(|g| substitute(g, s)).collect()),
        Formula::Exists(v, body) => {
            let inner = s.without(v);
            let body_free: BTreeSet<Variable> = body.free_vars().into_iter().filter(|w| w != v).collect();
            let mut range_names = BTreeSet::new();
            for w in &body_free {
                if let Some(t) = inner.get(w) {
                    let mut vs = BTreeSet::new();
                    t.vars(&mut vs);
                    range_names.extend(vs.into_iter().map(|x| x.name));
                }
            }
            if range_names.contains(&v.name) {
                let mut avoid = range_names;
                avoid.extend(body_free.iter().map(|w| w.name.clone()));
                let renamed = Variable::new(fresh_name(&v.name, &avoid), v.sort.clone());
                let mut map = inner.0;
                map.insert(v.clone(), Term::Var(renamed.clone()));
                Formula::exists(renamed, substitute(body, &Substitution(map)))
            } else {
                Formula::exists(v.clone(), substitute(body, &inner))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{FunctionSymbol, RelationSymbol, Sort};
    use super::*;

    fn p() -> Sort {
        Sort::new("Point")
    }
    fn v(n: &str) -> Variable {
        Variable::new(n, p())
    }
    fn tv(n: &str) -> Term {
        Term::Var(v(n))
    }
    fn e(a: Term, b: Term) -> Formula {
        Formula::rel("E", vec![a, b])
    }
    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_sort(p()).unwrap();
        sig.add_sort(Sort::new("Line")).unwrap();
        sig.add_function(FunctionSymbol::new("midpoint", vec![p(), p()], p()))
            .unwrap();
        sig.add_relation(RelationSymbol::new("E", vec![p(), p()])).unwrap();
        sig
    }

    #[test]
    fn simple_replacement() {
        let s = Substitution::from_pairs(&sig(), [(v("x"), tv("a"))]).unwrap();
        assert_eq!(substitute(&e(tv("x"), tv("y")), &s), e(tv("a"), tv("y")));
    }

    #[test]
    fn capture_is_avoided_by_priming() {
        let f = Formula::exists(v("y"), e(tv("x"), tv("y")));
        let s = Substitution::from_pairs(&sig(), [(v("x"), tv("y"))]).unwrap();
        let expected = Formula::exists(v("y'"), e(tv("y"), tv("y'")));
        assert_eq!(substitute(&f, &s), expected);
    }

    #[test]
    fn term_substitution_into_equality() {
        let m = Term::App("midpoint".into(), vec![tv("a"), tv("b")]);
        let s = Substitution::from_pairs(&sig(), [(v("x"), m.clone())]).unwrap();
        assert_eq!(
            substitute(&Formula::Eq(tv("x"), tv("x")), &s),
            Formula::Eq(m.clone(), m)
        );
    }

    #[test]
    fn sort_mismatch_rejected() {
        let l = Variable::new("l", Sort::new("Line"));
        let err = Substitution::from_pairs(&sig(), [(v("x"), Term::Var(l))]).unwrap_err();
        assert!(matches!(err, LogicError::SortMismatch { .. }));
    }

    #[test]
    fn binder_not_substituted() {
        let f = Formula::exists(v("x"), e(tv("x"), tv("z")));
        let s = Substitution::from_pairs(&sig(), [(v("x"), tv("a"))]).unwrap();
        assert_eq!(substitute(&f, &s), f);
    }

    #[test]
    fn fresh_name_adds_minimal_primes() {
        let avoid: BTreeSet<String> = ["y".to_string(), "y'".to_string()].into();
        assert_eq!(fresh_name("y", &avoid), "y''");
        assert_eq!(fresh_name("z", &avoid), "z");
    }
}
