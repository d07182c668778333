use super::{Formula, Sequent, Term, Variable};

/// Equality up to renaming of bound variables. Free variables compare by
/// name and sort.
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    formula_eq(f, g, &mut Vec::new(), &mut Vec::new())
}

/// Same context and alpha-equal premise and conclusion.
pub fn sequent_alpha_eq(a: &Sequent, b: &Sequent) -> bool {
    a.context == b.context && alpha_eq(&a.premise, &b.premise) && alpha_eq(&a.conclusion, &b.conclusion)
}

fn binder_index(stack: &[&Variable], v: &Variable) -> Option<usize> {
    stack.iter().rev().position(|b| b.name == v.name)
}

fn term_eq<'a>(s: &Term, t: &Term, ls: &[&'a Variable], rs: &[&'a Variable]) -> bool {
    match (s, t) {
        (Term::Var(a), Term::Var(b)) => match (binder_index(ls, a), binder_index(rs, b)) {
            (Some(i), Some(j)) => i == j && a.sort == b.sort,
            (None, None) => a == b,
            _ => false,
        },
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, ls, rs))
        }
        _ => false,
    }
}

fn formula_eq<'a>(
    f: &'a Formula,
    g: &'a Formula,
    ls: &mut Vec<&'a Variable>,
    rs: &mut Vec<&'a Variable>,
) -> bool {
    match (f, g) {
        (Formula::Rel(r, xs), Formula::Rel(q, ys)) => {
            r == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, ls, rs))
        }
        (Formula::Eq(a, b), Formula::Eq(c, d)) => term_eq(a, c, ls, rs) && term_eq(b, d, ls, rs),
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::And(a, b), Formula::And(c, d)) => formula_eq(a, c, ls, rs) && formula_eq(b, d, ls, rs),
        (Formula::Or(xs), Formula::Or(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| formula_eq(x, y, ls, rs))
        }
        (Formula::Exists(v, a), Formula::Exists(w, b)) => {
            if v.sort != w.sort {
                return false;
            }
            ls.push(v);
            rs.push(w);
            let res = formula_eq(a, b, ls, rs);
            ls.pop();
            rs.pop();
            res
        }
        _ => false,
    }
}

/// Representative of the alpha-class of `f`: bound variables are renamed to
/// `#0`, `#1`, ... by binder depth. `#` never occurs in parsed identifiers, so
/// the result cannot collide with a free variable. Two formulas are
/// alpha-equal iff their keys are equal.
pub fn alpha_key(f: &Formula) -> Formula {
    key_formula(f, &mut Vec::new())
}

fn key_term(t: &Term, stack: &[(&Variable, Variable)]) -> Term {
    match t {
        Term::Var(v) => match stack.iter().rev().find(|(b, _)| b.name == v.name) {
            Some((_, renamed)) => Term::Var(renamed.clone()),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| key_term(a, stack)).collect()),
    }
}

fn key_formula<'a>(f: &'a Formula, stack: &mut Vec<(&'a Variable, Variable)>) -> Formula {
    match f {
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| key_term(t, stack)).collect()),
        Formula::Eq(l, r) => Formula::Eq(key_term(l, stack), key_term(r, stack)),
        Formula::Top => Formula::Top,
        Formula::Bottom => Formula::Bottom,
        Formula::And(l, r) => Formula::and(key_formula(l, stack), key_formula(r, stack)),
        Formula::Or(list) => Formula::Or(list.iter().map(|g| key_formula(g, stack)).collect()),
        Formula::Exists(v, body) => {
            let renamed = Variable::new(format!("#{}", stack.len()), v.sort.clone());
            stack.push((v, renamed.clone()));
            let body = key_formula(body, stack);
            stack.pop();
            Formula::exists(renamed, body)
        }
    }
}
