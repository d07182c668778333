//! Formulas with symbols and variables resolved to table and slot indices.

use super::{FiniteModel, SemanticsError};
use crate::logic::{Formula, Sequent, Term, Variable};

#[derive(Debug, Clone)]
pub(crate) enum CTerm {
    Slot(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Debug, Clone)]
pub(crate) enum CForm {
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Top,
    Bottom,
    And(Box<CForm>, Box<CForm>),
    Or(Vec<CForm>),
    Exists(usize, Box<CForm>),
}

impl CTerm {
    fn eval(&self, m: &FiniteModel, env: &[usize]) -> usize {
        match self {
            CTerm::Slot(i) => env[*i],
            CTerm::App(f, args) => {
                let (t, _) = &m.functions[*f];
                let mut idx = 0;
                for (a, s) in args.iter().zip(&t.strides) {
                    idx += a.eval(m, env) * s;
                }
                t.cells[idx]
            }
        }
    }
}

impl CForm {
    pub(crate) fn eval(&self, m: &FiniteModel, env: &mut Vec<usize>) -> bool {
        match self {
            CForm::Rel(..) => {
                let (r, cell) = self.cell(m, env).expect("atom");
                m.relations[r].cells[cell]
            }
            CForm::Eq(l, r) => l.eval(m, env) == r.eval(m, env),
            CForm::Top => true,
            CForm::Bottom => false,
            CForm::And(l, r) => l.eval(m, env) && r.eval(m, env),
            CForm::Or(list) => list.iter().any(|g| g.eval(m, env)),
            CForm::Exists(sort, body) => {
                for e in 0..m.sizes[*sort] {
                    env.push(e);
                    let hit = body.eval(m, env);
                    env.pop();
                    if hit {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// Relation index and cell of an atom under `env`.
    pub(crate) fn cell(&self, m: &FiniteModel, env: &[usize]) -> Option<(usize, usize)> {
        let CForm::Rel(r, args) = self else {
            return None;
        };
        let t = &m.relations[*r];
        let mut idx = 0;
        for (a, s) in args.iter().zip(&t.strides) {
            idx += a.eval(m, env) * s;
        }
        Some((*r, idx))
    }
}

pub(crate) struct Compiler<'m> {
    m: &'m FiniteModel,
}

impl<'m> Compiler<'m> {
    pub(crate) fn new(m: &'m FiniteModel) -> Self {
        Compiler { m }
    }

    pub(crate) fn formula(&self, scope: &[Variable], f: &Formula) -> Result<CForm, SemanticsError> {
        let mut scope = scope.to_vec();
        self.form(&mut scope, f)
    }

    fn term(&self, scope: &[Variable], t: &Term) -> Result<CTerm, SemanticsError> {
        match t {
            Term::Var(v) => scope
                .iter()
                .rposition(|w| w == v)
                .map(CTerm::Slot)
                .ok_or_else(|| SemanticsError::MissingAssignment {
                    variable: v.name.clone(),
                }),
            Term::App(f, args) => {
                let i = self
                    .m
                    .functions
                    .get_index_of(f)
                    .ok_or_else(|| SemanticsError::UnknownSymbol { name: f.clone() })?;
                let want = self.m.functions[i].0.args.len();
                if want != args.len() {
                    return Err(SemanticsError::ArityMismatch {
                        name: f.clone(),
                        expected: want,
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(scope, a)).collect::<Result<_, _>>()?;
                Ok(CTerm::App(i, args))
            }
        }
    }

    fn form(&self, scope: &mut Vec<Variable>, f: &Formula) -> Result<CForm, SemanticsError> {
        Ok(match f {
            Formula::Rel(r, args) => {
                let i = self
                    .m
                    .relations
                    .get_index_of(r)
                    .ok_or_else(|| SemanticsError::UnknownSymbol { name: r.clone() })?;
                let want = self.m.relations[i].args.len();
                if want != args.len() {
                    return Err(SemanticsError::ArityMismatch {
                        name: r.clone(),
                        expected: want,
                        found: args.len(),
                    });
                }
                let args = args.iter().map(|a| self.term(scope, a)).collect::<Result<_, _>>()?;
                CForm::Rel(i, args)
            }
            Formula::Eq(l, r) => CForm::Eq(self.term(scope, l)?, self.term(scope, r)?),
            Formula::Top => CForm::Top,
            Formula::Bottom => CForm::Bottom,
            Formula::And(l, r) => CForm::And(Box::new(self.form(scope, l)?), Box::new(self.form(scope, r)?)),
            Formula::Or(list) => CForm::Or(list.iter().map(|g| self.form(scope, g)).collect::<Result<_, _>>()?),
            Formula::Exists(v, body) => {
                let s = self.m.sort_index(&v.sort)?;
                scope.push(v.clone());
                let b = self.form(scope, body);
                scope.pop();
                CForm::Exists(s, Box::new(b?))
            }
        })
    }
}

/// A sequent compiled against one signature; reusable across every model
/// of that signature.
#[derive(Debug, Clone)]
pub(crate) struct CompiledSequent {
    pub(crate) sorts: Vec<usize>,
    pub(crate) premise: CForm,
    pub(crate) conclusion: CForm,
}

impl CompiledSequent {
    pub(crate) fn new(m: &FiniteModel, s: &Sequent) -> Result<Self, SemanticsError> {
        let scope = s.context.vars();
        let sorts = scope.iter().map(|v| m.sort_index(&v.sort)).collect::<Result<_, _>>()?;
        let c = Compiler::new(m);
        Ok(CompiledSequent {
            sorts,
            premise: c.formula(scope, &s.premise)?,
            conclusion: c.formula(scope, &s.conclusion)?,
        })
    }

    /// First assignment, in lexicographic order, making the premise true and
    /// the conclusion false.
    pub(crate) fn find_violation(&self, m: &FiniteModel) -> Option<Vec<usize>> {
        let sizes: Vec<usize> = self.sorts.iter().map(|&s| m.sizes[s]).collect();
        if sizes.contains(&0) {
            return None;
        }
        let mut env = vec![0; sizes.len()];
        loop {
            if self.premise.eval(m, &mut env) && !self.conclusion.eval(m, &mut env) {
                return Some(env);
            }
            let mut i = env.len();
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                env[i] += 1;
                if env[i] < sizes[i] {
                    break;
                }
                env[i] = 0;
            }
        }
    }

    pub(crate) fn holds(&self, m: &FiniteModel) -> bool {
        self.find_violation(m).is_none()
    }
}
