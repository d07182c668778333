//! Finite set-valued models, Tarskian evaluation and small-model enumeration.

mod compile;
mod enumerate;

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::logic::{Formula, Sequent, Signature, Sort, Theory, Variable};

use compile::{CompiledSequent, Compiler};

pub use enumerate::{
    chase, count_candidates, enumerate_models, sample_chased_models, CapPolicy, EnumOptions, ModelIter,
    SizeBound,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("no value assigned to `{variable}`")]
    MissingAssignment { variable: String },
    #[error("symbol `{name}` is not interpreted by the model")]
    UnknownSymbol { name: String },
    #[error("sort `{name}` is not interpreted by the model")]
    UnknownSort { name: String },
    #[error("element {element} is outside the carrier of `{sort}` (size {size})")]
    OutOfCarrier { sort: String, element: usize, size: usize },
    #[error("`{name}` takes {expected} arguments, got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("function `{function}` has a nonempty domain but an empty result carrier")]
    EmptyResultCarrier { function: String },
    #[error("enumeration space of {space} candidates exceeds the cap of {cap}")]
    BudgetExceeded { space: u128, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Table<T> {
    pub(crate) args: Vec<usize>,
    pub(crate) strides: Vec<usize>,
    pub(crate) cells: Vec<T>,
}

impl<T: Clone> Table<T> {
    fn new(args: Vec<usize>, sizes: &[usize], fill: T) -> Self {
        let mut strides = vec![0; args.len()];
        let mut n = 1usize;
        for i in (0..args.len()).rev() {
            strides[i] = n;
            n *= sizes[args[i]];
        }
        Table {
            args,
            strides,
            cells: vec![fill; n],
        }
    }

    fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }
}

/// A structure with carriers `{0, .., n-1}` per sort and total tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    pub(crate) sorts: Vec<Sort>,
    pub(crate) sizes: Vec<usize>,
    pub(crate) relations: IndexMap<String, Table<bool>>,
    pub(crate) functions: IndexMap<String, (Table<usize>, usize)>,
}

impl FiniteModel {
    /// All relations empty and every function constantly 0. Fails when a
    /// function has a nonempty domain but an empty result carrier.
    pub fn new(sig: &Signature, sizes: &BTreeMap<Sort, usize>) -> Result<Self, SemanticsError> {
        let sorts: Vec<Sort> = sig.sorts().to_vec();
        let sizes: Vec<usize> = sorts.iter().map(|s| sizes.get(s).copied().unwrap_or(0)).collect();
        let idx = |s: &Sort| sorts.iter().position(|t| t == s).expect("signature sorts resolve");
        let relations = sig
            .relations()
            .map(|r| {
                let args = r.arg_sorts.iter().map(idx).collect();
                (r.name.clone(), Table::new(args, &sizes, false))
            })
            .collect();
        let mut functions = IndexMap::new();
        for f in sig.functions() {
            let args: Vec<usize> = f.arg_sorts.iter().map(idx).collect();
            let res = idx(&f.result_sort);
            let table = Table::new(args, &sizes, 0usize);
            if !table.cells.is_empty() && sizes[res] == 0 {
                return Err(SemanticsError::EmptyResultCarrier {
                    function: f.name.clone(),
                });
            }
            functions.insert(f.name.clone(), (table, res));
        }
        Ok(FiniteModel {
            sorts,
            sizes,
            relations,
            functions,
        })
    }

    /// Uniform carrier size for every sort.
    pub fn uniform(sig: &Signature, n: usize) -> Result<Self, SemanticsError> {
        let sizes = sig.sorts().iter().map(|s| (s.clone(), n)).collect();
        Self::new(sig, &sizes)
    }

    fn sort_index(&self, sort: &Sort) -> Result<usize, SemanticsError> {
        self.sorts
            .iter()
            .position(|s| s == sort)
            .ok_or_else(|| SemanticsError::UnknownSort {
                name: sort.name().to_string(),
            })
    }

    pub fn carrier_size(&self, sort: &Sort) -> usize {
        self.sort_index(sort).map(|i| self.sizes[i]).unwrap_or(0)
    }

    fn check_tuple(&self, name: &str, args: &[usize], tuple: &[usize]) -> Result<(), SemanticsError> {
        if args.len() != tuple.len() {
            return Err(SemanticsError::ArityMismatch {
                name: name.to_string(),
                expected: args.len(),
                found: tuple.len(),
            });
        }
        for (&s, &e) in args.iter().zip(tuple) {
            if e >= self.sizes[s] {
                return Err(SemanticsError::OutOfCarrier {
                    sort: self.sorts[s].name().to_string(),
                    element: e,
                    size: self.sizes[s],
                });
            }
        }
        Ok(())
    }

    pub fn holds(&self, rel: &str, tuple: &[usize]) -> Result<bool, SemanticsError> {
        let t = self.relation_table(rel)?;
        self.check_tuple(rel, &t.args, tuple)?;
        Ok(t.cells[t.index(tuple)])
    }

    pub fn set_relation(&mut self, rel: &str, tuple: &[usize], value: bool) -> Result<(), SemanticsError> {
        let args = self.relation_table(rel)?.args.clone();
        self.check_tuple(rel, &args, tuple)?;
        let t = self.relations.get_mut(rel).expect("checked above");
        let i = t.index(tuple);
        t.cells[i] = value;
        Ok(())
    }

    /// Tuples in the relation, in lexicographic order.
    pub fn relation_tuples(&self, rel: &str) -> Result<Vec<Vec<usize>>, SemanticsError> {
        let t = self.relation_table(rel)?;
        let mut out = Vec::new();
        for (i, &b) in t.cells.iter().enumerate() {
            if b {
                out.push(t.strides.iter().zip(&t.args).map(|(s, a)| (i / s) % self.sizes[*a]).collect());
            }
        }
        Ok(out)
    }

    pub fn apply(&self, func: &str, tuple: &[usize]) -> Result<usize, SemanticsError> {
        let (t, _) = self.function_table(func)?;
        self.check_tuple(func, &t.args, tuple)?;
        Ok(t.cells[t.index(tuple)])
    }

    pub fn set_function(&mut self, func: &str, tuple: &[usize], value: usize) -> Result<(), SemanticsError> {
        let (t, res) = self.function_table(func)?;
        let (args, res) = (t.args.clone(), *res);
        self.check_tuple(func, &args, tuple)?;
        self.check_tuple(func, &[res], &[value])?;
        let (t, _) = self.functions.get_mut(func).expect("checked above");
        let i = t.index(tuple);
        t.cells[i] = value;
        Ok(())
    }

    fn relation_table(&self, rel: &str) -> Result<&Table<bool>, SemanticsError> {
        self.relations
            .get(rel)
            .ok_or_else(|| SemanticsError::UnknownSymbol { name: rel.to_string() })
    }

    fn function_table(&self, func: &str) -> Result<&(Table<usize>, usize), SemanticsError> {
        self.functions
            .get(func)
            .ok_or_else(|| SemanticsError::UnknownSymbol { name: func.to_string() })
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, n) in self.sorts.iter().zip(&self.sizes) {
            writeln!(f, "|{s}| = {n}")?;
        }
        for name in self.relations.keys() {
            let tuples = self.relation_tuples(name).map_err(|_| fmt::Error)?;
            writeln!(f, "{name} = {tuples:?}")?;
        }
        for (name, (t, _)) in &self.functions {
            writeln!(f, "{name} = {:?}", t.cells)?;
        }
        Ok(())
    }
}

/// Truth of `f` under `assignment`, which must cover its free variables.
pub fn eval_formula(
    m: &FiniteModel,
    assignment: &BTreeMap<Variable, usize>,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    let scope: Vec<Variable> = assignment.keys().cloned().collect();
    for (v, &e) in assignment {
        let s = m.sort_index(&v.sort)?;
        m.check_tuple(&v.name, &[s], &[e])?;
    }
    let compiled = Compiler::new(m).formula(&scope, f)?;
    let mut env: Vec<usize> = assignment.values().copied().collect();
    Ok(compiled.eval(m, &mut env))
}

/// Whether every assignment over the context that makes the premise true
/// also makes the conclusion true.
///
/// # Panics
/// If the sequent mentions symbols the model does not interpret.
pub fn satisfies(m: &FiniteModel, s: &Sequent) -> bool {
    CompiledSequent::new(m, s)
        .unwrap_or_else(|e| panic!("sequent is not over the model's signature: {e}"))
        .holds(m)
}

/// Conjunction of [`satisfies`] over the axioms.
pub fn is_model(m: &FiniteModel, t: &Theory) -> bool {
    t.axioms.iter().all(|ax| satisfies(m, &ax.sequent))
}

#[cfg(test)]
mod tests;
