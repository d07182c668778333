use std::collections::BTreeMap;

use super::*;
use crate::dsl::{parse_theory, SourceFile};
use crate::logic::{Context, Term};

fn theory(src: &str) -> Theory {
    parse_theory(&SourceFile::from_str(src)).unwrap()
}

fn tsym() -> Theory {
    theory("theory T_sym. sort V. rel E(V, V). axiom sym: [x:V, y:V] E(x, y) |- E(y, x).")
}

fn v(n: &str) -> Variable {
    Variable::new(n, Sort::new("V"))
}

fn e(a: &str, b: &str) -> Formula {
    Formula::rel("E", vec![Term::Var(v(a)), Term::Var(v(b))])
}

fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteModel {
    let mut m = FiniteModel::uniform(&tsym().signature, n).unwrap();
    for &(a, b) in edges {
        m.set_relation("E", &[a, b], true).unwrap();
    }
    m
}

fn assign(pairs: &[(&str, usize)]) -> BTreeMap<Variable, usize> {
    pairs.iter().map(|(n, e)| (v(n), *e)).collect()
}

#[test]
fn eval_atoms_and_exists() {
    let m = graph(2, &[(0, 1)]);
    assert!(eval_formula(&m, &assign(&[("x", 0), ("y", 1)]), &e("x", "y")).unwrap());
    let ex = Formula::exists(v("y"), e("x", "y"));
    assert!(!eval_formula(&m, &assign(&[("x", 1)]), &ex).unwrap());
    assert!(eval_formula(&m, &assign(&[("x", 0)]), &ex).unwrap());
    assert!(eval_formula(&m, &BTreeMap::new(), &Formula::Top).unwrap());
}

#[test]
fn eval_reports_missing_assignment() {
    let m = graph(2, &[]);
    let err = eval_formula(&m, &assign(&[("x", 0)]), &e("x", "y")).unwrap_err();
    assert_eq!(err, SemanticsError::MissingAssignment { variable: "y".into() });
}

#[test]
fn eval_rejects_out_of_carrier() {
    let m = graph(2, &[]);
    assert!(matches!(
        eval_formula(&m, &assign(&[("x", 5)]), &Formula::Top),
        Err(SemanticsError::OutOfCarrier { .. })
    ));
}

#[test]
fn satisfies_sym() {
    let t = tsym();
    let sym = &t.axioms[0].sequent;
    assert!(satisfies(&graph(2, &[(0, 1), (1, 0)]), sym));
    assert!(!satisfies(&graph(2, &[(0, 1)]), sym));
    let id = Sequent::new(Context::new(vec![v("x"), v("y")]).unwrap(), e("x", "y"), e("x", "y"));
    assert!(satisfies(&graph(2, &[(0, 1)]), &id));
}

#[test]
fn is_model_cases() {
    let empty = theory("sort V. rel E(V, V).");
    assert!(is_model(&graph(2, &[(0, 1)]), &empty));
    assert!(is_model(&graph(2, &[(0, 1), (1, 0)]), &tsym()));
    assert!(!is_model(&graph(2, &[(0, 1)]), &tsym()));
}

#[test]
fn enumeration_counts() {
    let empty = theory("sort V. rel E(V, V).");
    let exact1: Vec<_> = enumerate_models(&empty, &SizeBound::exactly(1), EnumOptions::default())
        .unwrap()
        .collect();
    assert_eq!(exact1.len(), 2);
    let upto1 = enumerate_models(&empty, &SizeBound::at_most(1), EnumOptions::default())
        .unwrap()
        .count();
    assert_eq!(upto1, 3);
    let sym2 = enumerate_models(&tsym(), &SizeBound::exactly(2), EnumOptions::default())
        .unwrap()
        .count();
    // brute force: symmetric subsets of a 2x2 grid
    let oracle = (0u32..16)
        .filter(|bits| {
            let cell = |a: u32, b: u32| bits >> (a * 2 + b) & 1;
            (0..2).all(|a| (0..2).all(|b| cell(a, b) == cell(b, a)))
        })
        .count();
    assert_eq!(sym2, oracle);
    assert_eq!(sym2, 8);
}

#[test]
fn empty_carrier_is_vacuous() {
    let t = tsym();
    let models: Vec<_> = enumerate_models(&t, &SizeBound::exactly(0), EnumOptions::default())
        .unwrap()
        .collect();
    assert_eq!(models.len(), 1);
    let bad = Sequent::new(Context::new(vec![v("x")]).unwrap(), Formula::Top, Formula::Bottom);
    assert!(satisfies(&models[0], &bad));
}

#[test]
fn constants_need_inhabited_carriers() {
    let t = theory("sort V. fn c: V. rel E(V, V).");
    let n = enumerate_models(&t, &SizeBound::at_most(2), EnumOptions::default())
        .unwrap()
        .count();
    // size 1: 2 tables x 1 constant value; size 2: 16 x 2
    assert_eq!(n, 2 + 32);
}

#[test]
fn budget_error_and_truncation() {
    let t = theory("sort P. rel R(P, P, P, P).");
    let err = enumerate_models(&t, &SizeBound::at_most(3), EnumOptions::default()).err().unwrap();
    assert!(matches!(err, SemanticsError::BudgetExceeded { .. }));
    let opts = EnumOptions {
        cap: 1000,
        policy: CapPolicy::Truncate,
    };
    let mut it = enumerate_models(&t, &SizeBound::at_most(3), opts).unwrap();
    assert_eq!(it.by_ref().count(), 1000);
    assert_eq!(it.examined(), 1000);
}

#[test]
fn stronger_theory_has_fewer_models() {
    let weak = tsym();
    let strong = theory(
        "sort V. rel E(V, V). axiom sym: [x:V, y:V] E(x, y) |- E(y, x). \
         axiom trans: [x:V, y:V, z:V] E(x, y) & E(y, z) |- E(x, z).",
    );
    let ws: Vec<_> = enumerate_models(&weak, &SizeBound::at_most(3), EnumOptions::default())
        .unwrap()
        .collect();
    let ss: Vec<_> = enumerate_models(&strong, &SizeBound::at_most(3), EnumOptions::default())
        .unwrap()
        .collect();
    assert!(ss.len() < ws.len());
    assert!(ss.iter().all(|m| ws.contains(m)));
}

#[test]
fn functions_are_evaluated() {
    let t = theory("sort V. fn f(V): V. rel P(V). axiom fp: [x:V] P(x) |- P(f(x)).");
    let mut m = FiniteModel::uniform(&t.signature, 2).unwrap();
    m.set_function("f", &[0], 1).unwrap();
    m.set_function("f", &[1], 1).unwrap();
    m.set_relation("P", &[0], true).unwrap();
    assert!(!is_model(&m, &t));
    m.set_relation("P", &[1], true).unwrap();
    assert!(is_model(&m, &t));
    assert_eq!(m.apply("f", &[0]).unwrap(), 1);
}

#[test]
fn chase_produces_models() {
    let t = theory(
        "sort V. rel E(V, V). axiom sym: [x:V, y:V] E(x, y) |- E(y, x). \
         axiom trans: [x:V, y:V, z:V] E(x, y) & E(y, z) |- E(x, z).",
    );
    let sizes = [(Sort::new("V"), 3)].into_iter().collect();
    let ms = sample_chased_models(&t, &sizes, 20, 0.2, 7);
    assert_eq!(ms.len(), 20);
    assert!(ms.iter().all(|m| is_model(m, &t)));
    let ms2 = sample_chased_models(&t, &sizes, 20, 0.2, 7);
    assert_eq!(ms, ms2);
}

#[test]
fn chase_gives_up_on_equations() {
    let t = theory("sort V. rel R(V, V). axiom id: [x:V, y:V] R(x, y) |- x = y.");
    let mut m = FiniteModel::uniform(&t.signature, 2).unwrap();
    m.set_relation("R", &[0, 1], true).unwrap();
    assert!(chase(m, &t).is_none());
}
