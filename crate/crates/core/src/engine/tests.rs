use std::collections::BTreeSet;

use super::*;
use crate::dsl::{euclidean_theory, parse_problem, parse_theory, tsym_theory, tsym_trans_theory, SourceFile};
use crate::kernel::{check_proof, RuleTag};

fn setup(t: &Theory, problem: &str) -> (Engine, Vec<Formula>) {
    let p = parse_problem(&SourceFile::from_str(problem), t).unwrap();
    (Engine::new(&p.theory), p.premises)
}

fn atom(r: &str, args: &[&str]) -> Formula {
    Formula::rel(r, args.iter().map(|a| Term::constant(*a)).collect())
}

/// Round-based fixpoint over the whole Herbrand base, independent of the
/// engine's join machinery.
fn oracle(engine: &Engine, premises: &[Formula]) -> BTreeSet<Formula> {
    let t = engine.theory();
    let consts: Vec<(String, Sort)> = t
        .signature
        .functions()
        .filter(|f| f.arity() == 0)
        .map(|f| (f.name.clone(), f.result_sort.clone()))
        .collect();
    let mut facts: BTreeSet<Formula> = premises.iter().cloned().collect();
    loop {
        let mut next = facts.clone();
        for ax in &t.axioms {
            let vars = ax.sequent.context.vars();
            let mut choice = vec![0usize; vars.len()];
            let options: Vec<Vec<&String>> = vars
                .iter()
                .map(|v| consts.iter().filter(|c| c.1 == v.sort).map(|c| &c.0).collect())
                .collect();
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            'outer: loop {
                let s = grounding(
                    &ax.sequent.context,
                    &choice.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect::<Vec<_>>(),
                );
                let prem = crate::logic::substitute(&ax.sequent.premise, &s);
                if prem.conjuncts().iter().all(|a| **a == Formula::Top || facts.contains(*a)) {
                    next.insert(crate::logic::substitute(&ax.sequent.conclusion, &s));
                }
                for k in (0..choice.len()).rev() {
                    choice[k] += 1;
                    if choice[k] < options[k].len() {
                        continue 'outer;
                    }
                    choice[k] = 0;
                }
                break;
            }
        }
        if next == facts {
            return facts;
        }
        facts = next;
    }
}

#[test]
fn partition_cases() {
    let (rules, rejected) = horn_partition(&tsym_theory());
    assert_eq!((rules.len(), rejected.len()), (1, 0));

    let t = parse_theory(&SourceFile::from_str(
        "sort V. rel E(V, V). axiom serial: [x:V] true |- exists y:V. E(x, y). \
         axiom sym: [x:V, y:V] E(x, y) |- E(y, x).",
    ))
    .unwrap();
    let (rules, rejected) = horn_partition(&t);
    assert_eq!(rules.len(), 1);
    assert_eq!(rejected.len(), 1);
    assert_eq!(rejected[0].axiom, "serial");

    let (rules, rejected) = horn_partition(&euclidean_theory());
    assert!(rejected.is_empty());
    let c = rules.iter().find(|r| r.name == "bet_nbet").unwrap();
    assert_eq!(c.head, Formula::Bottom);
}

#[test]
fn function_heads_are_rejected() {
    let t = parse_theory(&SourceFile::from_str(
        "sort V. fn s(V): V. rel P(V). axiom succ: [x:V] P(x) |- P(s(x)).",
    ))
    .unwrap();
    let (rules, rejected) = horn_partition(&t);
    assert!(rules.is_empty());
    assert!(rejected[0].reason.contains("invent"));
}

#[test]
fn closure_of_a_path_is_complete() {
    let (e, prem) = setup(&tsym_trans_theory(), "points a b c. assume E(a,b), E(b,c).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    assert_eq!(fb.len(), 9);
    let got: BTreeSet<Formula> = fb.facts().iter().cloned().collect();
    assert_eq!(got, oracle(&e, &prem));
    assert!(!is_inconsistent(&fb));
}

#[test]
fn naive_agrees_and_costs_more() {
    let (e, prem) = setup(&tsym_trans_theory(), "points a b c d. assume E(a,b), E(b,c), E(c,d).");
    let semi = e.saturate(&prem, Limits::default()).unwrap();
    let naive = e.saturate_with(&prem, Limits::default(), Strategy::Naive).unwrap();
    assert_eq!(semi.facts(), naive.facts());
    assert_eq!(semi.iter().collect::<Vec<_>>(), naive.iter().collect::<Vec<_>>());
    assert!(semi.stats().instances < naive.stats().instances);
}

#[test]
fn no_rules_means_premises_only() {
    let t = parse_theory(&SourceFile::from_str("sort V. rel E(V, V).")).unwrap();
    let (e, prem) = setup(&t, "points a b. assume E(a,b).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    assert_eq!(fb.facts(), &prem[..]);
}

#[test]
fn closed_premises_stop_after_one_round() {
    let (e, prem) = setup(&tsym_theory(), "points a b. assume E(a,b), E(b,a).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    assert_eq!(fb.len(), 2);
    assert_eq!(fb.stats().rounds, 1);
}

#[test]
fn constraint_violation_is_inconsistent() {
    let (e, prem) = setup(&euclidean_theory(), "points a b c. assume B(a,b,c), nB(a,b,c).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    assert!(is_inconsistent(&fb));
    assert!(!is_inconsistent(&FactBase::default()));
}

#[test]
fn limits_are_enforced_with_partial_results() {
    let (e, prem) = setup(&tsym_trans_theory(), "points a b c d. assume E(a,b), E(b,c), E(c,d).");
    let small = Limits {
        max_facts: 5,
        max_rounds: 100,
    };
    match e.saturate(&prem, small) {
        Err(EngineError::LimitExceeded { kind, partial }) => {
            assert_eq!(kind, LimitKind::Facts);
            assert!(partial.len() > 5 && partial.len() <= 6);
        }
        other => panic!("{other:?}"),
    }
    let one = Limits {
        max_facts: 100,
        max_rounds: 1,
    };
    assert!(matches!(
        e.saturate(&prem, one),
        Err(EngineError::LimitExceeded {
            kind: LimitKind::Rounds,
            ..
        })
    ));
}

#[test]
fn invalid_premises_are_reported() {
    let (e, _) = setup(&tsym_theory(), "points a b.");
    let bad = Formula::rel("E", vec![Term::constant("a")]);
    assert!(matches!(e.saturate(&[bad], Limits::default()), Err(EngineError::InvalidPremise { .. })));
}

#[test]
fn traceback_path() {
    let (e, prem) = setup(&tsym_trans_theory(), "points a b c. assume E(a,b), E(b,c).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    let g = e.traceback(&fb, &atom("E", &["a", "c"])).unwrap();
    assert_eq!(g.leaves(), vec![&atom("E", &["a", "b"]), &atom("E", &["b", "c"])]);
    assert_eq!(g.steps(), 1);
    assert_eq!(g.nodes.last().unwrap().step.as_ref().unwrap().rule, "trans");

    let g = e.traceback(&fb, &atom("E", &["a", "b"])).unwrap();
    assert_eq!(g.nodes.len(), 1);

    let g = e.traceback(&fb, &atom("E", &["a", "a"])).unwrap();
    assert_eq!(g.leaves(), vec![&atom("E", &["a", "b"])]);
    let rules: Vec<&str> = g.nodes.iter().filter_map(|n| n.step.as_ref()).map(|s| s.rule.as_str()).collect();
    assert_eq!(rules, vec!["sym", "trans"]);

    assert!(matches!(
        e.traceback(&fb, &atom("E", &["a", "d"])),
        Err(EngineError::TargetAbsent { .. })
    ));
}

#[test]
fn traceback_drops_redundant_leaves() {
    let (e, prem) = setup(&tsym_trans_theory(), "points a b c. assume E(a,b), E(b,a), E(b,c).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    for target in fb.derived() {
        let g = e.traceback(&fb, target).unwrap();
        let leaves: Vec<Formula> = g.leaves().into_iter().cloned().collect();
        assert!(e.derives(&leaves, target).unwrap());
        for i in 0..leaves.len() {
            let mut rest = leaves.clone();
            rest.remove(i);
            assert!(!e.derives(&rest, target).unwrap(), "{target} without {}", leaves[i]);
        }
    }
}

#[test]
fn elaboration_is_kernel_checked() {
    let (e, prem) = setup(&tsym_trans_theory(), "points a b c. assume E(a,b), E(b,c).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    let g = e.traceback(&fb, &atom("E", &["a", "c"])).unwrap();
    let p = e.elaborate(&g).unwrap();
    let s = check_proof(e.theory(), &p).unwrap();
    assert_eq!(s.premise, Formula::and(atom("E", &["a", "b"]), atom("E", &["b", "c"])));
    assert_eq!(s.conclusion, atom("E", &["a", "c"]));
    for target in fb.facts() {
        let g = e.traceback(&fb, target).unwrap();
        let p = e.elaborate(&g).unwrap();
        assert_eq!(check_proof(e.theory(), &p).unwrap(), g.sequent());
    }
}

#[test]
fn single_premise_elaborates_to_identity() {
    let (e, prem) = setup(&tsym_theory(), "points a b. assume E(a,b).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    let g = e.traceback(&fb, &prem[0]).unwrap();
    let p = e.elaborate(&g).unwrap();
    assert_eq!(p.tag(), RuleTag::Identity);
}

#[test]
fn forged_rule_name_fails() {
    let (e, prem) = setup(&tsym_theory(), "points a b. assume E(a,b).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    let mut g = e.traceback(&fb, &atom("E", &["b", "a"])).unwrap();
    g.nodes.last_mut().unwrap().step.as_mut().unwrap().rule = "forged".into();
    assert!(matches!(e.elaborate(&g), Err(EngineError::ElaborationFailed { .. })));
}

#[test]
fn equality_lemmas_check() {
    let t = euclidean_theory();
    for rule in equality_rules(&t.signature) {
        let p = elaborate::equality_lemma(&rule);
        let s = check_proof(&t, &p).unwrap_or_else(|err| panic!("{}: {err}", rule.name));
        assert_eq!(s, rule.sequent(), "{}", rule.name);
    }
}

#[test]
fn equalities_propagate_and_elaborate() {
    let (e, prem) = setup(&euclidean_theory(), "points a b c. assume B(a,b,a), apart(b,c).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    assert!(fb.contains(&Formula::Eq(Term::constant("a"), Term::constant("b"))));
    assert!(fb.contains(&atom("apart", &["a", "c"])));
    for target in fb.derived() {
        let g = e.traceback(&fb, target).unwrap();
        let p = e.elaborate(&g).unwrap();
        assert_eq!(check_proof(e.theory(), &p).unwrap(), g.sequent());
    }
}

#[test]
fn provenance_replays() {
    let (e, prem) = setup(&euclidean_theory(), "points a b c. assume cong(a,b,c,c), B(a,c,b).");
    let fb = e.saturate(&prem, Limits::default()).unwrap();
    for (i, (fact, prov)) in fb.iter().enumerate() {
        if let Provenance::Derived { rule, subst, parents, .. } = prov {
            assert!(parents.iter().all(|&p| p < i));
            let r = e.rule(rule).unwrap();
            assert_eq!(&crate::logic::substitute(&r.head, subst), fact);
            let body: Vec<Formula> = r.body.iter().map(|b| crate::logic::substitute(b, subst)).collect();
            let from: Vec<Formula> = parents.iter().map(|&p| fb.fact(p).clone()).collect();
            assert_eq!(body, from);
        }
    }
}
