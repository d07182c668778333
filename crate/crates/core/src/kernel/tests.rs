use super::*;
use crate::dsl::parse_theory;
use crate::logic::{Sort, Variable};

fn tsym() -> Theory {
    parse_theory(&crate::dsl::SourceFile::from_str(
        "theory T_sym. sort V. rel E(V, V). axiom sym: [x:V, y:V] E(x, y) |- E(y, x).",
    ))
    .unwrap()
}

fn v(name: &str) -> Variable {
    Variable::new(name, Sort::new("V"))
}

fn e(a: &str, b: &str) -> Formula {
    Formula::rel("E", vec![Term::Var(v(a)), Term::Var(v(b))])
}

fn ctx(names: &[&str]) -> Context {
    Context::new(names.iter().map(|n| v(n)).collect()).unwrap()
}

fn swap_proof(t: &Theory) -> ProofTree {
    let ax = ProofTree::axiom(t, "sym", None).unwrap();
    let swap = Substitution::renaming([(v("x"), v("y")), (v("y"), v("x"))]).unwrap();
    let swapped = ProofTree::subst(ax.clone(), swap, ctx(&["x", "y"])).unwrap();
    ProofTree::cut(ax, swapped).unwrap()
}

#[test]
fn identity_accepted() {
    let t = tsym();
    let p = ProofTree::identity(ctx(&["x", "y"]), e("x", "y"));
    assert_eq!(check_proof(&t, &p).unwrap(), p.conclusion);
}

#[test]
fn cut_of_sym_with_swapped_sym() {
    let t = tsym();
    let p = swap_proof(&t);
    let s = check_proof(&t, &p).unwrap();
    assert_eq!(s.premise, e("x", "y"));
    assert_eq!(s.conclusion, e("x", "y"));
    assert_eq!(p.size(), 4);
}

#[test]
fn wrong_axiom_conclusion_rejected() {
    let t = tsym();
    let p = ProofTree {
        rule: Rule::Axiom("sym".into()),
        premises: vec![],
        conclusion: Sequent::new(ctx(&["x", "y", "z"]), e("x", "y"), e("x", "z")),
    };
    assert!(matches!(check_proof(&t, &p), Err(KernelError::RuleMismatch { .. })));
}

#[test]
fn unknown_axiom_rejected() {
    let t = tsym();
    let mut p = ProofTree::axiom(&t, "sym", None).unwrap();
    p.rule = Rule::Axiom("trans".into());
    assert!(matches!(check_proof(&t, &p), Err(KernelError::UnknownAxiom { name, .. }) if name == "trans"));
}

#[test]
fn axiom_up_to_renaming() {
    let t = tsym();
    let p = ProofTree::axiom(&t, "sym", Some(ctx(&["a", "b"]))).unwrap();
    assert_eq!(p.conclusion.premise, e("a", "b"));
    check_proof(&t, &p).unwrap();
}

#[test]
fn ill_formed_sequent_reports_path() {
    let t = tsym();
    let mut p = swap_proof(&t);
    p.premises[1].premises[0].conclusion.premise = Formula::rel("F", vec![]);
    let err = check_proof(&t, &p).unwrap_err();
    assert!(matches!(err, KernelError::IllFormedSequent { .. }));
    assert_eq!(err.path().unwrap().0, vec![1, 0]);
}

#[test]
fn subst_payload_errors() {
    let t = tsym();
    let mut p = swap_proof(&t);
    p.premises[1].rule = Rule::Subst(Substitution::renaming([(v("x"), v("y"))]).unwrap());
    let err = check_proof(&t, &p).unwrap_err();
    assert!(matches!(err, KernelError::PayloadError { .. }), "{err}");
    assert_eq!(err.path().unwrap().0, vec![1]);
}

#[test]
fn and_elim_l_shape() {
    let p = ProofTree::and_elim_l(ctx(&["x", "y"]), e("x", "y"), e("y", "x"));
    assert_eq!(p.conclusion.premise, Formula::and(e("x", "y"), e("y", "x")));
    assert_eq!(p.conclusion.conclusion, e("x", "y"));
    check_proof(&tsym(), &p).unwrap();
}

#[test]
fn eq_refl_shape() {
    let p = ProofTree::eq_refl(ctx(&["x"]), v("x")).unwrap();
    assert_eq!(p.conclusion.premise, Formula::Top);
    assert_eq!(p.conclusion.conclusion, Formula::Eq(Term::Var(v("x")), Term::Var(v("x"))));
    check_proof(&tsym(), &p).unwrap();
    assert!(ProofTree::eq_refl(ctx(&["y"]), v("x")).is_err());
}

#[test]
fn exists_bwd_rejects_free_variable() {
    let ex = Formula::exists(v("z"), e("x", "z"));
    // ∃z E(x,z) ⊢_{x,y} E(x,y); reintroducing y would clash with the conclusion.
    let p = ProofTree {
        rule: Rule::Identity,
        premises: vec![],
        conclusion: Sequent::new(ctx(&["x"]), ex.clone(), e("x", "y")),
    };
    let err = ProofTree::exists_adj_bwd(p, v("y")).unwrap_err();
    assert!(matches!(err, KernelError::PreconditionViolated { rule: RuleTag::ExistsBwd, .. }));
}

#[test]
fn exists_round_trip() {
    let t = tsym();
    // E(x,z) ⊢_{x,z} ⊤ then ∃z E(x,z) ⊢_x ⊤ then back again
    let base = ProofTree::truth(ctx(&["x", "z"]), e("x", "z"));
    let fwd = ProofTree::exists_adj_fwd(base, v("z")).unwrap();
    assert_eq!(fwd.conclusion.context, ctx(&["x"]));
    check_proof(&t, &fwd).unwrap();
    let bwd = ProofTree::exists_adj_bwd(fwd, v("w")).unwrap();
    assert_eq!(bwd.conclusion.premise, e("x", "w"));
    check_proof(&t, &bwd).unwrap();
}

#[test]
fn exists_fwd_rejects_variable_in_conclusion() {
    let p = ProofTree::identity(ctx(&["x", "y"]), e("x", "y"));
    assert!(ProofTree::exists_adj_fwd(p, v("y")).is_err());
}

#[test]
fn or_rules() {
    let t = tsym();
    let c = ctx(&["x", "y"]);
    let list = vec![e("x", "y"), e("y", "x")];
    let i0 = ProofTree::or_intro(c.clone(), list.clone(), 1).unwrap();
    check_proof(&t, &i0).unwrap();
    assert!(ProofTree::or_intro(c.clone(), list.clone(), 2).is_err());
    let cases = vec![
        ProofTree::truth(c.clone(), e("x", "y")),
        ProofTree::truth(c.clone(), e("y", "x")),
    ];
    let el = ProofTree::or_elim(c.clone(), cases, Formula::Top).unwrap();
    check_proof(&t, &el).unwrap();
    let empty = ProofTree::or_elim(c, vec![], e("x", "y")).unwrap();
    assert_eq!(empty.conclusion.premise, Formula::Or(vec![]));
    check_proof(&t, &empty).unwrap();
}

#[test]
fn or_intro_bad_index_is_payload_error() {
    let t = tsym();
    let mut p = ProofTree::or_intro(ctx(&["x", "y"]), vec![e("x", "y")], 0).unwrap();
    p.rule = Rule::OrIntro(3);
    assert!(matches!(check_proof(&t, &p), Err(KernelError::PayloadError { .. })));
}

#[test]
fn eq_subst_frobenius_distributivity() {
    let t = tsym();
    let c = ctx(&["x", "y"]);
    let p = ProofTree::eq_subst(c.clone(), v("x"), v("y"), e("x", "x")).unwrap();
    assert_eq!(p.conclusion.conclusion, e("y", "y"));
    check_proof(&t, &p).unwrap();

    let f = ProofTree::frobenius(c.clone(), e("x", "y"), v("z"), e("y", "z")).unwrap();
    check_proof(&t, &f).unwrap();
    assert!(ProofTree::frobenius(c.clone(), e("x", "y"), v("y"), e("y", "y")).is_err());

    let d = ProofTree::distributivity(c, e("x", "y"), vec![e("x", "x"), e("y", "y")]);
    check_proof(&t, &d).unwrap();
}

#[test]
fn sizes_and_depths() {
    let t = tsym();
    let id = ProofTree::identity(ctx(&["x"]), Formula::Top);
    assert_eq!((proof_size(&id), proof_depth(&id)), (1, 1));
    let ax = ProofTree::axiom(&t, "sym", None).unwrap();
    let cut = ProofTree::cut(ax, ProofTree::identity(ctx(&["x", "y"]), e("y", "x"))).unwrap();
    assert_eq!(proof_size(&cut), 3);
    let c = ctx(&["x", "y"]);
    let leafp = || ProofTree::truth(c.clone(), e("x", "y"));
    let pair = || ProofTree::and_intro(leafp(), leafp()).unwrap();
    let bal = ProofTree::and_intro(pair(), pair()).unwrap();
    assert_eq!((proof_size(&bal), proof_depth(&bal)), (7, 3));
    check_proof(&t, &bal).unwrap();
}

#[test]
fn rearrange_builds_checked_proofs() {
    let t = tsym();
    let c = ctx(&["x", "y"]);
    let from = Formula::and(e("x", "y"), Formula::and(e("y", "x"), e("x", "x")));
    let to = Formula::and(e("x", "x"), Formula::and(Formula::Top, e("x", "y")));
    let p = rearrange(&c, &from, &to).unwrap();
    assert_eq!(p.conclusion.premise, from);
    assert_eq!(p.conclusion.conclusion, to);
    check_proof(&t, &p).unwrap();
    assert!(rearrange(&c, &from, &e("y", "y")).is_none());
}

#[test]
fn every_single_node_corruption_is_caught_at_or_above_it() {
    let t = tsym();
    let p = swap_proof(&t);
    for path in p.paths() {
        let mut q = p.clone();
        let node = q.at_mut(&path).unwrap();
        node.conclusion.conclusion = if node.conclusion.conclusion == Formula::Bottom {
            Formula::Top
        } else {
            Formula::Bottom
        };
        let err = check_proof(&t, &q).unwrap_err();
        let at = err.path().unwrap();
        assert!(at.is_prefix_of(&path), "{path} vs {at}");
    }
}
