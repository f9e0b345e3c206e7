use super::*;
use crate::game::{has_r_strategy, GamePosition};
use crate::logic::{eval_formula, eval_sentence, is_universal, sym, Assignment, FiniteStructure, Signature};
use crate::separation::ClosureRule;

fn s(v: &[&str]) -> Vec<Symbol> {
    v.iter().map(|x| sym(x)).collect()
}

fn c(k: usize, v: &str) -> Formula {
    Formula::mon(k, Term::var(v))
}

fn two_colouring() -> SeparationRule {
    let tau0 = ClosureConjunct::new(s(&["y"]), Formula::True, Formula::Or(vec![c(1, "y"), c(2, "y")]));
    let tau1 = ClosureConjunct::new(s(&["y"]), Formula::True, Formula::not(Formula::And(vec![c(1, "y"), c(2, "y")])));
    let tau2 = ClosureConjunct::new(
        s(&["y1", "y2"]),
        Formula::rel("E", vec![Term::var("y1"), Term::var("y2")]),
        Formula::And((1..=2).map(|k| Formula::not(Formula::And(vec![c(k, "y1"), c(k, "y2")]))).collect()),
    );
    SeparationRule::positive(2, s(&["x"]), Formula::True, Formula::True, ClosureRule::Explicit(vec![tau0, tau1, tau2]))
        .unwrap()
}

fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
    let tuples: Vec<Vec<usize>> = edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect();
    FiniteStructure::new(n).unwrap().with_relation("E", 2, &tuples).unwrap()
}

fn ne(a: &str, b: &str) -> Formula {
    Formula::not(Formula::eq(Term::var(a), Term::var(b)))
}

#[test]
fn delta_examples() {
    let z = VarSetVector::empty(1);
    let f = ChoiceFunction::new(1, 1, |_, _| true);
    let d = delta(&z, &s(&["y"]), &f).unwrap();
    assert_eq!(d.inside, vec![s(&["y"])]);
    assert_eq!(d.outside, vec![Vec::<Symbol>::new()]);

    let zero = ChoiceFunction::new(2, 1, |_, _| false);
    let d = delta(&z, &s(&["a", "b"]), &zero).unwrap();
    assert!(d.inside[0].is_empty());
    assert_eq!(d.outside[0], s(&["a", "b"]));

    let f = ChoiceFunction::new(2, 2, |p, k| (p == 0) == (k == 1));
    let d = delta(&VarSetVector::empty(2), &s(&["a", "b"]), &f).unwrap();
    assert_eq!(d.inside, vec![s(&["a"]), s(&["b"])]);
    assert_eq!(d.outside, vec![s(&["b"]), s(&["a"])]);

    assert_eq!(delta(&d, &s(&["a"]), &ChoiceFunction::new(1, 2, |_, _| true)), Err(AxiomError::NotFresh(sym("a"))));
}

#[test]
fn choice_functions_are_lexicographic() {
    let all: Vec<_> = ChoiceFunction::all(2, 1).collect();
    assert_eq!(all.len(), 4);
    assert_eq!((all[0].get(0, 1), all[0].get(1, 1)), (false, false));
    assert_eq!((all[1].get(0, 1), all[1].get(1, 1)), (false, true));
    assert_eq!((all[2].get(0, 1), all[2].get(1, 1)), (true, false));
}

#[test]
fn disjointness_examples() {
    assert_eq!(disjointness_formula(&VarSetVector::empty(2)), Formula::True);
    let z = VarSetVector { inside: vec![s(&["z"])], outside: vec![s(&["w"])] };
    assert_eq!(disjointness_formula(&z), ne("z", "w"));
    let z = VarSetVector { inside: vec![s(&["a", "b"])], outside: vec![s(&["c"])] };
    assert_eq!(disjointness_formula(&z), Formula::And(vec![ne("a", "c"), ne("b", "c")]));
}

#[test]
fn pad_examples() {
    let z = VarSetVector { inside: vec![s(&["z1", "z2"])], outside: vec![vec![]] };
    let eq = |a: &str, b: &str| Formula::eq(Term::var(a), Term::var(b));
    assert_eq!(pad_translate(&c(1, "y"), &z).unwrap(), Formula::Or(vec![eq("y", "z1"), eq("y", "z2")]));
    assert_eq!(pad_translate(&c(1, "y"), &VarSetVector::empty(1)).unwrap(), Formula::False);
    let z = VarSetVector { inside: vec![s(&["z"])], outside: vec![vec![]] };
    let e = Formula::rel("E", vec![Term::var("y"), Term::var("w")]);
    let psi = Formula::Or(vec![Formula::not(c(1, "y")), e.clone()]);
    assert_eq!(pad_translate(&psi, &z).unwrap(), Formula::Or(vec![ne("y", "z"), e]));
    let q = Formula::exists(s(&["y"]), c(1, "y"));
    assert_eq!(pad_translate(&q, &z), Err(AxiomError::Quantified));
}

#[test]
fn alpha_base_is_disjointness() {
    let rule = two_colouring();
    let p = rule.as_positive().unwrap();
    let z = VarSetVector { inside: vec![s(&["a"]), vec![]], outside: vec![s(&["b"]), s(&["a"])] };
    assert_eq!(alpha(p, &z, 0, 2).unwrap(), disjointness_formula(&z));
}

#[test]
fn one_variable_conjunct_branches_twice() {
    let conj = ClosureConjunct::new(s(&["y"]), Formula::True, c(1, "y"));
    let rule =
        SeparationRule::positive(1, vec![], Formula::True, Formula::True, ClosureRule::Explicit(vec![conj])).unwrap();
    let f = alpha(rule.as_positive().unwrap(), &VarSetVector::empty(1), 1, 0).unwrap();
    let Formula::Forall(_, body) = f else { panic!("expected a quantifier") };
    let Formula::Implies(_, disj) = *body else { panic!("expected an implication") };
    assert!(matches!(disj.as_ref(), Formula::Or(b) if b.len() == 2));
}

#[test]
fn single_vertex_survives_one_round() {
    let rule = two_colouring();
    let f = alpha(rule.as_positive().unwrap(), &VarSetVector::empty(2), 1, 2).unwrap();
    assert!(eval_formula(&graph(1, &[]), &Assignment::new(), &f, None).unwrap());
}

#[test]
fn opening_round_is_always_survived() {
    let f = beta_hat(&two_colouring(), 0, 0).unwrap();
    for g in [graph(1, &[]), graph(2, &[(0, 1)]), graph(3, &[(0, 1), (1, 2), (2, 0)])] {
        assert!(eval_sentence(&g, &f).unwrap());
    }
}

#[test]
fn triangle_fails_at_two_rounds_and_matches_the_game() {
    let rule = two_colouring();
    let k3 = graph(3, &[(0, 1), (1, 2), (2, 0)]);
    for r in 0..=2 {
        let f = beta_hat(&rule, r, 2).unwrap();
        assert!(f.is_closed() && !f.has_shadowing());
        let game = has_r_strategy(&k3, &rule, GamePosition::EMPTY, r as u32, 2, true).unwrap();
        assert_eq!(eval_sentence(&k3, &f).unwrap(), game, "r={r}");
    }
    assert!(!eval_sentence(&k3, &beta_hat(&rule, 2, 2).unwrap()).unwrap());
}

#[test]
fn order0_passes_through_and_counts() {
    let sig = Signature::relational(&[("E", 2)]);
    let irreflexive = Formula::forall(s(&["x"]), Formula::not(Formula::rel("E", vec![Term::var("x"), Term::var("x")])));
    let o0 = SeparationRule::order0(irreflexive.clone()).unwrap();
    assert_eq!(beta_hat(&o0, 3, 3).unwrap(), irreflexive);
    let scheme = SeparationScheme::new(sig.clone(), vec![], vec![two_colouring()]).unwrap();
    let out = generate_axioms(&scheme, 1, 2, DEFAULT_NODE_CAP).unwrap();
    assert_eq!(out.len(), 6);
    assert!(out.iter().all(|a| is_universal(&a.sentence).unwrap()));
    // finite closure rules cap the index at the last conjunct
    assert_eq!(generate_axioms(&scheme, 0, 9, DEFAULT_NODE_CAP).unwrap().len(), 3);
    let with_o0 = SeparationScheme::new(sig, vec![], vec![o0, two_colouring()]).unwrap();
    let out = generate_axioms(&with_o0, 0, 0, DEFAULT_NODE_CAP).unwrap();
    assert_eq!(out.len(), 2);
    assert_eq!((out[0].round, out[1].round), (None, Some(0)));
}

#[test]
fn size_guard_names_the_cell() {
    let gen = AxiomGenerator::new(4).with_node_cap(1000);
    let err = gen.beta_hat(&two_colouring(), 3, 2).unwrap_err();
    assert!(matches!(err, AxiomError::SizeGuard { rule: 4, r: 3, i: 2, .. }));
}

#[test]
fn native_and_tptp_rendering() {
    let scheme = SeparationScheme::new(Signature::relational(&[("E", 2)]), vec![], vec![two_colouring()]).unwrap();
    let out = generate_axioms(&scheme, 0, 1, DEFAULT_NODE_CAP).unwrap();
    let native = render_native(&out);
    assert!(native.starts_with("; rule 0 r 0 i 0\n(forall (x_0_0_0_0)"));
    assert!(native.ends_with("; universal: yes (2 of 2)\n"));
    let tptp = render_tptp(&out).unwrap();
    assert!(tptp.contains("fof(rule0_r0_i1, axiom, "));
}
