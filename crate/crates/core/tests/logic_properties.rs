use proptest::prelude::*;

use sepsub::logic::prenex::prenex_prefix;
use sepsub::logic::{
    eval_formula, fof_axiom, is_universal, normalize_for_tptp, parse_formula, parse_tptp, prenex_normal_form,
    print_formula, simplify, sym, tuples, Assignment, FiniteStructure, Formula, Quantifier, Signature, Term,
};

const VARS: [&str; 3] = ["u", "v", "w"];

fn signature() -> Signature {
    let mut sig = Signature::relational(&[("E", 2), ("P", 1)]);
    sig.add_constant("c").unwrap();
    sig.add_function("f", 1).unwrap();
    sig
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        3 => (0..VARS.len()).prop_map(|i| Term::var(VARS[i])),
        1 => Just(Term::constant("c")),
    ];
    leaf.prop_recursive(2, 4, 1, |inner| inner.prop_map(|t| Term::app("f", vec![t])))
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (term(), term()).prop_map(|(a, b)| Formula::rel("E", vec![a, b])),
        term().prop_map(|a| Formula::rel("P", vec![a])),
        (term(), term()).prop_map(|(a, b)| Formula::eq(a, b)),
        Just(Formula::True),
        Just(Formula::False),
    ]
}

fn binder() -> impl Strategy<Value = Vec<sepsub::logic::Symbol>> {
    proptest::sample::subsequence(VARS.to_vec(), 1..=2).prop_map(|vs| vs.into_iter().map(sym).collect())
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (binder(), inner.clone()).prop_map(|(vs, f)| Formula::Forall(vs, Box::new(f))),
            (binder(), inner).prop_map(|(vs, f)| Formula::Exists(vs, Box::new(f))),
        ]
    })
}

fn quantifier_free() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
        ]
    })
}

fn structure() -> impl Strategy<Value = FiniteStructure> {
    (1usize..=3).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<bool>(), n * n),
            proptest::collection::vec(any::<bool>(), n),
            0..n,
            proptest::collection::vec(0..n, n),
        )
            .prop_map(move |(e, p, c, f)| {
                let mut a = FiniteStructure::new(n).unwrap();
                a.add_relation("E", 2).unwrap();
                a.add_relation("P", 1).unwrap();
                for (idx, t) in tuples(n, 2).enumerate() {
                    if e[idx] {
                        a.insert_tuple("E", &t).unwrap();
                    }
                }
                for (x, &on) in p.iter().enumerate() {
                    if on {
                        a.insert_tuple("P", &[x]).unwrap();
                    }
                }
                a.set_constant("c", c).unwrap();
                let rows: Vec<Vec<usize>> = f.iter().enumerate().map(|(x, &y)| vec![x, y]).collect();
                a.set_function_rows("f", 1, &rows).unwrap();
                a
            })
    })
}

/// Truth value of `f` under every assignment to `u, v, w`.
fn truth_table(a: &FiniteStructure, f: &Formula) -> Vec<bool> {
    tuples(a.size(), VARS.len())
        .map(|vals| {
            let v = Assignment::from_pairs(VARS.iter().copied().zip(vals));
            eval_formula(a, &v, f, None).unwrap()
        })
        .collect()
}

fn is_prenex(f: &Formula) -> bool {
    match f {
        Formula::Forall(_, g) | Formula::Exists(_, g) => is_prenex(g),
        g => g.is_quantifier_free(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, &signature()).unwrap(), f);
    }

    #[test]
    fn prenex_form_is_equivalent_and_prenex(f in formula(), a in structure()) {
        let p = prenex_normal_form(&f).unwrap();
        prop_assert!(is_prenex(&p));
        prop_assert_eq!(p.free_vars(), f.free_vars());
        prop_assert_eq!(truth_table(&a, &p), truth_table(&a, &f));
    }

    #[test]
    fn universality_matches_the_prefix(f in formula()) {
        let prefix = prenex_prefix(&f).unwrap();
        let all_forall = prefix.iter().all(|(q, _)| *q == Quantifier::Forall);
        prop_assert_eq!(is_universal(&f).unwrap(), all_forall);
    }

    #[test]
    fn simplify_preserves_truth(f in formula(), a in structure()) {
        let s = simplify(&f);
        prop_assert!(s.node_count() <= f.node_count());
        prop_assert_eq!(truth_table(&a, &s), truth_table(&a, &f));
    }

    #[test]
    fn tptp_round_trip(f in formula()) {
        let line = fof_axiom("ax", &f).unwrap();
        let parsed = parse_tptp(&line).unwrap();
        prop_assert_eq!(parsed, vec![("ax".to_string(), normalize_for_tptp(&f))]);
    }

    #[test]
    fn quantifier_free_formulas_are_universal(f in quantifier_free()) {
        prop_assert!(is_universal(&f).unwrap());
        prop_assert_eq!(prenex_normal_form(&f).unwrap(), f);
    }
}
