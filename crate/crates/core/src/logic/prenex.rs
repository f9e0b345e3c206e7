use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::syntax::{fresh_name, Formula, Quantifier, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrenexError {
    #[error("formula contains monadic atom C_{0}; translate it away first")]
    MonadicAtom(usize),
}

fn check_pure(f: &Formula) -> Result<(), PrenexError> {
    match f.max_monadic_index() {
        0 => Ok(()),
        k => Err(PrenexError::MonadicAtom(k)),
    }
}

/// Equivalent formula with every quantifier in a leading prefix. Runs of the same
/// quantifier are merged into one node. Bound variables are renamed only where they
/// clash with a free variable or an earlier binder.
///
/// Equivalence assumes a non-empty universe.
pub fn prenex_normal_form(f: &Formula) -> Result<Formula, PrenexError> {
    check_pure(f)?;
    let rectified = rectify(f);
    let (prefix, matrix) = pull(&rectified);
    Ok(build(prefix, matrix))
}

/// The quantifier prefix of the prenex form, outermost first.
pub fn prenex_prefix(f: &Formula) -> Result<Vec<(Quantifier, Symbol)>, PrenexError> {
    check_pure(f)?;
    Ok(pull(&rectify(f)).0)
}

/// True iff the prenex form has no existential quantifier.
pub fn is_universal(f: &Formula) -> Result<bool, PrenexError> {
    check_pure(f)?;
    Ok(all_universal(f, true))
}

// A quantifier ends up universal in the prefix iff it is `forall` under positive
// polarity or `exists` under negative polarity.
fn all_universal(f: &Formula, positive: bool) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) | Formula::Mon(..) => true,
        Formula::Not(g) => all_universal(g, !positive),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(|g| all_universal(g, positive)),
        Formula::Implies(a, b) => all_universal(a, !positive) && all_universal(b, positive),
        Formula::Forall(_, g) => positive && all_universal(g, positive),
        Formula::Exists(_, g) => !positive && all_universal(g, positive),
    }
}

/// Renames binders so that no two quantifiers bind the same name and no binder
/// reuses a free variable.
fn rectify(f: &Formula) -> Formula {
    let mut taken: BTreeSet<Symbol> = f.all_vars();
    let mut used: BTreeSet<Symbol> = f.free_vars();
    rectify_inner(f, &HashMap::new(), &mut used, &mut taken)
}

fn rectify_inner(
    f: &Formula,
    scope: &HashMap<Symbol, Symbol>,
    used: &mut BTreeSet<Symbol>,
    taken: &mut BTreeSet<Symbol>,
) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| t.rename(scope)).collect()),
        Formula::Eq(a, b) => Formula::Eq(a.rename(scope), b.rename(scope)),
        Formula::Mon(k, t) => Formula::Mon(*k, t.rename(scope)),
        Formula::Not(g) => Formula::not(rectify_inner(g, scope, used, taken)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rectify_inner(g, scope, used, taken)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rectify_inner(g, scope, used, taken)).collect()),
        Formula::Implies(a, b) => {
            let a = rectify_inner(a, scope, used, taken);
            Formula::implies(a, rectify_inner(b, scope, used, taken))
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let mut inner = scope.clone();
            let new_vs: Vec<Symbol> = vs
                .iter()
                .map(|v| {
                    let name = if used.contains(v) { fresh_name(v, taken) } else { v.clone() };
                    used.insert(name.clone());
                    inner.insert(v.clone(), name.clone());
                    name
                })
                .collect();
            let body = Box::new(rectify_inner(g, &inner, used, taken));
            match f {
                Formula::Forall(..) => Formula::Forall(new_vs, body),
                _ => Formula::Exists(new_vs, body),
            }
        }
    }
}

type Prefix = Vec<(Quantifier, Symbol)>;

fn dualise(p: Prefix) -> Prefix {
    p.into_iter().map(|(q, v)| (q.dual(), v)).collect()
}

fn pull(f: &Formula) -> (Prefix, Formula) {
    match f {
        Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) | Formula::Mon(..) => {
            (Vec::new(), f.clone())
        }
        Formula::Not(g) => {
            let (p, m) = pull(g);
            (dualise(p), Formula::not(m))
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let mut prefix = Vec::new();
            let mut parts = Vec::with_capacity(gs.len());
            for g in gs {
                let (p, m) = pull(g);
                prefix.extend(p);
                parts.push(m);
            }
            let m = if matches!(f, Formula::And(_)) { Formula::And(parts) } else { Formula::Or(parts) };
            (prefix, m)
        }
        Formula::Implies(a, b) => {
            let (pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            let mut prefix = dualise(pa);
            prefix.extend(pb);
            (prefix, Formula::implies(ma, mb))
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let q = if matches!(f, Formula::Forall(..)) { Quantifier::Forall } else { Quantifier::Exists };
            let (p, m) = pull(g);
            let mut prefix: Prefix = vs.iter().map(|v| (q, v.clone())).collect();
            prefix.extend(p);
            (prefix, m)
        }
    }
}

fn build(prefix: Prefix, matrix: Formula) -> Formula {
    let mut blocks: Vec<(Quantifier, Vec<Symbol>)> = Vec::new();
    for (q, v) in prefix {
        match blocks.last_mut() {
            Some((last, vars)) if *last == q => vars.push(v),
            _ => blocks.push((q, vec![v])),
        }
    }
    blocks.into_iter().rev().fold(matrix, |body, (q, vars)| Formula::quantified(q, vars, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_formula;
    use crate::logic::signature::Signature;

    fn p(text: &str) -> Formula {
        parse_formula(text, &Signature::relational(&[("E", 2)])).unwrap()
    }

    #[test]
    fn pulls_existential_out_of_consequent() {
        let f = p("(forall (x) (implies (rel E x x) (exists (y) (rel E x y))))");
        let expected = p("(forall (x) (exists (y) (implies (rel E x x) (rel E x y))))");
        assert_eq!(prenex_normal_form(&f).unwrap(), expected);
    }

    #[test]
    fn negation_dualises() {
        let f = p("(not (forall (x) (rel E x x)))");
        assert_eq!(prenex_normal_form(&f).unwrap(), p("(exists (x) (not (rel E x x)))"));
    }

    #[test]
    fn universality() {
        assert_eq!(is_universal(&p("(forall (x) (rel E x x))")), Ok(true));
        assert_eq!(is_universal(&p("(exists (x) (rel E x x))")), Ok(false));
        assert_eq!(is_universal(&p("(forall (x) (implies (exists (y) (rel E x y)) (rel E x x)))")), Ok(true));
        assert_eq!(is_universal(&p("(forall (x) (implies (not (exists (y) (rel E x y))) (rel E x x)))")), Ok(false));
    }

    #[test]
    fn clashing_binders_are_renamed() {
        let f = p("(and (forall (x) (rel E x x)) (exists (x) (rel E x y)))");
        let g = prenex_normal_form(&f).unwrap();
        let prefix = prenex_prefix(&f).unwrap();
        assert_eq!(prefix.len(), 2);
        assert_ne!(prefix[0].1, prefix[1].1);
        assert!(!g.has_shadowing());
        assert_eq!(g.free_vars(), f.free_vars());
    }

    #[test]
    fn monadic_atoms_are_rejected() {
        assert_eq!(prenex_normal_form(&p("(forall (x) (mon 2 x))")), Err(PrenexError::MonadicAtom(2)));
    }
}
