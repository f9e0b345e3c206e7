use super::syntax::Formula;

/// Removes verum/falsum, flattens nested conjunctions and disjunctions, drops double
/// negation and vacuous quantifiers. Preserves truth on non-empty universes.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Rel(..) | Formula::Mon(..) => f.clone(),
        Formula::Eq(a, b) if a == b => Formula::True,
        Formula::Eq(..) => f.clone(),
        Formula::Not(g) => match simplify(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => *h,
            h => Formula::not(h),
        },
        Formula::And(gs) => {
            let mut parts = Vec::with_capacity(gs.len());
            for g in gs {
                match simplify(g) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::And(hs) => parts.extend(hs),
                    h => parts.push(h),
                }
            }
            Formula::conj(parts)
        }
        Formula::Or(gs) => {
            let mut parts = Vec::with_capacity(gs.len());
            for g in gs {
                match simplify(g) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(hs) => parts.extend(hs),
                    h => parts.push(h),
                }
            }
            Formula::disj(parts)
        }
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, b) => b,
            (a, Formula::False) => match a {
                Formula::Not(h) => *h,
                a => Formula::not(a),
            },
            (a, b) => Formula::implies(a, b),
        },
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            let body = simplify(g);
            let free = body.free_vars();
            let kept: Vec<_> = vs.iter().filter(|v| free.contains(*v)).cloned().collect();
            match body {
                Formula::True | Formula::False => body,
                body if matches!(f, Formula::Forall(..)) => Formula::forall(kept, body),
                body => Formula::exists(kept, body),
            }
        }
    }
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
    fn eliminates_constants() {
        assert_eq!(simplify(&p("(forall (x) (implies (true) (or (false) (mon 1 x))))")), p("(forall (x) (mon 1 x))"));
        assert_eq!(simplify(&p("(and (rel E x y) (false))")), Formula::False);
        assert_eq!(simplify(&p("(implies (rel E x y) (false))")), p("(not (rel E x y))"));
    }

    #[test]
    fn flattens() {
        assert_eq!(
            simplify(&p("(and (rel E x y) (and (rel E y x) (true)) (and))")),
            p("(and (rel E x y) (rel E y x))")
        );
    }

    #[test]
    fn drops_vacuous_binders() {
        assert_eq!(simplify(&p("(forall (x y) (rel E x x))")), p("(forall (x) (rel E x x))"));
    }
}
