//! Membership by brute-force enumeration of the monadic witnesses.

use std::fmt;

use crate::logic::{eval_in, eval_sentence, satisfying_tuples, Assignment, Formula, Model, Monadic, Symbol};

use super::{SeparationError, SeparationRule, SeparationScheme};

pub const DEFAULT_SIZE_CAP: usize = 6;

/// Largest `K * n` for which all subset tuples are enumerated.
pub const MAX_SUBSET_BITS: usize = 36;

/// `K` subsets of an `n`-element universe packed into one word; bit `(k-1)*n + e` is `e in C_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackedSets {
    pub bits: u64,
    pub size: usize,
    pub count: usize,
}

impl Monadic for PackedSets {
    fn count(&self) -> usize {
        self.count
    }
    fn contains(&self, k: usize, e: usize) -> bool {
        self.bits >> ((k - 1) * self.size + e) & 1 == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    In,
    Out,
    SuperclassViolation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::In => "in",
            Verdict::Out => "out",
            Verdict::SuperclassViolation => "superclass-violation",
        })
    }
}

struct Guarded<'r> {
    vars: &'r [Symbol],
    psi: &'r Formula,
    tuples: Vec<Vec<usize>>,
}

/// Decides `A |= rule` with the closure rule cut off after `max_index`.
///
/// Positive rules enumerate every `K`-tuple of subsets, so the universe must have at most
/// `size_cap` elements.
pub fn eval_rule_direct<M: Model + ?Sized>(
    a: &M,
    rule: &SeparationRule,
    max_index: usize,
    size_cap: usize,
) -> Result<bool, SeparationError> {
    let p = match rule {
        SeparationRule::Order0(f) => return Ok(eval_sentence(a, f)?),
        SeparationRule::Positive(p) => p,
    };
    let n = a.size();
    if n > size_cap {
        return Err(SeparationError::SizeCap { size: n, cap: size_cap });
    }
    let k = p.order();
    let bits = k * n;
    if bits > MAX_SUBSET_BITS {
        return Err(SeparationError::EnumerationCap { bits, cap: MAX_SUBSET_BITS });
    }
    let conjuncts = p.conjuncts(max_index);
    let guarded = conjuncts
        .iter()
        .map(|c| Ok(Guarded { vars: &c.vars, psi: &c.psi, tuples: satisfying_tuples(a, &c.vars, &c.gamma)? }))
        .collect::<Result<Vec<_>, SeparationError>>()?;
    let openings = satisfying_tuples(a, p.vars(), p.mu())?;

    // closure status per subset tuple: 0 unknown, 1 closed, 2 not closed
    let mut cache = if bits <= 24 { vec![0u8; 1 << bits] } else { Vec::new() };
    let mut closed = |sets: PackedSets| -> Result<bool, SeparationError> {
        let slot = cache.get(sets.bits as usize).copied().unwrap_or(0);
        if slot != 0 {
            return Ok(slot == 1);
        }
        let mut ok = true;
        'outer: for g in &guarded {
            for t in &g.tuples {
                let mut v = Assignment::bind(g.vars, t);
                if !eval_in(a, &mut v, g.psi, &sets)? {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if let Some(c) = cache.get_mut(sets.bits as usize) {
            *c = if ok { 1 } else { 2 };
        }
        Ok(ok)
    };

    for opening in &openings {
        let mut v = Assignment::bind(p.vars(), opening);
        let mut witnessed = false;
        for mask in 0..(1u64 << bits) {
            let sets = PackedSets { bits: mask, size: n, count: k };
            if eval_in(a, &mut v, p.eta(), &sets)? && closed(sets)? {
                witnessed = true;
                break;
            }
        }
        if !witnessed {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn satisfies_superclass<M: Model + ?Sized>(a: &M, scheme: &SeparationScheme) -> Result<bool, SeparationError> {
    for f in scheme.superclass() {
        if !eval_sentence(a, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Superclass check followed by [`eval_rule_direct`] on every rule.
pub fn check_membership_direct<M: Model + ?Sized>(
    a: &M,
    scheme: &SeparationScheme,
    max_index: usize,
    size_cap: usize,
) -> Result<Verdict, SeparationError> {
    if !satisfies_superclass(a, scheme)? {
        return Ok(Verdict::SuperclassViolation);
    }
    for rule in scheme.rules() {
        if !eval_rule_direct(a, rule, max_index, size_cap)? {
            return Ok(Verdict::Out);
        }
    }
    Ok(Verdict::In)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{sym, FiniteStructure, Term};
    use crate::separation::{ClosureConjunct, ClosureRule};

    fn c(k: usize, v: &str) -> Formula {
        Formula::mon(k, Term::var(v))
    }

    // Two colours, written out by hand so this module does not depend on the built-ins.
    fn two_colouring() -> SeparationRule {
        let y = Term::var("y");
        let tau0 = ClosureConjunct::new(vec![sym("y")], Formula::True, Formula::Or(vec![c(1, "y"), c(2, "y")]));
        let tau1 = ClosureConjunct::new(
            vec![sym("y")],
            Formula::True,
            Formula::not(Formula::And(vec![Formula::mon(1, y.clone()), Formula::mon(2, y)])),
        );
        let tau2 = ClosureConjunct::new(
            vec![sym("y1"), sym("y2")],
            Formula::rel("E", vec![Term::var("y1"), Term::var("y2")]),
            Formula::And((1..=2).map(|k| Formula::not(Formula::And(vec![c(k, "y1"), c(k, "y2")]))).collect()),
        );
        SeparationRule::positive(
            2,
            vec![sym("x")],
            Formula::True,
            Formula::True,
            ClosureRule::Explicit(vec![tau0, tau1, tau2]),
        )
        .unwrap()
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> FiniteStructure {
        let tuples: Vec<Vec<usize>> = edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect();
        FiniteStructure::new(n).unwrap().with_relation("E", 2, &tuples).unwrap()
    }

    #[test]
    fn bipartite_and_odd_cycle() {
        let rule = two_colouring();
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let k3 = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let k1 = graph(1, &[]);
        assert!(eval_rule_direct(&c4, &rule, 2, DEFAULT_SIZE_CAP).unwrap());
        assert!(!eval_rule_direct(&k3, &rule, 2, DEFAULT_SIZE_CAP).unwrap());
        assert!(eval_rule_direct(&k1, &rule, 2, DEFAULT_SIZE_CAP).unwrap());
        // without the edge conjunct K3 is fine
        assert!(eval_rule_direct(&k3, &rule, 1, DEFAULT_SIZE_CAP).unwrap());
    }

    #[test]
    fn size_cap_is_an_error() {
        let big = graph(7, &[]);
        assert!(matches!(
            eval_rule_direct(&big, &two_colouring(), 2, DEFAULT_SIZE_CAP),
            Err(SeparationError::SizeCap { size: 7, cap: 6 })
        ));
    }

    #[test]
    fn packed_sets_layout() {
        let s = PackedSets { bits: 0b100_010, size: 3, count: 2 };
        assert!(s.contains(1, 1));
        assert!(s.contains(2, 2));
        assert!(!s.contains(2, 1));
    }
}
