//! Translation of a scheme into a first-order theory over an extended signature,
//! replacing each `C_k` of a rule with a fresh relation indexed by the round-0 tuple.

use std::collections::{BTreeSet, HashMap};

use crate::logic::syntax::fresh_name;
use crate::logic::{eval_sentence, EvalError, Formula, Model, Signature, Symbol, Term};

use super::{SeparationError, SeparationRule, SeparationScheme};

pub const DEFAULT_EXPANSION_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshRelation {
    pub name: Symbol,
    pub arity: usize,
    pub rule: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheorySentence {
    pub label: String,
    pub rule: usize,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedTheory {
    pub signature: Signature,
    pub fresh: Vec<FreshRelation>,
    pub sentences: Vec<TheorySentence>,
}

fn hat(f: &Formula, rels: &[Symbol], xs: &[Symbol]) -> Formula {
    f.replace_monadic(&mut |k, t| {
        let mut args: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
        args.push(t.clone());
        Formula::Rel(rels[k - 1].clone(), args)
    })
}

/// Builds the extended theory. Generated closure rules must be truncated first.
pub fn to_pseudoelementary(scheme: &SeparationScheme) -> Result<ExtendedTheory, SeparationError> {
    let mut signature = scheme.signature().clone();
    let mut fresh = Vec::new();
    let mut sentences = Vec::new();
    for (r, rule) in scheme.rules().iter().enumerate() {
        let p = match rule {
            SeparationRule::Order0(f) => {
                sentences.push(TheorySentence { label: format!("rule{r}"), rule: r, formula: f.clone() });
                continue;
            }
            SeparationRule::Positive(p) => p,
        };
        let Some(_) = p.tau().len() else {
            return Err(SeparationError::Untruncated(r));
        };
        let xs = p.vars();
        let mut rels = Vec::with_capacity(p.order());
        for k in 1..=p.order() {
            let mut name = format!("R_{r}_{k}");
            while signature.kind(&name).is_some() {
                name.push('_');
            }
            signature.add_relation(&name, xs.len() + 1)?;
            let name: Symbol = name.into();
            fresh.push(FreshRelation { name: name.clone(), arity: xs.len() + 1, rule: r, k });
            rels.push(name);
        }
        let premise = |body: Formula| Formula::forall(xs.to_vec(), Formula::implies(p.mu().clone(), body));
        sentences.push(TheorySentence {
            label: format!("rule{r}_init"),
            rule: r,
            formula: premise(hat(p.eta(), &rels, xs)),
        });

        let outer: BTreeSet<Symbol> = xs.iter().cloned().collect();
        for (i, c) in p.tau().truncate(usize::MAX).iter().enumerate() {
            let mut taken: BTreeSet<Symbol> = outer.clone();
            taken.extend(c.gamma.all_vars());
            taken.extend(c.psi.all_vars());
            taken.extend(c.vars.iter().cloned());
            taken.extend(p.mu().all_vars());
            let mut rename = HashMap::new();
            let ys: Vec<Symbol> = c
                .vars
                .iter()
                .map(|y| {
                    if outer.contains(y) {
                        let n = fresh_name(y, &mut taken);
                        rename.insert(y.clone(), n.clone());
                        n
                    } else {
                        y.clone()
                    }
                })
                .collect();
            let gamma = c.gamma.rename_free(&rename);
            let psi = c.psi.rename_free(&rename);
            let body = Formula::forall(ys, Formula::implies(gamma, hat(&psi, &rels, xs)));
            sentences.push(TheorySentence { label: format!("rule{r}_conj{i}"), rule: r, formula: premise(body) });
        }
    }
    Ok(ExtendedTheory { signature, fresh, sentences })
}

/// The base structure with fresh relations read from a bit vector.
struct Expansion<'a, M: ?Sized> {
    base: &'a M,
    fresh: &'a HashMap<Symbol, (usize, usize)>,
    bits: u64,
}

impl<M: Model + ?Sized> Model for Expansion<'_, M> {
    fn size(&self) -> usize {
        self.base.size()
    }

    fn relation(&self, name: &str, args: &[usize]) -> Result<bool, EvalError> {
        match self.fresh.get(name) {
            Some(&(arity, offset)) => {
                if args.len() != arity {
                    return Err(EvalError::Arity { name: name.to_string(), expected: arity, found: args.len() });
                }
                let n = self.base.size();
                let idx = args.iter().fold(0, |acc, &a| acc * n + a);
                Ok(self.bits >> (offset + idx) & 1 == 1)
            }
            None => self.base.relation(name, args),
        }
    }

    fn constant(&self, name: &str) -> Result<usize, EvalError> {
        self.base.constant(name)
    }

    fn function(&self, name: &str, args: &[usize]) -> Result<usize, EvalError> {
        self.base.function(name, args)
    }
}

/// Whether some interpretation of the fresh relations makes every sentence true.
///
/// Rules share no fresh symbols, so each rule's relations are searched independently.
pub fn check_pseudoelementary<M: Model + ?Sized>(
    a: &M,
    theory: &ExtendedTheory,
    bit_cap: usize,
) -> Result<bool, SeparationError> {
    let n = a.size();
    let rules: BTreeSet<usize> = theory.sentences.iter().map(|s| s.rule).collect();
    for r in rules {
        let group: Vec<&Formula> = theory.sentences.iter().filter(|s| s.rule == r).map(|s| &s.formula).collect();
        let mut layout = HashMap::new();
        let mut offset = 0usize;
        for f in theory.fresh.iter().filter(|f| f.rule == r) {
            layout.insert(f.name.clone(), (f.arity, offset));
            offset = n
                .checked_pow(f.arity as u32)
                .and_then(|c| c.checked_add(offset))
                .ok_or(SeparationError::EnumerationCap { bits: usize::MAX, cap: bit_cap })?;
        }
        if offset > bit_cap || offset >= 64 {
            return Err(SeparationError::EnumerationCap { bits: offset, cap: bit_cap });
        }
        let mut satisfied = false;
        for bits in 0..(1u64 << offset) {
            let model = Expansion { base: a, fresh: &layout, bits };
            let mut all = true;
            for f in &group {
                if !eval_sentence(&model, f)? {
                    all = false;
                    break;
                }
            }
            if all {
                satisfied = true;
                break;
            }
        }
        if !satisfied {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, sym};
    use crate::separation::{ClosureConjunct, ClosureRule};

    fn scheme(rule: SeparationRule) -> SeparationScheme {
        SeparationScheme::new(Signature::relational(&[("E", 2)]), vec![], vec![rule]).unwrap()
    }

    #[test]
    fn order0_passes_through() {
        let f = parse_formula("(forall (x) (not (rel E x x)))", &Signature::relational(&[("E", 2)])).unwrap();
        let t = to_pseudoelementary(&scheme(SeparationRule::order0(f.clone()).unwrap())).unwrap();
        assert!(t.fresh.is_empty());
        assert_eq!(t.sentences[0].formula, f);
    }

    #[test]
    fn eta_substitution() {
        let eta = Formula::And(vec![Formula::mon(1, Term::var("x1")), Formula::not(Formula::mon(1, Term::var("x2")))]);
        let rule =
            SeparationRule::positive(1, vec![sym("x1"), sym("x2")], Formula::True, eta, ClosureRule::Top).unwrap();
        let t = to_pseudoelementary(&scheme(rule)).unwrap();
        let r = |v: &str| Formula::rel("R_0_1", vec![Term::var("x1"), Term::var("x2"), Term::var(v)]);
        let expected = Formula::forall(
            vec![sym("x1"), sym("x2")],
            Formula::implies(Formula::True, Formula::And(vec![r("x1"), Formula::not(r("x2"))])),
        );
        assert_eq!(t.sentences.len(), 1);
        assert_eq!(t.sentences[0].formula, expected);
        assert_eq!(t.signature.relation_arity("R_0_1"), Some(3));
    }

    #[test]
    fn clashing_conjunct_variables_are_renamed() {
        let conj = ClosureConjunct::new(vec![sym("x")], Formula::True, Formula::mon(1, Term::var("x")));
        let rule = SeparationRule::positive(
            1,
            vec![sym("x")],
            Formula::True,
            Formula::True,
            ClosureRule::Explicit(vec![conj]),
        )
        .unwrap();
        let t = to_pseudoelementary(&scheme(rule)).unwrap();
        let f = &t.sentences[1].formula;
        assert!(f.is_closed());
        assert!(!f.has_shadowing());
    }

    #[test]
    fn generated_rules_need_truncation() {
        let gen = ClosureRule::generated("g", vec![], |_| {
            ClosureConjunct::new(vec![sym("y")], Formula::True, Formula::mon(1, Term::var("y")))
        });
        let rule = SeparationRule::positive(1, vec![], Formula::True, Formula::True, gen).unwrap();
        let s = scheme(rule);
        assert!(matches!(to_pseudoelementary(&s), Err(SeparationError::Untruncated(0))));
        assert_eq!(to_pseudoelementary(&s.truncated(2)).unwrap().sentences.len(), 4);
    }
}
