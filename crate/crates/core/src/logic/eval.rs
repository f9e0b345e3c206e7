//! Tarskian evaluation over finite models.

use std::collections::BTreeSet;

use super::structure::{tuples, EvalError, Model};
use super::syntax::{Formula, Symbol, Term};

/// Interpretation of the monadic predicates `C_1..C_K`.
pub trait Monadic {
    /// Number of predicates interpreted.
    fn count(&self) -> usize;
    /// Whether element `e` belongs to `C_k` (1-based). Only called with `1 <= k <= count()`.
    fn contains(&self, k: usize, e: usize) -> bool;
}

/// No monadic predicates: any `C_k` atom is an error.
pub struct NoMonadic;

impl Monadic for NoMonadic {
    fn count(&self) -> usize {
        0
    }
    fn contains(&self, _: usize, _: usize) -> bool {
        false
    }
}

impl Monadic for [BTreeSet<usize>] {
    fn count(&self) -> usize {
        self.len()
    }
    fn contains(&self, k: usize, e: usize) -> bool {
        self[k - 1].contains(&e)
    }
}

impl Monadic for Vec<BTreeSet<usize>> {
    fn count(&self) -> usize {
        self.len()
    }
    fn contains(&self, k: usize, e: usize) -> bool {
        self[k - 1].contains(&e)
    }
}

/// Variable bindings. Later bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    stack: Vec<(Symbol, usize)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `vars[i]` to `values[i]`.
    pub fn bind(vars: &[Symbol], values: &[usize]) -> Self {
        Assignment { stack: vars.iter().cloned().zip(values.iter().copied()).collect() }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        Assignment { stack: pairs.into_iter().map(|(n, e)| (Symbol::from(n), e)).collect() }
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.stack.iter().rev().find(|(n, _)| &**n == name).map(|(_, e)| *e)
    }

    pub fn push(&mut self, name: Symbol, value: usize) {
        self.stack.push((name, value));
    }

    pub fn pop(&mut self) {
        self.stack.pop();
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.stack.truncate(len);
    }

    fn set_top(&mut self, depth_from_top: usize, value: usize) {
        let i = self.stack.len() - 1 - depth_from_top;
        self.stack[i].1 = value;
    }
}

pub fn eval_term<M: Model + ?Sized>(a: &M, v: &Assignment, t: &Term) -> Result<usize, EvalError> {
    match t {
        Term::Var(x) => v.get(x).ok_or_else(|| EvalError::Unassigned(x.to_string())),
        Term::Const(c) => a.constant(c),
        Term::App(f, args) => {
            let vals = args.iter().map(|s| eval_term(a, v, s)).collect::<Result<Vec<_>, _>>()?;
            a.function(f, &vals)
        }
    }
}

/// Evaluates `f` in `a` under `v`, interpreting `C_k` as `mon[k-1]` when supplied.
pub fn eval_formula<M: Model + ?Sized>(
    a: &M,
    v: &Assignment,
    f: &Formula,
    mon: Option<&[BTreeSet<usize>]>,
) -> Result<bool, EvalError> {
    let mut v = v.clone();
    match mon {
        Some(sets) => eval_in(a, &mut v, f, sets),
        None => eval_in(a, &mut v, f, &NoMonadic),
    }
}

/// Evaluates a sentence with no monadic atoms under the empty assignment.
pub fn eval_sentence<M: Model + ?Sized>(a: &M, f: &Formula) -> Result<bool, EvalError> {
    eval_in(a, &mut Assignment::new(), f, &NoMonadic)
}

/// Core evaluator. `v` is restored to its original contents on return.
pub fn eval_in<M: Model + ?Sized, S: Monadic + ?Sized>(
    a: &M,
    v: &mut Assignment,
    f: &Formula,
    mon: &S,
) -> Result<bool, EvalError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Rel(r, args) => {
            let vals = args.iter().map(|t| eval_term(a, v, t)).collect::<Result<Vec<_>, _>>()?;
            a.relation(r, &vals)
        }
        Formula::Eq(s, t) => Ok(eval_term(a, v, s)? == eval_term(a, v, t)?),
        Formula::Mon(k, t) => {
            if *k == 0 || *k > mon.count() {
                return Err(EvalError::MonadicIndex { k: *k, supplied: mon.count() });
            }
            Ok(mon.contains(*k, eval_term(a, v, t)?))
        }
        Formula::Not(g) => Ok(!eval_in(a, v, g, mon)?),
        Formula::And(gs) => {
            for g in gs {
                if !eval_in(a, v, g, mon)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_in(a, v, g, mon)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Implies(p, q) => Ok(!eval_in(a, v, p, mon)? || eval_in(a, v, q, mon)?),
        Formula::Forall(vs, body) => quantify(a, v, vs, body, mon, true),
        Formula::Exists(vs, body) => quantify(a, v, vs, body, mon, false),
    }
}

/// All tuples over the universe that satisfy `f` when assigned to `vars` in order.
pub fn satisfying_tuples<M: Model + ?Sized>(a: &M, vars: &[Symbol], f: &Formula) -> Result<Vec<Vec<usize>>, EvalError> {
    let mut out = Vec::new();
    let mut v = Assignment::new();
    for t in tuples(a.size(), vars.len()) {
        for (x, e) in vars.iter().zip(&t) {
            v.push(x.clone(), *e);
        }
        let ok = eval_in(a, &mut v, f, &NoMonadic)?;
        v.truncate(0);
        if ok {
            out.push(t);
        }
    }
    Ok(out)
}

// Odometer over all assignments to `vs`; stops at the first value that decides the quantifier.
fn quantify<M: Model + ?Sized, S: Monadic + ?Sized>(
    a: &M,
    v: &mut Assignment,
    vs: &[Symbol],
    body: &Formula,
    mon: &S,
    universal: bool,
) -> Result<bool, EvalError> {
    let mark = v.len();
    for x in vs {
        v.push(x.clone(), 0);
    }
    let n = a.size();
    let mut digits = vec![0usize; vs.len()];
    let result = loop {
        match eval_in(a, v, body, mon) {
            Ok(b) if b != universal => break Ok(!universal),
            Ok(_) => {}
            Err(e) => break Err(e),
        }
        // advance, last variable fastest
        let k = vs.len();
        let mut pos = k;
        let exhausted = loop {
            if pos == 0 {
                break true;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < n {
                v.set_top(k - 1 - pos, digits[pos]);
                break false;
            }
            digits[pos] = 0;
            v.set_top(k - 1 - pos, 0);
        };
        if exhausted {
            break Ok(universal);
        }
    };
    v.truncate(mark);
    result
}
