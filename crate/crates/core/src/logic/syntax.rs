//! First-order terms and formulas, extended with monadic atoms `C_k(t)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// Interned-ish name for variables and non-logical symbols. Cheap to clone.
pub type Symbol = Arc<str>;

pub fn sym(name: &str) -> Symbol {
    Arc::from(name)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Symbol),
    Const(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(sym(name))
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(sym(name), args)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => &**v == name,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.mentions(name)),
        }
    }

    /// Replaces variables according to `map`; unmapped variables are kept.
    pub fn rename(&self, map: &HashMap<Symbol, Symbol>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(map)).collect()),
        }
    }

    fn node_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::node_count).sum::<usize>(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

/// A formula over a first-order signature plus the monadic predicates `C_1, C_2, ...`.
///
/// Conjunction and disjunction are n-ary; the empty conjunction is true and the
/// empty disjunction is false.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Rel(Symbol, Vec<Term>),
    Eq(Term, Term),
    /// `C_k(t)`, with `k >= 1`.
    Mon(usize, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Vec<Symbol>, Box<Formula>),
    Exists(Vec<Symbol>, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel(sym(name), args)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Eq(lhs, rhs)
    }

    pub fn mon(k: usize, t: Term) -> Formula {
        Formula::Mon(k, t)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction that collapses the empty case to `True` and a single conjunct to itself.
    pub fn conj(mut items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::True,
            1 => items.pop().unwrap(),
            _ => Formula::And(items),
        }
    }

    /// Disjunction that collapses the empty case to `False` and a single disjunct to itself.
    pub fn disj(mut items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::False,
            1 => items.pop().unwrap(),
            _ => Formula::Or(items),
        }
    }

    /// Universal closure over `vars`; no quantifier node is produced for an empty list.
    pub fn forall(vars: Vec<Symbol>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Forall(vars, Box::new(body))
        }
    }

    pub fn exists(vars: Vec<Symbol>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn quantified(q: Quantifier, vars: Vec<Symbol>, body: Formula) -> Formula {
        match q {
            Quantifier::Forall => Formula::forall(vars, body),
            Quantifier::Exists => Formula::exists(vars, body),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, args) => args.iter().for_each(|t| free_in_term(t, bound, out)),
            Formula::Eq(a, b) => {
                free_in_term(a, bound, out);
                free_in_term(b, bound, out);
            }
            Formula::Mon(_, t) => free_in_term(t, bound, out),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let mark = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(mark);
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel(_, args) => args.iter().for_each(|t| t.collect_vars(&mut out)),
            Formula::Eq(a, b) => {
                a.collect_vars(&mut out);
                b.collect_vars(&mut out);
            }
            Formula::Mon(_, t) => t.collect_vars(&mut out),
            Formula::Forall(vs, _) | Formula::Exists(vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            _ => {}
        }
    }

    fn any(&self, pred: impl Fn(&Formula) -> bool) -> bool {
        let mut found = false;
        self.visit(&mut |f| found = found || pred(f));
        found
    }

    /// True when no monadic atom occurs.
    pub fn is_pure(&self) -> bool {
        !self.any(|f| matches!(f, Formula::Mon(..)))
    }

    pub fn is_quantifier_free(&self) -> bool {
        !self.any(|f| matches!(f, Formula::Forall(..) | Formula::Exists(..)))
    }

    /// Largest `k` of any `C_k` atom, or 0 when the formula is pure.
    pub fn max_monadic_index(&self) -> usize {
        let mut k = 0;
        self.visit(&mut |f| {
            if let Formula::Mon(i, _) = f {
                k = k.max(*i);
            }
        });
        k
    }

    pub fn monadic_atom_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if let Formula::Mon(..) = f {
                n += 1;
            }
        });
        n
    }

    /// Number of AST nodes, counting terms.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Rel(_, args) => 1 + args.iter().map(Term::node_count).sum::<usize>(),
            Formula::Eq(a, b) => 1 + a.node_count() + b.node_count(),
            Formula::Mon(_, t) => 1 + t.node_count(),
            Formula::Not(f) => 1 + f.node_count(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::node_count).sum::<usize>(),
            Formula::Implies(a, b) => 1 + a.node_count() + b.node_count(),
            Formula::Forall(vs, f) | Formula::Exists(vs, f) => 1 + vs.len() + f.node_count(),
        }
    }

    /// True if some quantifier binds a variable already bound by an enclosing quantifier
    /// (or twice in the same list).
    pub fn has_shadowing(&self) -> bool {
        fn go(f: &Formula, bound: &mut Vec<Symbol>) -> bool {
            match f {
                Formula::Not(g) => go(g, bound),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().any(|g| go(g, bound)),
                Formula::Implies(a, b) => go(a, bound) || go(b, bound),
                Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
                    let mark = bound.len();
                    for v in vs {
                        if bound.contains(v) {
                            bound.truncate(mark);
                            return true;
                        }
                        bound.push(v.clone());
                    }
                    let r = go(g, bound);
                    bound.truncate(mark);
                    r
                }
                _ => false,
            }
        }
        go(self, &mut Vec::new())
    }

    /// Rewrites every monadic atom `C_k(t)` with `replace(k, t)`.
    pub fn replace_monadic(&self, replace: &mut impl FnMut(usize, &Term) -> Formula) -> Formula {
        match self {
            Formula::Mon(k, t) => replace(*k, t),
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.replace_monadic(replace)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.replace_monadic(replace)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.replace_monadic(replace)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.replace_monadic(replace), b.replace_monadic(replace)),
            Formula::Forall(vs, f) => Formula::Forall(vs.clone(), Box::new(f.replace_monadic(replace))),
            Formula::Exists(vs, f) => Formula::Exists(vs.clone(), Box::new(f.replace_monadic(replace))),
        }
    }

    /// Capture-avoiding renaming of free variables. Bound variables that would capture a
    /// renamed occurrence are themselves renamed to fresh primed names.
    pub fn rename_free(&self, map: &HashMap<Symbol, Symbol>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let mut taken = self.all_vars();
        taken.extend(map.values().cloned());
        self.rename_free_inner(map, &mut taken)
    }

    fn rename_free_inner(&self, map: &HashMap<Symbol, Symbol>, taken: &mut BTreeSet<Symbol>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| t.rename(map)).collect()),
            Formula::Eq(a, b) => Formula::Eq(a.rename(map), b.rename(map)),
            Formula::Mon(k, t) => Formula::Mon(*k, t.rename(map)),
            Formula::Not(f) => Formula::not(f.rename_free_inner(map, taken)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_free_inner(map, taken)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_free_inner(map, taken)).collect()),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_free_inner(map, taken), b.rename_free_inner(map, taken))
            }
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let mut inner = map.clone();
                for v in vs {
                    inner.remove(v);
                }
                let free = body.free_vars();
                let targets: BTreeSet<Symbol> =
                    inner.iter().filter(|(from, _)| free.contains(*from)).map(|(_, to)| to.clone()).collect();
                let mut new_vs = Vec::with_capacity(vs.len());
                for v in vs {
                    if targets.contains(v) {
                        let fresh = fresh_name(v, taken);
                        inner.insert(v.clone(), fresh.clone());
                        new_vs.push(fresh);
                    } else {
                        new_vs.push(v.clone());
                    }
                }
                let new_body = Box::new(body.rename_free_inner(&inner, taken));
                match self {
                    Formula::Forall(..) => Formula::Forall(new_vs, new_body),
                    _ => Formula::Exists(new_vs, new_body),
                }
            }
        }
    }

    /// Renames free variables through `free` and gives every bound variable a new name
    /// drawn from `fresh`. The caller guarantees the fresh names are unused.
    pub fn standardize(&self, free: &HashMap<Symbol, Symbol>, fresh: &mut dyn FnMut() -> Symbol) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|t| t.rename(free)).collect()),
            Formula::Eq(a, b) => Formula::Eq(a.rename(free), b.rename(free)),
            Formula::Mon(k, t) => Formula::Mon(*k, t.rename(free)),
            Formula::Not(f) => Formula::not(f.standardize(free, fresh)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.standardize(free, fresh)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.standardize(free, fresh)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.standardize(free, fresh), b.standardize(free, fresh)),
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let mut inner = free.clone();
                let new_vs: Vec<Symbol> = vs
                    .iter()
                    .map(|v| {
                        let n = fresh();
                        inner.insert(v.clone(), n.clone());
                        n
                    })
                    .collect();
                let new_body = Box::new(body.standardize(&inner, fresh));
                match self {
                    Formula::Forall(..) => Formula::Forall(new_vs, new_body),
                    _ => Formula::Exists(new_vs, new_body),
                }
            }
        }
    }

    /// Alpha-equivalence: equal up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_inner(self, other, &mut Vec::new())
    }
}

fn free_in_term(t: &Term, bound: &[Symbol], out: &mut BTreeSet<Symbol>) {
    let mut vs = BTreeSet::new();
    t.collect_vars(&mut vs);
    out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
}

pub(crate) fn fresh_name(base: &Symbol, taken: &mut BTreeSet<Symbol>) -> Symbol {
    let mut n = 1usize;
    loop {
        let candidate: Symbol = sym(&format!("{base}_{n}"));
        if !taken.contains(&candidate) {
            taken.insert(candidate.clone());
            return candidate;
        }
        n += 1;
    }
}

fn alpha_term(a: &Term, b: &Term, bound: &[(Symbol, Symbol)]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let lx = bound.iter().rposition(|(l, _)| l == x);
            let ry = bound.iter().rposition(|(_, r)| r == y);
            match (lx, ry) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_term(x, y, bound))
        }
        _ => false,
    }
}

fn alpha_eq_inner(a: &Formula, b: &Formula, bound: &mut Vec<(Symbol, Symbol)>) -> bool {
    use Formula::*;
    match (a, b) {
        (True, True) | (False, False) => true,
        (Rel(r, xs), Rel(s, ys)) => {
            r == s && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_term(x, y, bound))
        }
        (Eq(a1, a2), Eq(b1, b2)) => alpha_term(a1, b1, bound) && alpha_term(a2, b2, bound),
        (Mon(k, s), Mon(l, t)) => k == l && alpha_term(s, t, bound),
        (Not(f), Not(g)) => alpha_eq_inner(f, g, bound),
        (And(fs), And(gs)) | (Or(fs), Or(gs)) => {
            fs.len() == gs.len() && fs.iter().zip(gs).all(|(f, g)| alpha_eq_inner(f, g, bound))
        }
        (Implies(f1, f2), Implies(g1, g2)) => alpha_eq_inner(f1, g1, bound) && alpha_eq_inner(f2, g2, bound),
        (Forall(vs, f), Forall(ws, g)) | (Exists(vs, f), Exists(ws, g)) => {
            if vs.len() != ws.len() {
                return false;
            }
            let mark = bound.len();
            bound.extend(vs.iter().cloned().zip(ws.iter().cloned()));
            let r = alpha_eq_inner(f, g, bound);
            bound.truncate(mark);
            r
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn free_vars_respect_binding() {
        let f = Formula::forall(vec![sym("x")], Formula::rel("E", vec![x(), y()]));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![sym("y")]);
        assert!(!f.is_closed());
    }

    #[test]
    fn smart_constructors_collapse() {
        assert_eq!(Formula::conj(vec![]), Formula::True);
        assert_eq!(Formula::disj(vec![]), Formula::False);
        let a = Formula::rel("P", vec![x()]);
        assert_eq!(Formula::conj(vec![a.clone()]), a);
        assert_eq!(Formula::forall(vec![], a.clone()), a);
    }

    #[test]
    fn rename_avoids_capture() {
        // (exists y E(x,y))[x := y] must not capture.
        let f = Formula::exists(vec![sym("y")], Formula::rel("E", vec![x(), y()]));
        let map = HashMap::from([(sym("x"), sym("y"))]);
        let g = f.rename_free(&map);
        assert_eq!(g.free_vars().into_iter().collect::<Vec<_>>(), vec![sym("y")]);
        match g {
            Formula::Exists(vs, _) => assert_ne!(vs[0], sym("y")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn alpha_equivalence() {
        let f = Formula::forall(vec![sym("x")], Formula::rel("E", vec![x(), x()]));
        let g = Formula::forall(vec![sym("z")], Formula::rel("E", vec![Term::var("z"), Term::var("z")]));
        let h = Formula::forall(vec![sym("z")], Formula::rel("E", vec![Term::var("z"), x()]));
        assert!(f.alpha_eq(&g));
        assert!(!f.alpha_eq(&h));
    }

    #[test]
    fn shadowing_detection() {
        let inner = Formula::exists(vec![sym("x")], Formula::rel("P", vec![x()]));
        let f = Formula::forall(vec![sym("x")], inner.clone());
        assert!(f.has_shadowing());
        let g = Formula::And(vec![inner.clone(), inner]);
        assert!(!g.has_shadowing());
    }
}
