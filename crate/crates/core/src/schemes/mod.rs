//! Built-in separation schemes: graph colouring, harmonious colouring, clique covers,
//! disjoint-union partial algebras and `(alpha, beta)`-representable posets.

pub mod graphs;

use std::fmt;

use thiserror::Error;

use crate::logic::{sym, Formula, Signature, Symbol, Term};
use crate::separation::{
    parse_scheme, ClosureConjunct, ClosureRule, SeparationError, SeparationRule, SeparationScheme,
};

pub use graphs::{
    check_simple_graph, complement_graph, complete, cycle, edge_count, edgeless, edges, from_edges,
    graphs_up_to_isomorphism, labelled_graphs, path, relabel, GraphError, EDGE,
};

pub const POSET_RELATION: &str = "leq";
pub const DUPA_RELATION: &str = "d";
pub const OMEGA_FILTER: &str = "poset-omega-filter";
pub const FILTER: &str = "poset-filter";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown built-in scheme {0:?}; expected colouring:N, harmonious:N, clique-cover:N, dupa or poset:A:B")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn rel(name: &str, args: &[&str]) -> Formula {
    Formula::rel(name, args.iter().map(|a| v(a)).collect())
}

fn c(k: usize, var: &str) -> Formula {
    Formula::mon(k, v(var))
}

fn vars(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| sym(n)).collect()
}

fn numbered(base: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{base}{i}")).collect()
}

fn check_colours(n: usize) -> Result<(), SchemeError> {
    if n == 0 {
        return Err(SchemeError::InvalidParameter("the number of colours must be at least 1".into()));
    }
    Ok(())
}

fn graph_signature() -> Signature {
    Signature::relational(&[(EDGE, 2)])
}

fn graph_theory() -> Vec<Formula> {
    vec![
        Formula::forall(vars(&["x"]), Formula::not(rel(EDGE, &["x", "x"]))),
        Formula::forall(vars(&["x", "y"]), Formula::implies(rel(EDGE, &["x", "y"]), rel(EDGE, &["y", "x"]))),
    ]
}

/// Every vertex gets a colour, at most one, and `guard(y1, y2)` pairs get different colours.
fn colouring_conjuncts(n: usize, guard: Formula) -> Vec<ClosureConjunct> {
    let some = ClosureConjunct::new(vars(&["y"]), Formula::True, Formula::disj((1..=n).map(|k| c(k, "y")).collect()));
    let mut pairs = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            pairs.push(Formula::not(Formula::And(vec![c(a, "y"), c(b, "y")])));
        }
    }
    let at_most_one = ClosureConjunct::new(vars(&["y"]), Formula::True, Formula::conj(pairs));
    let proper = ClosureConjunct::new(
        vars(&["y1", "y2"]),
        guard,
        Formula::conj((1..=n).map(|k| Formula::not(Formula::And(vec![c(k, "y1"), c(k, "y2")]))).collect()),
    );
    vec![some, at_most_one, proper]
}

fn graph_scheme(n: usize, conjuncts: Vec<ClosureConjunct>) -> Result<SeparationScheme, SchemeError> {
    let rule =
        SeparationRule::positive(n, vars(&["x"]), Formula::True, Formula::True, ClosureRule::Explicit(conjuncts))?;
    Ok(SeparationScheme::new(graph_signature(), graph_theory(), vec![rule])?)
}

/// Graphs with a proper `n`-colouring.
pub fn colouring_scheme(n: usize) -> Result<SeparationScheme, SchemeError> {
    check_colours(n)?;
    graph_scheme(n, colouring_conjuncts(n, rel(EDGE, &["y1", "y2"])))
}

/// Proper `n`-colourings in which no two distinct directed edges share a colour pattern.
pub fn harmonious_scheme(n: usize) -> Result<SeparationScheme, SchemeError> {
    check_colours(n)?;
    let mut conjuncts = colouring_conjuncts(n, rel(EDGE, &["y1", "y2"]));
    let eq = |a: &str, b: &str| Formula::eq(v(a), v(b));
    let guard = Formula::And(vec![
        Formula::not(Formula::And(vec![eq("y1", "y3"), eq("y2", "y4")])),
        rel(EDGE, &["y1", "y2"]),
        rel(EDGE, &["y3", "y4"]),
    ]);
    let mut body = Vec::new();
    for m in 1..=n {
        for k in 1..=n {
            body.push(Formula::not(Formula::And(vec![c(m, "y1"), c(k, "y2"), c(m, "y3"), c(k, "y4")])));
        }
    }
    conjuncts.push(ClosureConjunct::new(vars(&["y1", "y2", "y3", "y4"]), guard, Formula::conj(body)));
    graph_scheme(n, conjuncts)
}

/// Graphs whose vertices split into `n` cliques: colourings of the complement.
pub fn clique_cover_scheme(n: usize) -> Result<SeparationScheme, SchemeError> {
    check_colours(n)?;
    let non_edge =
        Formula::And(vec![Formula::not(rel(EDGE, &["y1", "y2"])), Formula::not(Formula::eq(v("y1"), v("y2")))]);
    graph_scheme(n, colouring_conjuncts(n, non_edge))
}

/// Partial algebras over a ternary `d` representable as disjoint unions.
pub fn dupa_scheme() -> SeparationScheme {
    let d = || rel(DUPA_RELATION, &["y1", "y2", "y3"]);
    let ys = || vars(&["y1", "y2", "y3"]);
    let either = || Formula::Or(vec![c(1, "y1"), c(1, "y2")]);
    let closure = ClosureRule::Explicit(vec![
        ClosureConjunct::new(ys(), d(), Formula::implies(c(1, "y3"), either())),
        ClosureConjunct::new(ys(), d(), Formula::implies(either(), c(1, "y3"))),
        ClosureConjunct::new(ys(), d(), Formula::Or(vec![Formula::not(c(1, "y1")), Formula::not(c(1, "y2"))])),
    ]);
    let xs = || vars(&["x1", "x2"]);
    let separate = SeparationRule::positive(
        1,
        xs(),
        Formula::not(Formula::eq(v("x1"), v("x2"))),
        Formula::Or(vec![
            Formula::And(vec![c(1, "x1"), Formula::not(c(1, "x2"))]),
            Formula::And(vec![c(1, "x2"), Formula::not(c(1, "x1"))]),
        ]),
        closure.clone(),
    )
    .expect("well-formed rule");
    let undefined = SeparationRule::positive(
        1,
        xs(),
        Formula::not(Formula::exists(vars(&["x3"]), rel(DUPA_RELATION, &["x1", "x2", "x3"]))),
        Formula::And(vec![c(1, "x1"), c(1, "x2")]),
        closure,
    )
    .expect("well-formed rule");
    let functional = Formula::forall(
        vars(&["x1", "x2", "y", "z"]),
        Formula::implies(
            Formula::And(vec![rel(DUPA_RELATION, &["x1", "x2", "y"]), rel(DUPA_RELATION, &["x1", "x2", "z"])]),
            Formula::eq(v("y"), v("z")),
        ),
    );
    SeparationScheme::new(Signature::relational(&[(DUPA_RELATION, 3)]), vec![functional], vec![separate, undefined])
        .expect("well-formed scheme")
}

/// A cardinal bound `2 <= b <= omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Finite(usize),
    Omega,
}

impl Bound {
    fn admits(self, m: usize) -> bool {
        match self {
            Bound::Finite(b) => m < b,
            Bound::Omega => true,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(b) => write!(f, "{b}"),
            Bound::Omega => f.write_str("omega"),
        }
    }
}

impl std::str::FromStr for Bound {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = match s {
            "omega" | "w" | "ω" => Bound::Omega,
            _ => Bound::Finite(s.parse().map_err(|_| SchemeError::InvalidParameter(format!("bad bound {s:?}")))?),
        };
        if b == Bound::Finite(0) || b == Bound::Finite(1) {
            return Err(SchemeError::InvalidParameter(format!("bound {s} is below 2")));
        }
        Ok(b)
    }
}

fn leq(a: &str, b: &str) -> Formula {
    rel(POSET_RELATION, &[a, b])
}

/// `z` is the least upper bound (`join`) or greatest lower bound of `ys`.
fn bound_formula(ys: &[String], join: bool) -> Formula {
    let below = |a: &str, b: &str| if join { leq(a, b) } else { leq(b, a) };
    let bounds = |t: &str| Formula::conj(ys.iter().map(|y| below(y, t)).collect());
    Formula::And(vec![bounds("z"), Formula::forall(vars(&["w"]), Formula::implies(bounds("w"), below("z", "w")))])
}

fn upward() -> ClosureConjunct {
    ClosureConjunct::new(vars(&["y", "z"]), leq("y", "z"), Formula::implies(c(1, "y"), c(1, "z")))
}

fn meet(m: usize) -> ClosureConjunct {
    let ys = numbered("y", m);
    let all = Formula::conj(ys.iter().map(|y| c(1, y)).collect());
    let mut vs: Vec<Symbol> = ys.iter().map(|y| sym(y)).collect();
    vs.push(sym("z"));
    ClosureConjunct::new(vs, bound_formula(&ys, false), Formula::implies(all, c(1, "z")))
}

fn join(m: usize) -> ClosureConjunct {
    let ys = numbered("y", m);
    let some = Formula::disj(ys.iter().map(|y| c(1, y)).collect());
    let mut vs: Vec<Symbol> = ys.iter().map(|y| sym(y)).collect();
    vs.push(sym("z"));
    ClosureConjunct::new(vs, bound_formula(&ys, true), Formula::implies(c(1, "z"), some))
}

/// Slot `t >= 1` of the unrenumbered sequence: odd slots are joins, even slots meets.
fn slot(t: usize, meets: Bound, joins: Bound) -> Option<ClosureConjunct> {
    if t % 2 == 1 {
        let m = t.div_ceil(2);
        joins.admits(m).then(|| join(m))
    } else {
        let m = t / 2;
        meets.admits(m).then(|| meet(m))
    }
}

/// Conjunct `i` of the filter closure after dropping the meets and joins not admitted.
fn filter_conjunct(i: usize, meets: Bound, joins: Bound) -> ClosureConjunct {
    if i == 0 {
        return upward();
    }
    (1..).filter_map(|t| slot(t, meets, joins)).nth(i - 1).expect("an omega bound gives infinitely many conjuncts")
}

/// Closure properties of filters preserving meets of size `< meets` and joins of size `< joins`.
pub fn poset_closure(meets: Bound, joins: Bound) -> ClosureRule {
    match (meets, joins) {
        (Bound::Finite(a), Bound::Finite(b)) => {
            let last = 2 * a.max(b);
            let mut list = vec![upward()];
            list.extend((1..=last).filter_map(|t| slot(t, meets, joins)));
            ClosureRule::Explicit(list)
        }
        (Bound::Omega, Bound::Omega) => {
            ClosureRule::generated(OMEGA_FILTER, vec![], move |i| filter_conjunct(i, meets, joins))
        }
        _ => ClosureRule::generated(FILTER, vec![meets.to_string(), joins.to_string()], move |i| {
            filter_conjunct(i, meets, joins)
        }),
    }
}

fn poset_theory() -> Vec<Formula> {
    vec![
        Formula::forall(vars(&["x"]), leq("x", "x")),
        Formula::forall(
            vars(&["x", "y"]),
            Formula::implies(Formula::And(vec![leq("x", "y"), leq("y", "x")]), Formula::eq(v("x"), v("y"))),
        ),
        Formula::forall(
            vars(&["x", "y", "z"]),
            Formula::implies(Formula::And(vec![leq("x", "y"), leq("y", "z")]), leq("x", "z")),
        ),
    ]
}

/// Posets embeddable in a powerset preserving meets of size `< meets` and joins of size `< joins`.
pub fn poset_scheme(meets: Bound, joins: Bound) -> SeparationScheme {
    let rule = SeparationRule::positive(
        1,
        vars(&["p", "q"]),
        Formula::not(leq("p", "q")),
        Formula::And(vec![c(1, "p"), Formula::not(c(1, "q"))]),
        poset_closure(meets, joins),
    )
    .expect("well-formed rule");
    SeparationScheme::new(Signature::relational(&[(POSET_RELATION, 2)]), poset_theory(), vec![rule])
        .expect("well-formed scheme")
}

/// Resolves the generated closure rules that scheme files may name.
pub fn resolve_generator(name: &str, args: &[String]) -> Result<ClosureRule, String> {
    match (name, args) {
        (OMEGA_FILTER, []) => Ok(poset_closure(Bound::Omega, Bound::Omega)),
        (FILTER, [a, b]) => {
            let a: Bound = a.parse().map_err(|e: SchemeError| e.to_string())?;
            let b: Bound = b.parse().map_err(|e: SchemeError| e.to_string())?;
            Ok(poset_closure(a, b))
        }
        (OMEGA_FILTER | FILTER, _) => Err(format!("wrong number of arguments for {name}")),
        _ => Err(format!("no generated rule named {name}")),
    }
}

/// Parses a scheme file, resolving the built-in generated rules.
pub fn parse_scheme_file(text: &str) -> Result<SeparationScheme, SeparationError> {
    parse_scheme(text, &resolve_generator)
}

fn count(label: &str, param: Option<&str>) -> Result<usize, SchemeError> {
    let p = param.ok_or_else(|| SchemeError::InvalidParameter(format!("{label} needs a number of colours")))?;
    p.parse().map_err(|_| SchemeError::InvalidParameter(format!("bad number {p:?}")))
}

/// A built-in scheme from `NAME[:PARAM...]`, e.g. `colouring:2`, `dupa`, `poset:3:omega`.
pub fn builtin_scheme(label: &str) -> Result<SeparationScheme, SchemeError> {
    let mut parts = label.split(':');
    let name = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    let one = || -> Result<Option<&str>, SchemeError> {
        match params.as_slice() {
            [] => Ok(None),
            [p] => Ok(Some(*p)),
            _ => Err(SchemeError::InvalidParameter(format!("{name} takes one parameter"))),
        }
    };
    match name {
        "colouring" | "coloring" => colouring_scheme(count(name, one()?)?),
        "harmonious" => harmonious_scheme(count(name, one()?)?),
        "clique-cover" => clique_cover_scheme(count(name, one()?)?),
        "dupa" if params.is_empty() => Ok(dupa_scheme()),
        "poset" => match params.as_slice() {
            [] => Ok(poset_scheme(Bound::Omega, Bound::Omega)),
            [a, b] => Ok(poset_scheme(a.parse()?, b.parse()?)),
            _ => Err(SchemeError::InvalidParameter("poset takes two bounds, e.g. poset:3:omega".into())),
        },
        _ => Err(SchemeError::UnknownBuiltin(label.to_string())),
    }
}
