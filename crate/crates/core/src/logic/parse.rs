//! S-expression reader and the formula DSL.
//!
//! ```text
//! term    := VAR | (const NAME) | (fn NAME term+)
//! formula := (true) | (false) | (rel NAME term*) | (= term term) | (mon K term)
//!          | (not f) | (and f*) | (or f*) | (implies f f)
//!          | (forall (VAR+) f) | (exists (VAR+) f)
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::signature::{Signature, SymbolKind};
use super::syntax::{sym, Formula, Symbol, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("undeclared symbol `{name}` at {pos}")]
    Undeclared { pos: Pos, name: String },
    #[error("arity mismatch at {pos}: `{name}` expects {expected} argument(s), found {found}")]
    Arity { pos: Pos, name: String, expected: usize, found: usize },
}

impl ParseError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError::Syntax { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The list items after a leading keyword atom, if this is `(keyword ...)`.
    pub fn tagged(&self, keyword: &str) -> Option<&[SExpr]> {
        let items = self.as_list()?;
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == keyword => Some(&items[1..]),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }
}

/// Reads every top-level S-expression in `text`.
pub fn read_sexprs(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut reader = Reader { chars: text.chars().collect(), idx: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.expr()?);
    }
}

/// Reads exactly one S-expression.
pub fn read_sexpr(text: &str) -> Result<SExpr, ParseError> {
    let mut all = read_sexprs(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(ParseError::syntax(Pos { line: 1, col: 1 }, "empty input")),
        _ => Err(ParseError::syntax(all[1].pos(), "trailing input after expression")),
    }
}

struct Reader {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
}

impl Reader {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expr(&mut self) -> Result<SExpr, ParseError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Err(ParseError::syntax(start, "unexpected end of input")),
            Some(')') => Err(ParseError::syntax(start, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(ParseError::syntax(start, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.expr()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(SExpr::Atom(s, start))
            }
        }
    }
}

/// Parses a formula and checks it against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    formula_from_sexpr(&read_sexpr(text)?, sig)
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    term_from_sexpr(&read_sexpr(text)?, sig)
}

const KEYWORDS: &[&str] =
    &["true", "false", "rel", "=", "mon", "not", "and", "or", "implies", "forall", "exists", "const", "fn"];

fn variable(e: &SExpr) -> Result<Symbol, ParseError> {
    match e {
        SExpr::Atom(name, pos) => {
            if KEYWORDS.contains(&name.as_str()) {
                Err(ParseError::syntax(*pos, format!("keyword `{name}` used as a variable")))
            } else {
                Ok(sym(name))
            }
        }
        SExpr::List(_, pos) => Err(ParseError::syntax(*pos, "expected a variable name")),
    }
}

fn name(e: &SExpr) -> Result<&str, ParseError> {
    e.as_atom().ok_or_else(|| ParseError::syntax(e.pos(), "expected a symbol name"))
}

pub fn term_from_sexpr(e: &SExpr, sig: &Signature) -> Result<Term, ParseError> {
    let SExpr::List(items, pos) = e else {
        return variable(e).map(Term::Var);
    };
    let pos = *pos;
    match e.head() {
        Some("const") => {
            if items.len() != 2 {
                return Err(ParseError::syntax(pos, "expected (const NAME)"));
            }
            let c = name(&items[1])?;
            match sig.kind(c) {
                Some(SymbolKind::Constant) => Ok(Term::constant(c)),
                _ => Err(ParseError::Undeclared { pos: items[1].pos(), name: c.to_string() }),
            }
        }
        Some("fn") => {
            if items.len() < 3 {
                return Err(ParseError::syntax(pos, "expected (fn NAME term+)"));
            }
            let f = name(&items[1])?;
            let args = items[2..].iter().map(|a| term_from_sexpr(a, sig)).collect::<Result<Vec<_>, _>>()?;
            match sig.kind(f) {
                Some(SymbolKind::Function(a)) if a == args.len() => Ok(Term::app(f, args)),
                Some(SymbolKind::Function(a)) => {
                    Err(ParseError::Arity { pos, name: f.to_string(), expected: a, found: args.len() })
                }
                _ => Err(ParseError::Undeclared { pos: items[1].pos(), name: f.to_string() }),
            }
        }
        _ => Err(ParseError::syntax(pos, "expected a term")),
    }
}

fn expect_len(items: &[SExpr], n: usize, pos: Pos, shape: &str) -> Result<(), ParseError> {
    if items.len() == n {
        Ok(())
    } else {
        Err(ParseError::syntax(pos, format!("expected {shape}")))
    }
}

pub fn formula_from_sexpr(e: &SExpr, sig: &Signature) -> Result<Formula, ParseError> {
    let SExpr::List(items, pos) = e else {
        return Err(ParseError::syntax(e.pos(), "expected a parenthesised formula"));
    };
    let pos = *pos;
    let Some(head) = e.head() else {
        return Err(ParseError::syntax(pos, "expected a formula keyword"));
    };
    let args = &items[1..];
    let sub = |f: &SExpr| formula_from_sexpr(f, sig);
    match head {
        "true" => expect_len(items, 1, pos, "(true)").map(|_| Formula::True),
        "false" => expect_len(items, 1, pos, "(false)").map(|_| Formula::False),
        "rel" => {
            let r = args.first().ok_or_else(|| ParseError::syntax(pos, "expected (rel NAME term*)"))?;
            let r = name(r)?;
            let terms = args[1..].iter().map(|t| term_from_sexpr(t, sig)).collect::<Result<Vec<_>, _>>()?;
            match sig.kind(r) {
                Some(SymbolKind::Relation(a)) if a == terms.len() => Ok(Formula::rel(r, terms)),
                Some(SymbolKind::Relation(a)) => {
                    Err(ParseError::Arity { pos, name: r.to_string(), expected: a, found: terms.len() })
                }
                _ => Err(ParseError::Undeclared { pos: args[0].pos(), name: r.to_string() }),
            }
        }
        "=" => {
            expect_len(items, 3, pos, "(= term term)")?;
            Ok(Formula::eq(term_from_sexpr(&args[0], sig)?, term_from_sexpr(&args[1], sig)?))
        }
        "mon" => {
            expect_len(items, 3, pos, "(mon K term)")?;
            let k: usize = name(&args[0])?
                .parse()
                .ok()
                .filter(|k| *k >= 1)
                .ok_or_else(|| ParseError::syntax(args[0].pos(), "monadic index must be an integer >= 1"))?;
            Ok(Formula::mon(k, term_from_sexpr(&args[1], sig)?))
        }
        "not" => {
            expect_len(items, 2, pos, "(not f)")?;
            Ok(Formula::not(sub(&args[0])?))
        }
        "and" => Ok(Formula::And(args.iter().map(sub).collect::<Result<_, _>>()?)),
        "or" => Ok(Formula::Or(args.iter().map(sub).collect::<Result<_, _>>()?)),
        "implies" => {
            expect_len(items, 3, pos, "(implies f f)")?;
            Ok(Formula::implies(sub(&args[0])?, sub(&args[1])?))
        }
        "forall" | "exists" => {
            expect_len(items, 3, pos, &format!("({head} (VAR+) f)"))?;
            let vars =
                args[0].as_list().ok_or_else(|| ParseError::syntax(args[0].pos(), "expected a variable list"))?;
            if vars.is_empty() {
                return Err(ParseError::syntax(args[0].pos(), "quantifier needs at least one variable"));
            }
            let vars = vars.iter().map(variable).collect::<Result<Vec<_>, _>>()?;
            let body = Box::new(sub(&args[1])?);
            Ok(if head == "forall" { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) })
        }
        other => Err(ParseError::syntax(pos, format!("unknown formula keyword `{other}`"))),
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t);
    s
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Const(c) => {
            let _ = write!(out, "(const {c})");
        }
        Term::App(f, args) => {
            let _ = write!(out, "(fn {f}");
            for a in args {
                out.push(' ');
                write_term(out, a);
            }
            out.push(')');
        }
    }
}

/// Single-line rendering in the DSL; `parse_formula` inverts it.
pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f);
    s
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("(true)"),
        Formula::False => out.push_str("(false)"),
        Formula::Rel(r, args) => {
            let _ = write!(out, "(rel {r}");
            for a in args {
                out.push(' ');
                write_term(out, a);
            }
            out.push(')');
        }
        Formula::Eq(a, b) => {
            out.push_str("(= ");
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push(')');
        }
        Formula::Mon(k, t) => {
            let _ = write!(out, "(mon {k} ");
            write_term(out, t);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(out, g);
            out.push(')');
        }
        Formula::And(gs) | Formula::Or(gs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for g in gs {
                out.push(' ');
                write_formula(out, g);
            }
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(implies ");
            write_formula(out, a);
            out.push(' ');
            write_formula(out, b);
            out.push(')');
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "(forall (" } else { "(exists (" });
            out.push_str(&vs.iter().map(|v| v.as_ref()).collect::<Vec<_>>().join(" "));
            out.push_str(") ");
            write_formula(out, g);
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph() -> Signature {
        Signature::relational(&[("E", 2)])
    }

    #[test]
    fn relational_atom() {
        let f = parse_formula("(rel E x y)", &graph()).unwrap();
        assert_eq!(f, Formula::rel("E", vec![Term::var("x"), Term::var("y")]));
    }

    #[test]
    fn quantified_implication() {
        let f = parse_formula("(forall (x) (implies (rel E x x) (false)))", &graph()).unwrap();
        let expected = Formula::forall(
            vec![sym("x")],
            Formula::implies(Formula::rel("E", vec![Term::var("x"), Term::var("x")]), Formula::False),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn monadic_atom_needs_no_context() {
        assert_eq!(parse_formula("(mon 1 x)", &graph()).unwrap(), Formula::mon(1, Term::var("x")));
        assert!(parse_formula("(mon 0 x)", &graph()).is_err());
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "; leading comment\n(and\n  (rel E x y) ; trailing\n  (true))";
        let f = parse_formula(text, &graph()).unwrap();
        assert_eq!(f, Formula::And(vec![Formula::rel("E", vec![Term::var("x"), Term::var("y")]), Formula::True]));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("(and\n  (rel F x))", &graph()) {
            Err(ParseError::Undeclared { pos, name }) => {
                assert_eq!(name, "F");
                assert_eq!(pos, Pos { line: 2, col: 8 });
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_formula("(rel E x)", &graph()), Err(ParseError::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse_formula("(rel E x y", &graph()), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_formula("(forall () (true))", &graph()), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn terms_with_constants_and_functions() {
        let mut sig = graph();
        sig.add_constant("c").unwrap();
        sig.add_function("f", 1).unwrap();
        let f = parse_formula("(= (fn f (const c)) x)", &sig).unwrap();
        assert_eq!(print_formula(&f), "(= (fn f (const c)) x)");
        assert!(matches!(parse_formula("(= (fn f x x) x)", &sig), Err(ParseError::Arity { .. })));
    }

    #[test]
    fn print_round_trip() {
        let text = "(forall (x y) (implies (and (rel E x y) (not (= x y))) (or (mon 2 x) (exists (z) (rel E y z)))))";
        let f = parse_formula(text, &graph()).unwrap();
        assert_eq!(print_formula(&f), text);
    }
}
