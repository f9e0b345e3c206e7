//! TPTP FOF output and a reader for the fragment the writer produces.

use std::fmt::Write as _;

use thiserror::Error;

use super::syntax::{sym, Formula, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TptpError {
    #[error("monadic atom C_{0} has no TPTP rendering")]
    MonadicAtom(usize),
    #[error("TPTP syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
}

fn is_lower_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn functor(name: &str) -> String {
    if is_lower_word(name) {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

/// TPTP variables must start with an uppercase letter. Identifier-like names get a `V`
/// prefix; anything else is hex-encoded behind a `W`.
fn variable(name: &str) -> String {
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        format!("V{name}")
    } else {
        let mut out = String::from("W");
        for b in name.bytes() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(&variable(v)),
        Term::Const(c) => out.push_str(&functor(c)),
        Term::App(f, args) => {
            out.push_str(&functor(f));
            write_args(out, args);
        }
    }
}

fn write_args(out: &mut String, args: &[Term]) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(out, a);
    }
    out.push(')');
}

fn write_formula(out: &mut String, f: &Formula) -> Result<(), TptpError> {
    match f {
        Formula::True => out.push_str("$true"),
        Formula::False => out.push_str("$false"),
        Formula::Rel(r, args) => {
            out.push_str(&functor(r));
            write_args(out, args);
        }
        Formula::Eq(a, b) => {
            out.push('(');
            write_term(out, a);
            out.push_str(" = ");
            write_term(out, b);
            out.push(')');
        }
        Formula::Mon(k, _) => return Err(TptpError::MonadicAtom(*k)),
        Formula::Not(g) => {
            out.push('~');
            write_formula(out, g)?;
        }
        Formula::And(gs) | Formula::Or(gs) => match gs.len() {
            0 => out.push_str(if matches!(f, Formula::And(_)) { "$true" } else { "$false" }),
            1 => write_formula(out, &gs[0])?,
            _ => {
                let op = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                out.push('(');
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(op);
                    }
                    write_formula(out, g)?;
                }
                out.push(')');
            }
        },
        Formula::Implies(a, b) => {
            out.push('(');
            write_formula(out, a)?;
            out.push_str(" => ");
            write_formula(out, b)?;
            out.push(')');
        }
        Formula::Forall(vs, g) | Formula::Exists(vs, g) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "(! [" } else { "(? [" });
            out.push_str(&vs.iter().map(|v| variable(v)).collect::<Vec<_>>().join(","));
            out.push_str("] : ");
            write_formula(out, g)?;
            out.push(')');
        }
    }
    Ok(())
}

pub fn formula_to_tptp(f: &Formula) -> Result<String, TptpError> {
    let mut out = String::new();
    write_formula(&mut out, f)?;
    Ok(out)
}

/// One `fof(name, axiom, ...).` line.
pub fn fof_axiom(name: &str, f: &Formula) -> Result<String, TptpError> {
    Ok(format!("fof({}, axiom, {}).", functor(name), formula_to_tptp(f)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Var(String),
    Dollar(String),
    Punct(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, TptpError> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    const PUNCT: &[&str] = &["<=>", "=>", "!=", "(", ")", "[", "]", ",", ":", ".", "~", "&", "|", "!", "?", "="];
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '%' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c == '\'' {
            let start = i;
            i += 1;
            let mut s = String::new();
            loop {
                match bytes.get(i) {
                    None => return Err(TptpError::Syntax { offset: start, msg: "unterminated quote".into() }),
                    Some(b'\\') => {
                        let next =
                            *bytes.get(i + 1).ok_or(TptpError::Syntax { offset: i, msg: "bad escape".into() })?;
                        s.push(next as char);
                        i += 2;
                    }
                    Some(b'\'') => {
                        i += 1;
                        break;
                    }
                    Some(_) => {
                        let ch = text[i..].chars().next().unwrap();
                        s.push(ch);
                        i += ch.len_utf8();
                    }
                }
            }
            out.push((start, Tok::Word(s)));
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
            let start = i;
            i += 1;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = text[start..i].to_string();
            let tok = if c == '$' {
                Tok::Dollar(word)
            } else if c.is_ascii_uppercase() {
                Tok::Var(word)
            } else {
                Tok::Word(word)
            };
            out.push((start, tok));
        } else {
            let p = PUNCT
                .iter()
                .find(|p| text[i..].starts_with(**p))
                .ok_or_else(|| TptpError::Syntax { offset: i, msg: format!("unexpected character `{c}`") })?;
            out.push((i, Tok::Punct(p)));
            i += p.len();
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

fn decode_var(v: &str) -> Symbol {
    if let Some(hex) = v.strip_prefix('W') {
        let bytes: Option<Vec<u8>> =
            (0..hex.len() / 2).map(|i| u8::from_str_radix(hex.get(2 * i..2 * i + 2)?, 16).ok()).collect();
        if let Some(name) = bytes.and_then(|b| String::from_utf8(b).ok()) {
            return sym(&name);
        }
    }
    sym(v.strip_prefix('V').unwrap_or(v))
}

impl Parser {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TptpError> {
        let offset = self.toks.get(self.idx).map(|t| t.0).unwrap_or(self.end);
        Err(TptpError::Syntax { offset, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.1)
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(q)) if *q == p) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), TptpError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn word(&mut self) -> Result<String, TptpError> {
        match self.peek().cloned() {
            Some(Tok::Word(w)) => {
                self.idx += 1;
                Ok(w)
            }
            _ => self.err("expected a name"),
        }
    }

    fn statement(&mut self) -> Result<(String, Formula), TptpError> {
        match self.word()?.as_str() {
            "fof" => {}
            other => return self.err(format!("unsupported statement `{other}`")),
        }
        self.expect("(")?;
        let name = self.word()?;
        self.expect(",")?;
        self.word()?;
        self.expect(",")?;
        let f = self.formula()?;
        self.expect(")")?;
        self.expect(".")?;
        Ok((name, f))
    }

    fn formula(&mut self) -> Result<Formula, TptpError> {
        let first = self.unitary()?;
        if self.eat("=>") {
            return Ok(Formula::implies(first, self.unitary()?));
        }
        if self.eat("<=>") {
            let rhs = self.unitary()?;
            return Ok(Formula::And(vec![Formula::implies(first.clone(), rhs.clone()), Formula::implies(rhs, first)]));
        }
        for (op, is_and) in [("&", true), ("|", false)] {
            if self.eat(op) {
                let mut items = vec![first, self.unitary()?];
                while self.eat(op) {
                    items.push(self.unitary()?);
                }
                return Ok(if is_and { Formula::And(items) } else { Formula::Or(items) });
            }
        }
        Ok(first)
    }

    fn unitary(&mut self) -> Result<Formula, TptpError> {
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("~") {
            return Ok(Formula::not(self.unitary()?));
        }
        for (p, universal) in [("!", true), ("?", false)] {
            if self.eat(p) {
                self.expect("[")?;
                let mut vars = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Tok::Var(v)) => {
                            self.idx += 1;
                            vars.push(decode_var(&v));
                        }
                        _ => return self.err("expected a variable"),
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("]")?;
                self.expect(":")?;
                let body = Box::new(self.unitary()?);
                return Ok(if universal { Formula::Forall(vars, body) } else { Formula::Exists(vars, body) });
            }
        }
        if let Some(Tok::Dollar(d)) = self.peek().cloned() {
            self.idx += 1;
            return match d.as_str() {
                "$true" => Ok(Formula::True),
                "$false" => Ok(Formula::False),
                other => self.err(format!("unsupported `{other}`")),
            };
        }
        let lhs = self.term()?;
        if self.eat("=") {
            return Ok(Formula::Eq(lhs, self.term()?));
        }
        if self.eat("!=") {
            return Ok(Formula::not(Formula::Eq(lhs, self.term()?)));
        }
        match lhs {
            Term::Const(c) => Ok(Formula::Rel(c, Vec::new())),
            Term::App(f, args) => Ok(Formula::Rel(f, args)),
            Term::Var(_) => self.err("variable used as a formula"),
        }
    }

    fn term(&mut self) -> Result<Term, TptpError> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.idx += 1;
                Ok(Term::Var(decode_var(&v)))
            }
            Some(Tok::Word(w)) => {
                self.idx += 1;
                if self.eat("(") {
                    let mut args = vec![self.term()?];
                    while self.eat(",") {
                        args.push(self.term()?);
                    }
                    self.expect(")")?;
                    Ok(Term::App(sym(&w), args))
                } else {
                    Ok(Term::Const(sym(&w)))
                }
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Reads `fof` statements. Nullary symbols come back as constants in term position
/// and as 0-ary relations in formula position.
pub fn parse_tptp(text: &str) -> Result<Vec<(String, Formula)>, TptpError> {
    let mut p = Parser { toks: tokenize(text)?, idx: 0, end: text.len() };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.statement()?);
    }
    Ok(out)
}

/// Collapses empty and singleton conjunctions/disjunctions the way the writer renders them.
pub fn normalize_for_tptp(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) | Formula::Mon(..) => f.clone(),
        Formula::Not(g) => Formula::not(normalize_for_tptp(g)),
        Formula::And(gs) => match gs.len() {
            0 => Formula::True,
            1 => normalize_for_tptp(&gs[0]),
            _ => Formula::And(gs.iter().map(normalize_for_tptp).collect()),
        },
        Formula::Or(gs) => match gs.len() {
            0 => Formula::False,
            1 => normalize_for_tptp(&gs[0]),
            _ => Formula::Or(gs.iter().map(normalize_for_tptp).collect()),
        },
        Formula::Implies(a, b) => Formula::implies(normalize_for_tptp(a), normalize_for_tptp(b)),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(normalize_for_tptp(g))),
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(normalize_for_tptp(g))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse_formula;
    use crate::logic::signature::Signature;

    #[test]
    fn renders_connectives() {
        let sig = Signature::relational(&[("E", 2), ("leq", 2)]);
        let f = parse_formula("(forall (x y) (implies (rel E x y) (and (not (= x y)) (rel leq x y))))", &sig).unwrap();
        assert_eq!(
            fof_axiom("ax_0", &f).unwrap(),
            "fof(ax_0, axiom, (! [Vx,Vy] : ('E'(Vx,Vy) => (~(Vx = Vy) & leq(Vx,Vy)))))."
        );
    }

    #[test]
    fn round_trip() {
        let sig = Signature::relational(&[("E", 2), ("p", 0)]);
        let f = parse_formula(
            "(exists (x) (or (and) (or (rel p)) (forall (y z) (implies (rel E y z) (and (false) (= y x))))))",
            &sig,
        )
        .unwrap();
        let text = fof_axiom("t", &f).unwrap();
        let back = parse_tptp(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].0, "t");
        assert!(back[0].1.alpha_eq(&normalize_for_tptp(&f)), "{text}");
    }

    #[test]
    fn odd_variable_names_survive() {
        assert_eq!(decode_var(&variable("x'1")), sym("x'1"));
        assert_eq!(decode_var(&variable("a_xb_c")), sym("a_xb_c"));
    }

    #[test]
    fn monadic_atoms_rejected() {
        assert_eq!(formula_to_tptp(&Formula::mon(1, Term::var("x"))), Err(TptpError::MonadicAtom(1)));
    }
}
