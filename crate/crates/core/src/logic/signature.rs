use std::fmt;

use thiserror::Error;

use super::syntax::{sym, Formula, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared more than once")]
    Duplicate(String),
    #[error("function `{0}` must have arity >= 1")]
    NullaryFunction(String),
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{0}` is not a {1}")]
    WrongKind(String, &'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Relation(usize),
    Constant,
    Function(usize),
}

/// Relation, constant and function symbols with their arities. Names are unique
/// across the three kinds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    relations: Vec<(Symbol, usize)>,
    constants: Vec<Symbol>,
    functions: Vec<(Symbol, usize)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Purely relational signature; panics on duplicate names, so meant for literals.
    pub fn relational(rels: &[(&str, usize)]) -> Self {
        let mut s = Signature::new();
        for (name, arity) in rels {
            s.add_relation(name, *arity).expect("duplicate relation in literal signature");
        }
        s
    }

    fn ensure_fresh(&self, name: &str) -> Result<(), SignatureError> {
        if self.kind(name).is_some() {
            Err(SignatureError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        self.relations.push((sym(name), arity));
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), SignatureError> {
        self.ensure_fresh(name)?;
        self.constants.push(sym(name));
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if arity == 0 {
            return Err(SignatureError::NullaryFunction(name.to_string()));
        }
        self.ensure_fresh(name)?;
        self.functions.push((sym(name), arity));
        Ok(())
    }

    pub fn relations(&self) -> &[(Symbol, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[Symbol] {
        &self.constants
    }

    pub fn functions(&self) -> &[(Symbol, usize)] {
        &self.functions
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        if let Some((_, a)) = self.relations.iter().find(|(n, _)| &**n == name) {
            return Some(SymbolKind::Relation(*a));
        }
        if self.constants.iter().any(|n| &**n == name) {
            return Some(SymbolKind::Constant);
        }
        self.functions.iter().find(|(n, _)| &**n == name).map(|(_, a)| SymbolKind::Function(*a))
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        match self.kind(name) {
            Some(SymbolKind::Relation(a)) => Some(a),
            _ => None,
        }
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        match self.kind(name) {
            Some(SymbolKind::Function(a)) => Some(a),
            _ => None,
        }
    }

    pub fn has_constant(&self, name: &str) -> bool {
        matches!(self.kind(name), Some(SymbolKind::Constant))
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty() && self.constants.is_empty() && self.functions.is_empty()
    }

    pub fn check_term(&self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Const(c) => match self.kind(c) {
                Some(SymbolKind::Constant) => Ok(()),
                Some(_) => Err(SignatureError::WrongKind(c.to_string(), "constant")),
                None => Err(SignatureError::Undeclared(c.to_string())),
            },
            Term::App(f, args) => {
                match self.kind(f) {
                    Some(SymbolKind::Function(a)) if a == args.len() => {}
                    Some(SymbolKind::Function(a)) => {
                        return Err(SignatureError::Arity { name: f.to_string(), expected: a, found: args.len() })
                    }
                    Some(_) => return Err(SignatureError::WrongKind(f.to_string(), "function")),
                    None => return Err(SignatureError::Undeclared(f.to_string())),
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Checks that every symbol used by `f` is declared with the right arity.
    pub fn check_formula(&self, f: &Formula) -> Result<(), SignatureError> {
        let mut result = Ok(());
        f.visit(&mut |g| {
            if result.is_err() {
                return;
            }
            result = match g {
                Formula::Rel(r, args) => match self.kind(r) {
                    Some(SymbolKind::Relation(a)) if a == args.len() => {
                        args.iter().try_for_each(|t| self.check_term(t))
                    }
                    Some(SymbolKind::Relation(a)) => {
                        Err(SignatureError::Arity { name: r.to_string(), expected: a, found: args.len() })
                    }
                    Some(_) => Err(SignatureError::WrongKind(r.to_string(), "relation")),
                    None => Err(SignatureError::Undeclared(r.to_string())),
                },
                Formula::Eq(a, b) => self.check_term(a).and_then(|_| self.check_term(b)),
                Formula::Mon(_, t) => self.check_term(t),
                _ => Ok(()),
            };
        });
        result
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, a) in &self.relations {
            parts.push(format!("{n}/{a}"));
        }
        for c in &self.constants {
            parts.push(format!("const {c}"));
        }
        for (n, a) in &self.functions {
            parts.push(format!("fn {n}/{a}"));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}
