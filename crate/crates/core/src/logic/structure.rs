//! Finite structures over elements `0..n` and the JSON structure-file format.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::signature::{Signature, SignatureError, SymbolKind};
use super::syntax::{sym, Symbol};

/// Dense tables are used up to this many cells; larger relations fall back to a hash set.
const DENSE_LIMIT: usize = 1 << 22;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("universe must contain at least one element")]
    EmptyUniverse,
    #[error("element {element} out of range for universe of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("tuple {tuple:?} for `{name}` has length {found}, expected {expected}")]
    TupleLength { name: String, tuple: Vec<usize>, expected: usize, found: usize },
    #[error("function `{name}` is not total: no value for arguments {args:?}")]
    NotTotal { name: String, args: Vec<usize> },
    #[error("function `{name}` has two values for arguments {args:?}")]
    NotFunctional { name: String, args: Vec<usize> },
    #[error("table for `{0}` is too large")]
    TooLarge(String),
    #[error("cannot infer the arity of relation `{0}` from an empty tuple list")]
    UnknownArity(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("invalid structure JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("no value assigned to free variable `{0}`")]
    Unassigned(String),
    #[error("monadic atom C_{k} used but only {supplied} set(s) supplied")]
    MonadicIndex { k: usize, supplied: usize },
    #[error("structure does not interpret `{0}`")]
    Uninterpreted(String),
    #[error("`{name}` applied to {found} argument(s), expected {expected}")]
    Arity { name: String, expected: usize, found: usize },
}

/// The interface the evaluator needs from a structure.
pub trait Model {
    fn size(&self) -> usize;
    fn relation(&self, name: &str, args: &[usize]) -> Result<bool, EvalError>;
    fn constant(&self, name: &str) -> Result<usize, EvalError>;
    fn function(&self, name: &str, args: &[usize]) -> Result<usize, EvalError>;
}

fn index_of(args: &[usize], size: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

fn table_len(size: usize, arity: usize) -> Option<usize> {
    size.checked_pow(arity as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Table {
    Dense(Vec<bool>),
    Sparse(HashSet<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    arity: usize,
    table: Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Function {
    arity: usize,
    values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    size: usize,
    relations: BTreeMap<Symbol, Relation>,
    constants: BTreeMap<Symbol, usize>,
    functions: BTreeMap<Symbol, Function>,
}

impl FiniteStructure {
    pub fn new(size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        Ok(FiniteStructure { size, relations: BTreeMap::new(), constants: BTreeMap::new(), functions: BTreeMap::new() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn check_element(&self, e: usize) -> Result<(), StructureError> {
        if e < self.size {
            Ok(())
        } else {
            Err(StructureError::OutOfRange { element: e, size: self.size })
        }
    }

    fn ensure_name_free(&self, name: &str) -> Result<(), StructureError> {
        if self.relations.contains_key(name) || self.constants.contains_key(name) || self.functions.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()).into());
        }
        Ok(())
    }

    /// Declares an (initially empty) relation.
    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), StructureError> {
        self.ensure_name_free(name)?;
        let table = match table_len(self.size, arity) {
            Some(n) if n <= DENSE_LIMIT => Table::Dense(vec![false; n]),
            _ => Table::Sparse(HashSet::new()),
        };
        self.relations.insert(sym(name), Relation { arity, table });
        Ok(())
    }

    pub fn insert_tuple(&mut self, name: &str, tuple: &[usize]) -> Result<(), StructureError> {
        for &e in tuple {
            self.check_element(e)?;
        }
        let size = self.size;
        let rel = self.relations.get_mut(name).ok_or_else(|| SignatureError::Undeclared(name.to_string()))?;
        if rel.arity != tuple.len() {
            return Err(StructureError::TupleLength {
                name: name.to_string(),
                tuple: tuple.to_vec(),
                expected: rel.arity,
                found: tuple.len(),
            });
        }
        match &mut rel.table {
            Table::Dense(bits) => bits[index_of(tuple, size)] = true,
            Table::Sparse(set) => {
                set.insert(tuple.to_vec());
            }
        }
        Ok(())
    }

    pub fn with_relation(mut self, name: &str, arity: usize, tuples: &[Vec<usize>]) -> Result<Self, StructureError> {
        self.add_relation(name, arity)?;
        for t in tuples {
            self.insert_tuple(name, t)?;
        }
        Ok(self)
    }

    pub fn set_constant(&mut self, name: &str, value: usize) -> Result<(), StructureError> {
        self.ensure_name_free(name)?;
        self.check_element(value)?;
        self.constants.insert(sym(name), value);
        Ok(())
    }

    /// Adds a total function given as a closure over argument tuples.
    pub fn set_function(
        &mut self,
        name: &str,
        arity: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<(), StructureError> {
        self.ensure_name_free(name)?;
        if arity == 0 {
            return Err(SignatureError::NullaryFunction(name.to_string()).into());
        }
        let len = table_len(self.size, arity)
            .filter(|&n| n <= DENSE_LIMIT)
            .ok_or_else(|| StructureError::TooLarge(name.to_string()))?;
        let mut values = Vec::with_capacity(len);
        for args in tuples(self.size, arity) {
            let v = f(&args);
            self.check_element(v)?;
            values.push(v);
        }
        self.functions.insert(sym(name), Function { arity, values });
        Ok(())
    }

    /// Adds a function from `(args..., value)` rows, which must cover every argument tuple once.
    pub fn set_function_rows(&mut self, name: &str, arity: usize, rows: &[Vec<usize>]) -> Result<(), StructureError> {
        let len = table_len(self.size, arity)
            .filter(|&n| n <= DENSE_LIMIT)
            .ok_or_else(|| StructureError::TooLarge(name.to_string()))?;
        let mut values: Vec<Option<usize>> = vec![None; len];
        for row in rows {
            if row.len() != arity + 1 {
                return Err(StructureError::TupleLength {
                    name: name.to_string(),
                    tuple: row.clone(),
                    expected: arity + 1,
                    found: row.len(),
                });
            }
            for &e in row {
                self.check_element(e)?;
            }
            let slot = &mut values[index_of(&row[..arity], self.size)];
            if slot.is_some_and(|v| v != row[arity]) {
                return Err(StructureError::NotFunctional { name: name.to_string(), args: row[..arity].to_vec() });
            }
            *slot = Some(row[arity]);
        }
        let table: Vec<usize> = values.iter().copied().collect::<Option<_>>().ok_or_else(|| {
            let missing = tuples(self.size, arity)
                .zip(values.iter())
                .find(|(_, v)| v.is_none())
                .map(|(t, _)| t)
                .unwrap_or_default();
            StructureError::NotTotal { name: name.to_string(), args: missing }
        })?;
        let size = self.size;
        self.set_function(name, arity, |args| table[index_of(args, size)])
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).map(|r| r.arity)
    }

    pub fn holds(&self, name: &str, args: &[usize]) -> bool {
        self.relation(name, args).unwrap_or(false)
    }

    /// All tuples of a relation, in lexicographic order.
    pub fn tuples_of(&self, name: &str) -> Vec<Vec<usize>> {
        let Some(rel) = self.relations.get(name) else {
            return Vec::new();
        };
        match &rel.table {
            Table::Dense(bits) => {
                tuples(self.size, rel.arity).zip(bits.iter()).filter(|(_, b)| **b).map(|(t, _)| t).collect()
            }
            Table::Sparse(set) => {
                let mut v: Vec<_> = set.iter().cloned().collect();
                v.sort();
                v
            }
        }
    }

    pub fn signature(&self) -> Signature {
        let mut s = Signature::new();
        for (n, r) in &self.relations {
            s.add_relation(n, r.arity).expect("names unique by construction");
        }
        for n in self.constants.keys() {
            s.add_constant(n).expect("names unique by construction");
        }
        for (n, f) in &self.functions {
            s.add_function(n, f.arity).expect("names unique by construction");
        }
        s
    }

    /// Ensures every symbol of `sig` is interpreted (relations default to empty) and that
    /// nothing outside `sig` is.
    pub fn conform_to(mut self, sig: &Signature) -> Result<Self, StructureError> {
        for (name, arity) in sig.relations() {
            match self.relations.get(name) {
                Some(r) if r.arity == *arity => {}
                Some(r) => {
                    return Err(
                        SignatureError::Arity { name: name.to_string(), expected: *arity, found: r.arity }.into()
                    )
                }
                None => self.add_relation(name, *arity)?,
            }
        }
        for c in sig.constants() {
            if !self.constants.contains_key(c) {
                return Err(SignatureError::Undeclared(format!("constant {c} has no value")).into());
            }
        }
        for (name, arity) in sig.functions() {
            match self.functions.get(name) {
                Some(f) if f.arity == *arity => {}
                Some(f) => {
                    return Err(
                        SignatureError::Arity { name: name.to_string(), expected: *arity, found: f.arity }.into()
                    )
                }
                None => return Err(SignatureError::Undeclared(format!("function {name} has no table")).into()),
            }
        }
        for name in self.relations.keys().chain(self.constants.keys()).chain(self.functions.keys()) {
            if sig.kind(name).is_none() {
                return Err(SignatureError::Undeclared(name.to_string()).into());
            }
        }
        Ok(self)
    }

    /// Parses the JSON structure file. With a signature, relation arities come from it and
    /// absent relations are empty; without one, arities are inferred from the tuples.
    pub fn from_json(text: &str, sig: Option<&Signature>) -> Result<Self, StructureError> {
        let file: StructureFile = serde_json::from_str(text)?;
        let mut a = FiniteStructure::new(file.universe)?;
        for (name, rows) in &file.relations {
            let arity = match sig {
                Some(s) => match s.kind(name) {
                    Some(SymbolKind::Relation(k)) => k,
                    Some(_) => return Err(SignatureError::WrongKind(name.clone(), "relation").into()),
                    None => return Err(SignatureError::Undeclared(name.clone()).into()),
                },
                None => rows.first().map(Vec::len).ok_or_else(|| StructureError::UnknownArity(name.clone()))?,
            };
            a.add_relation(name, arity)?;
            for row in rows {
                a.insert_tuple(name, row)?;
            }
        }
        for (name, value) in &file.constants {
            a.set_constant(name, *value)?;
        }
        for (name, rows) in &file.functions {
            let arity = match sig {
                Some(s) => s.function_arity(name).ok_or_else(|| SignatureError::Undeclared(name.clone()))?,
                None => rows
                    .first()
                    .map(|r| r.len().saturating_sub(1))
                    .ok_or_else(|| StructureError::UnknownArity(name.clone()))?,
            };
            a.set_function_rows(name, arity, rows)?;
        }
        match sig {
            Some(s) => a.conform_to(s),
            None => Ok(a),
        }
    }

    pub fn to_json(&self) -> String {
        let file = StructureFile {
            universe: self.size,
            relations: self.relations.keys().map(|n| (n.to_string(), self.tuples_of(n))).collect(),
            constants: self.constants.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            functions: self
                .functions
                .iter()
                .map(|(n, f)| {
                    let rows = tuples(self.size, f.arity)
                        .zip(f.values.iter())
                        .map(|(mut args, v)| {
                            args.push(*v);
                            args
                        })
                        .collect();
                    (n.to_string(), rows)
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("structure serialises")
    }
}

impl Model for FiniteStructure {
    fn size(&self) -> usize {
        self.size
    }

    fn relation(&self, name: &str, args: &[usize]) -> Result<bool, EvalError> {
        let rel = self.relations.get(name).ok_or_else(|| EvalError::Uninterpreted(name.to_string()))?;
        if rel.arity != args.len() {
            return Err(EvalError::Arity { name: name.to_string(), expected: rel.arity, found: args.len() });
        }
        Ok(match &rel.table {
            Table::Dense(bits) => bits[index_of(args, self.size)],
            Table::Sparse(set) => set.contains(args),
        })
    }

    fn constant(&self, name: &str) -> Result<usize, EvalError> {
        self.constants.get(name).copied().ok_or_else(|| EvalError::Uninterpreted(name.to_string()))
    }

    fn function(&self, name: &str, args: &[usize]) -> Result<usize, EvalError> {
        let f = self.functions.get(name).ok_or_else(|| EvalError::Uninterpreted(name.to_string()))?;
        if f.arity != args.len() {
            return Err(EvalError::Arity { name: name.to_string(), expected: f.arity, found: args.len() });
        }
        Ok(f.values[index_of(args, self.size)])
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    universe: usize,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    constants: BTreeMap<String, usize>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<Vec<usize>>>,
}

/// All `arity`-tuples over `0..size` in lexicographic order.
pub fn tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if arity == 0 {
        1
    } else if size == 0 {
        0
    } else {
        size.pow(arity as u32)
    };
    (0..total).map(move |mut idx| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = idx % size.max(1);
            idx /= size.max(1);
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_enumerate_lexicographically() {
        let all: Vec<_> = tuples(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0).count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{ "universe": 3, "relations": {"E": [[0,1],[1,0]]}, "constants": {"c": 2},
                        "functions": {"f": [[0,1],[1,2],[2,0]]} }"#;
        let a = FiniteStructure::from_json(text, None).unwrap();
        assert!(a.holds("E", &[0, 1]));
        assert!(!a.holds("E", &[1, 2]));
        assert_eq!(a.function("f", &[2]).unwrap(), 0);
        let b = FiniteStructure::from_json(&a.to_json(), None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn absent_relation_is_empty_under_signature() {
        let sig = Signature::relational(&[("E", 2), ("P", 1)]);
        let a = FiniteStructure::from_json(r#"{"universe": 2, "relations": {"E": [[0,1]]}}"#, Some(&sig)).unwrap();
        assert_eq!(a.relation("P", &[0]), Ok(false));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            FiniteStructure::from_json(r#"{"universe": 2, "relations": {"E": [[0,5]]}}"#, None),
            Err(StructureError::OutOfRange { .. })
        ));
        assert!(matches!(
            FiniteStructure::from_json(r#"{"universe": 2, "functions": {"f": [[0,1]]}}"#, None),
            Err(StructureError::NotTotal { .. })
        ));
        assert!(matches!(FiniteStructure::new(0), Err(StructureError::EmptyUniverse)));
    }
}
