//! Closure rules, separation rules and schemes, with direct membership checking and the
//! translation to a first-order theory over an extended signature.

mod direct;
mod file;
mod pseudo;
mod rule;

use thiserror::Error;

use crate::logic::{EvalError, ParseError, SignatureError};

pub use direct::{
    check_membership_direct, eval_rule_direct, satisfies_superclass, PackedSets, Verdict, DEFAULT_SIZE_CAP,
    MAX_SUBSET_BITS,
};
pub use file::{parse_scheme, print_scheme, GeneratorResolver};
pub use pseudo::{
    check_pseudoelementary, to_pseudoelementary, ExtendedTheory, FreshRelation, TheorySentence, DEFAULT_EXPANSION_BITS,
};
pub use rule::{ClosureConjunct, ClosureRule, ConjunctGenerator, PositiveRule, SeparationRule, SeparationScheme};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("structure has {size} elements, direct checking is capped at {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("enumeration needs {bits} bits, limit is {cap}")]
    EnumerationCap { bits: usize, cap: usize },
    #[error("rule {0} has a generated closure rule; truncate it first")]
    Untruncated(usize),
    #[error("generated rule {0}")]
    UnknownGenerator(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SeparationError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SeparationError::InvalidRule(msg.into())
    }
}
