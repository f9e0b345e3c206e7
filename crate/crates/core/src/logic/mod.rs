//! First-order logic with monadic extension atoms: syntax, signatures, finite
//! structures, evaluation, the S-expression DSL, prenex forms and TPTP output.

pub mod eval;
pub mod parse;
pub mod prenex;
pub mod signature;
pub mod simplify;
pub mod structure;
pub mod syntax;
pub mod tptp;

pub use eval::{eval_formula, eval_in, eval_sentence, eval_term, satisfying_tuples, Assignment, Monadic, NoMonadic};
pub use parse::{parse_formula, print_formula, ParseError};
pub use prenex::{is_universal, prenex_normal_form, PrenexError};
pub use signature::{Signature, SignatureError, SymbolKind};
pub use simplify::simplify;
pub use structure::{tuples, EvalError, FiniteStructure, Model, StructureError};
pub use syntax::{sym, Formula, Quantifier, Symbol, Term};
pub use tptp::{fof_axiom, formula_to_tptp, normalize_for_tptp, parse_tptp, TptpError};
