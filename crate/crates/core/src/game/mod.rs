//! The separation game played on a finite structure.
//!
//! A position records, for each element `e` and predicate `k`, whether `e` has been put
//! into `C_k`, kept out of it, or not decided yet. In round 0 the universal player picks
//! a tuple satisfying the premise and the existential player decides every element of
//! it so that the initial condition holds. In every later round he picks a closure
//! conjunct together with a tuple satisfying its guard, and she must decide the tuple so
//! that the conjunct's body holds. Decided pairs stay fixed.

mod position;
mod solver;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::logic::{
    eval_in, eval_sentence, eval_term, satisfying_tuples, Assignment, EvalError, Formula, Model, Monadic, Symbol,
};
use crate::separation::{
    satisfies_superclass, PositiveRule, SeparationError, SeparationRule, SeparationScheme, Verdict,
};

pub use position::GamePosition;
pub use solver::{has_omega_strategy, has_r_strategy, max_survival_rounds, GameSolver, Survival, DEFAULT_SURVIVAL_CAP};

/// Positions are packed into a `u64` per side, so `K * n` must not exceed this.
pub const MAX_POSITION_BITS: usize = 64;

/// Largest `K * m` for the per-move validity table, `m` being the elements a move reads.
const MAX_TABLE_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("the game is only defined for rules of positive order")]
    NotPositive,
    #[error("positions need {bits} bits, at most {MAX_POSITION_BITS} are supported")]
    TooManyBits { bits: usize },
    #[error("position space 3^{bits} exceeds the cap 2^{cap_log2}")]
    PositionCap { bits: usize, cap_log2: u32 },
    #[error("a move reads {bits} monadic bits, at most {MAX_TABLE_BITS} are supported")]
    MoveTooWide { bits: usize },
    #[error("position decides some element both in and out of the same predicate")]
    InconsistentPosition,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ForallMove {
    /// Round 0: a tuple for the rule's variables satisfying the premise.
    Opening(Vec<usize>),
    /// Later rounds: conjunct `index` with a tuple satisfying its guard.
    Conjunct { index: usize, tuple: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Opening,
    Later,
}

/// A move with its validity table precomputed.
#[derive(Debug, Clone)]
pub(crate) struct CompiledMove {
    /// Elements the move decides, i.e. the distinct tuple entries.
    decides: usize,
    /// Elements whose membership the formula reads; the decided ones come first.
    reads: Vec<usize>,
    /// `valid[p]` for every local pattern `p`, bit `i * K + (k - 1)` meaning `reads[i] in C_k`.
    valid: Vec<bool>,
}

struct LocalSets<'a> {
    reads: &'a [usize],
    pattern: u64,
    order: usize,
}

impl Monadic for LocalSets<'_> {
    fn count(&self) -> usize {
        self.order
    }
    fn contains(&self, k: usize, e: usize) -> bool {
        let i = self.reads.iter().position(|&r| r == e).expect("element read by the formula is tabulated");
        self.pattern >> (i * self.order + k - 1) & 1 == 1
    }
}

fn collect_monadic_terms<'f>(f: &'f Formula, out: &mut Vec<&'f crate::logic::Term>) {
    f.visit(&mut |g| {
        if let Formula::Mon(_, t) = g {
            out.push(t);
        }
    });
}

impl CompiledMove {
    fn compile<M: Model + ?Sized>(
        a: &M,
        order: usize,
        vars: &[Symbol],
        tuple: &[usize],
        formula: &Formula,
    ) -> Result<Self, GameError> {
        let mut reads: Vec<usize> = Vec::new();
        for &e in tuple {
            if !reads.contains(&e) {
                reads.push(e);
            }
        }
        let decides = reads.len();
        let v = Assignment::bind(vars, tuple);
        let mut terms = Vec::new();
        collect_monadic_terms(formula, &mut terms);
        for t in terms {
            let e = eval_term(a, &v, t)?;
            if !reads.contains(&e) {
                reads.push(e);
            }
        }
        let bits = order * reads.len();
        if bits > MAX_TABLE_BITS {
            return Err(GameError::MoveTooWide { bits });
        }
        let mut valid = Vec::with_capacity(1 << bits);
        let mut v = v;
        for pattern in 0..(1u64 << bits) {
            let sets = LocalSets { reads: &reads, pattern, order };
            valid.push(eval_in(a, &mut v, formula, &sets)?);
        }
        Ok(CompiledMove { decides, reads, valid })
    }
}

/// A game instance: structure, rule and conjunct bound, with all moves compiled.
pub struct Game<'a, M: Model + ?Sized> {
    structure: &'a M,
    pub(crate) order: usize,
    pub(crate) size: usize,
    openings: Vec<(Vec<usize>, CompiledMove)>,
    later: Vec<(usize, Vec<usize>, CompiledMove)>,
}

impl<'a, M: Model + ?Sized> Game<'a, M> {
    pub fn new(structure: &'a M, rule: &SeparationRule, max_index: usize) -> Result<Self, GameError> {
        let p = rule.as_positive().ok_or(GameError::NotPositive)?;
        Self::from_positive(structure, p, max_index)
    }

    pub fn from_positive(structure: &'a M, p: &PositiveRule, max_index: usize) -> Result<Self, GameError> {
        let order = p.order();
        let size = structure.size();
        let bits = order * size;
        if bits > MAX_POSITION_BITS {
            return Err(GameError::TooManyBits { bits });
        }
        let mut openings = Vec::new();
        for t in satisfying_tuples(structure, p.vars(), p.mu())? {
            let m = CompiledMove::compile(structure, order, p.vars(), &t, p.eta())?;
            openings.push((t, m));
        }
        let mut later = Vec::new();
        for (j, c) in p.conjuncts(max_index).iter().enumerate() {
            for t in satisfying_tuples(structure, &c.vars, &c.gamma)? {
                let m = CompiledMove::compile(structure, order, &c.vars, &t, &c.psi)?;
                later.push((j, t, m));
            }
        }
        Ok(Game { structure, order, size, openings, later })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn legal_forall_moves(&self, round: Round) -> Vec<ForallMove> {
        match round {
            Round::Opening => self.openings.iter().map(|(t, _)| ForallMove::Opening(t.clone())).collect(),
            Round::Later => {
                self.later.iter().map(|(j, t, _)| ForallMove::Conjunct { index: *j, tuple: t.clone() }).collect()
            }
        }
    }

    pub(crate) fn opening_moves(&self) -> impl Iterator<Item = &CompiledMove> {
        self.openings.iter().map(|(_, m)| m)
    }

    pub(crate) fn later_moves(&self) -> impl Iterator<Item = &CompiledMove> {
        self.later.iter().map(|(_, _, m)| m)
    }

    pub fn structure(&self) -> &'a M {
        self.structure
    }

    fn bit(&self, e: usize, k: usize) -> u32 {
        ((k - 1) * self.size + e) as u32
    }

    /// Local pattern of `pos` restricted to the elements `m` reads, plus the mask of
    /// undecided local bits among the elements `m` decides.
    pub(crate) fn local_state(&self, pos: GamePosition, m: &CompiledMove) -> (u64, u64) {
        let mut inside = 0u64;
        let mut free = 0u64;
        for (i, &e) in m.reads.iter().enumerate() {
            for k in 1..=self.order {
                let g = self.bit(e, k);
                let l = i * self.order + k - 1;
                if pos.inside >> g & 1 == 1 {
                    inside |= 1 << l;
                } else if i < m.decides && pos.outside >> g & 1 == 0 {
                    free |= 1 << l;
                }
            }
        }
        (inside, free)
    }

    /// Whether the move touches no undecided pair, and if so whether its body holds.
    pub(crate) fn forced_outcome(&self, pos: GamePosition, m: &CompiledMove) -> Option<bool> {
        let (inside, free) = self.local_state(pos, m);
        (free == 0).then(|| m.valid[inside as usize])
    }

    /// Calls `each` on every legal response; stops early when it returns `false`.
    /// Returns `false` iff stopped early.
    pub(crate) fn for_each_response(
        &self,
        pos: GamePosition,
        m: &CompiledMove,
        mut each: impl FnMut(GamePosition) -> bool,
    ) -> bool {
        let (inside, free) = self.local_state(pos, m);
        let mut sub = 0u64;
        loop {
            let pattern = inside | sub;
            if m.valid[pattern as usize] {
                let mut next = pos;
                for (i, &e) in m.reads.iter().take(m.decides).enumerate() {
                    for k in 1..=self.order {
                        let l = i * self.order + k - 1;
                        if free >> l & 1 == 1 {
                            let g = self.bit(e, k);
                            if sub >> l & 1 == 1 {
                                next.inside |= 1 << g;
                            } else {
                                next.outside |= 1 << g;
                            }
                        }
                    }
                }
                if !each(next) {
                    return false;
                }
            }
            // next submask of `free`
            sub = sub.wrapping_sub(free) & free;
            if sub == 0 {
                return true;
            }
        }
    }

    pub(crate) fn responses(&self, pos: GamePosition, m: &CompiledMove) -> Vec<GamePosition> {
        let mut out = Vec::new();
        self.for_each_response(pos, m, |p| {
            out.push(p);
            true
        });
        out
    }

    fn find(&self, mv: &ForallMove) -> Option<&CompiledMove> {
        match mv {
            ForallMove::Opening(t) => self.openings.iter().find(|(u, _)| u == t).map(|(_, m)| m),
            ForallMove::Conjunct { index, tuple } => {
                self.later.iter().find(|(j, u, _)| j == index && u == tuple).map(|(_, _, m)| m)
            }
        }
    }

    /// Every position the existential player may move to after `mv` at `pos`.
    pub fn exists_responses(&self, pos: GamePosition, mv: &ForallMove) -> Result<Vec<GamePosition>, GameError> {
        if !pos.is_consistent() {
            return Err(GameError::InconsistentPosition);
        }
        let m = self.find(mv).ok_or_else(|| GameError::IllegalMove(format!("{mv:?}")))?;
        Ok(self.responses(pos, m))
    }

    pub fn position_from_sets(&self, inside: &[BTreeSet<usize>], outside: &[BTreeSet<usize>]) -> GamePosition {
        GamePosition::from_sets(self.size, inside, outside)
    }
}

/// Free-function form of [`Game::legal_forall_moves`].
pub fn legal_forall_moves<M: Model + ?Sized>(
    a: &M,
    rule: &SeparationRule,
    round: Round,
    max_index: usize,
) -> Result<Vec<ForallMove>, GameError> {
    Ok(Game::new(a, rule, max_index)?.legal_forall_moves(round))
}

/// Free-function form of [`Game::exists_responses`].
pub fn exists_responses<M: Model + ?Sized>(
    a: &M,
    rule: &SeparationRule,
    max_index: usize,
    pos: GamePosition,
    mv: &ForallMove,
) -> Result<Vec<GamePosition>, GameError> {
    Game::new(a, rule, max_index)?.exists_responses(pos, mv)
}

/// Membership decided by the game: order-0 rules are evaluated, and every positive rule
/// needs a winning strategy for the existential player in the unbounded game.
pub fn check_membership_game<M: Model + ?Sized>(
    a: &M,
    scheme: &SeparationScheme,
    max_index: usize,
) -> Result<Verdict, GameError> {
    if !satisfies_superclass(a, scheme)? {
        return Ok(Verdict::SuperclassViolation);
    }
    for rule in scheme.rules() {
        let holds = match rule {
            SeparationRule::Order0(f) => eval_sentence(a, f)?,
            SeparationRule::Positive(_) => GameSolver::new(a, rule, max_index)?.has_omega_strategy()?,
        };
        if !holds {
            return Ok(Verdict::Out);
        }
    }
    Ok(Verdict::In)
}
