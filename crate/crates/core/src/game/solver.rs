use std::collections::HashMap;
use std::fmt;

use crate::logic::Model;
use crate::separation::SeparationRule;

use super::{CompiledMove, Game, GameError, GamePosition};

pub const DEFAULT_SURVIVAL_CAP: u32 = 16;

/// Default position-space cap: `3^(K*n) <= 2^30`.
pub const DEFAULT_POSITION_CAP_LOG2: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Survival {
    /// The existential player survives forever.
    Omega,
    /// She survives through this round and no further.
    Rounds(u32),
    /// She survives through the cap; the search stopped there.
    AtLeast(u32),
    /// She cannot even answer the opening move.
    NoStrategy,
}

impl fmt::Display for Survival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Survival::Omega => f.write_str("omega"),
            Survival::Rounds(r) => write!(f, "{r}"),
            Survival::AtLeast(r) => write!(f, ">={r}"),
            Survival::NoStrategy => f.write_str("none"),
        }
    }
}

/// For each position: the largest depth known survivable, the smallest known not.
type DepthMemo = HashMap<GamePosition, (u32, u32)>;

/// Solver for one game instance; memo tables persist across queries.
pub struct GameSolver<'a, M: Model + ?Sized> {
    game: Game<'a, M>,
    depth: DepthMemo,
    safe: HashMap<GamePosition, bool>,
    position_cap_log2: u32,
}

/// Scans moves that touch only decided pairs: `(some such move is lost, some is a pass)`.
fn forced_loss<M: Model + ?Sized>(g: &Game<M>, pos: GamePosition) -> (bool, bool) {
    let mut lost = false;
    let mut pass = false;
    for m in g.later_moves() {
        match g.forced_outcome(pos, m) {
            Some(false) => {
                lost = true;
                break;
            }
            Some(true) => pass = true,
            None => {}
        }
    }
    (lost, pass)
}

fn open_moves<'g, M: Model + ?Sized>(g: &'g Game<M>, pos: GamePosition) -> impl Iterator<Item = &'g CompiledMove> + 'g {
    g.later_moves().filter(move |m| g.forced_outcome(pos, m).is_none())
}

fn survive<M: Model + ?Sized>(g: &Game<M>, memo: &mut DepthMemo, pos: GamePosition, r: u32) -> bool {
    if r == 0 {
        return true;
    }
    if let Some(&(yes, no)) = memo.get(&pos) {
        if r <= yes {
            return true;
        }
        if r >= no {
            return false;
        }
    }
    let (lost, pass) = forced_loss(g, pos);
    let mut result = !lost;
    if result {
        for m in open_moves(g, pos) {
            let mut found = false;
            g.for_each_response(pos, m, |next| {
                found = survive(g, memo, next, r - 1);
                !found
            });
            if !found {
                result = false;
                break;
            }
        }
    }
    if result && pass {
        result = survive(g, memo, pos, r - 1);
    }
    let entry = memo.entry(pos).or_insert((0, u32::MAX));
    if result {
        entry.0 = entry.0.max(r);
    } else {
        entry.1 = entry.1.min(r);
    }
    result
}

fn safe<M: Model + ?Sized>(g: &Game<M>, memo: &mut HashMap<GamePosition, bool>, pos: GamePosition) -> bool {
    if let Some(&s) = memo.get(&pos) {
        return s;
    }
    // in progress counts as safe; only self-loops can revisit, and those are pass moves
    memo.insert(pos, true);
    let (lost, _) = forced_loss(g, pos);
    let mut result = !lost;
    if result {
        for m in open_moves(g, pos) {
            let mut found = false;
            g.for_each_response(pos, m, |next| {
                found = safe(g, memo, next);
                !found
            });
            if !found {
                result = false;
                break;
            }
        }
    }
    memo.insert(pos, result);
    result
}

impl<'a, M: Model + ?Sized> GameSolver<'a, M> {
    pub fn new(structure: &'a M, rule: &SeparationRule, max_index: usize) -> Result<Self, GameError> {
        Ok(Self::from_game(Game::new(structure, rule, max_index)?))
    }

    pub fn from_game(game: Game<'a, M>) -> Self {
        GameSolver { game, depth: HashMap::new(), safe: HashMap::new(), position_cap_log2: DEFAULT_POSITION_CAP_LOG2 }
    }

    /// Caps the position space for fixpoint queries at `3^(K*n) <= 2^log2`.
    pub fn with_position_cap(mut self, log2: u32) -> Self {
        self.position_cap_log2 = log2;
        self
    }

    pub fn game(&self) -> &Game<'a, M> {
        &self.game
    }

    /// Number of positions with a memoized verdict.
    pub fn explored_positions(&self) -> usize {
        self.depth.len().max(self.safe.len())
    }

    fn check_start(start: GamePosition) -> Result<(), GameError> {
        if start.is_consistent() {
            Ok(())
        } else {
            Err(GameError::InconsistentPosition)
        }
    }

    fn within_cap(&self) -> bool {
        let bits = (self.game.order * self.game.size) as u32;
        3u128.pow(bits) <= 1u128 << self.position_cap_log2.min(127)
    }

    fn check_cap(&self) -> Result<(), GameError> {
        if self.within_cap() {
            Ok(())
        } else {
            Err(GameError::PositionCap { bits: self.game.order * self.game.size, cap_log2: self.position_cap_log2 })
        }
    }

    /// Whether the existential player survives through round `r` from `start`.
    ///
    /// With `include_round0` the universal player first picks an opening tuple; otherwise
    /// play starts at round 1 and `r = 0` is trivially survived.
    pub fn has_r_strategy(&mut self, start: GamePosition, r: u32, include_round0: bool) -> Result<bool, GameError> {
        Self::check_start(start)?;
        let g = &self.game;
        let memo = &mut self.depth;
        if !include_round0 {
            return Ok(survive(g, memo, start, r));
        }
        for m in g.opening_moves() {
            let mut found = false;
            g.for_each_response(start, m, |next| {
                found = survive(g, memo, next, r);
                !found
            });
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the existential player survives forever from `start`, opening already played.
    pub fn is_safe(&mut self, start: GamePosition) -> Result<bool, GameError> {
        Self::check_start(start)?;
        self.check_cap()?;
        Ok(safe(&self.game, &mut self.safe, start))
    }

    /// Whether the existential player survives the simple game forever.
    pub fn has_omega_strategy(&mut self) -> Result<bool, GameError> {
        self.check_cap()?;
        let g = &self.game;
        let memo = &mut self.safe;
        for m in g.opening_moves() {
            let mut found = false;
            g.for_each_response(GamePosition::EMPTY, m, |next| {
                found = safe(g, memo, next);
                !found
            });
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Longest survival in the simple game, searched up to `cap` rounds.
    ///
    /// Beyond the position cap no fixpoint is computed, so a game won forever is
    /// reported as `AtLeast(cap)`.
    pub fn max_survival_rounds(&mut self, cap: u32) -> Result<Survival, GameError> {
        if self.within_cap() && self.has_omega_strategy()? {
            return Ok(Survival::Omega);
        }
        for r in 0..=cap {
            if !self.has_r_strategy(GamePosition::EMPTY, r, true)? {
                return Ok(if r == 0 { Survival::NoStrategy } else { Survival::Rounds(r - 1) });
            }
        }
        Ok(Survival::AtLeast(cap))
    }
}

pub fn has_r_strategy<M: Model + ?Sized>(
    a: &M,
    rule: &SeparationRule,
    start: GamePosition,
    r: u32,
    max_index: usize,
    include_round0: bool,
) -> Result<bool, GameError> {
    GameSolver::new(a, rule, max_index)?.has_r_strategy(start, r, include_round0)
}

pub fn has_omega_strategy<M: Model + ?Sized>(
    a: &M,
    rule: &SeparationRule,
    max_index: usize,
) -> Result<bool, GameError> {
    GameSolver::new(a, rule, max_index)?.has_omega_strategy()
}

pub fn max_survival_rounds<M: Model + ?Sized>(
    a: &M,
    rule: &SeparationRule,
    max_index: usize,
    cap: u32,
) -> Result<Survival, GameError> {
    GameSolver::new(a, rule, max_index)?.max_survival_rounds(cap)
}
