use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Decided-in and decided-out sets for every `C_k`, packed as bit `(k-1)*n + e`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GamePosition {
    pub inside: u64,
    pub outside: u64,
}

impl GamePosition {
    pub const EMPTY: GamePosition = GamePosition { inside: 0, outside: 0 };

    /// Packs per-predicate sets; `inside[k-1]` is `S_k`, `outside[k-1]` its complement side.
    pub fn from_sets(size: usize, inside: &[BTreeSet<usize>], outside: &[BTreeSet<usize>]) -> Self {
        let pack = |sets: &[BTreeSet<usize>]| {
            sets.iter()
                .enumerate()
                .flat_map(|(k, s)| s.iter().map(move |&e| 1u64 << (k * size + e)))
                .fold(0, |acc, b| acc | b)
        };
        GamePosition { inside: pack(inside), outside: pack(outside) }
    }

    pub fn is_consistent(&self) -> bool {
        self.inside & self.outside == 0
    }

    pub fn decided(&self) -> u64 {
        self.inside | self.outside
    }

    /// Whether every decision of `earlier` is kept.
    pub fn extends(&self, earlier: &GamePosition) -> bool {
        self.inside & earlier.inside == earlier.inside && self.outside & earlier.outside == earlier.outside
    }

    pub fn is_in(&self, size: usize, k: usize, e: usize) -> bool {
        self.inside >> ((k - 1) * size + e) & 1 == 1
    }

    pub fn is_out(&self, size: usize, k: usize, e: usize) -> bool {
        self.outside >> ((k - 1) * size + e) & 1 == 1
    }

    /// `(S_k, S̄_k)` for `k = 1..=order`.
    pub fn to_sets(&self, size: usize, order: usize) -> (Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
        let unpack =
            |bits: u64| (0..order).map(|k| (0..size).filter(|&e| bits >> (k * size + e) & 1 == 1).collect()).collect();
        (unpack(self.inside), unpack(self.outside))
    }

    /// One base-3 digit per (element, predicate): 0 undecided, 1 in, 2 out.
    pub fn display(&self, size: usize, order: usize) -> impl fmt::Display + '_ {
        struct D<'p>(&'p GamePosition, usize, usize);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let (p, n, k) = (self.0, self.1, self.2);
                for e in 0..n {
                    if e > 0 {
                        f.write_str(" ")?;
                    }
                    for k in 1..=k {
                        let d = if p.is_in(n, k, e) {
                            '1'
                        } else if p.is_out(n, k, e) {
                            '2'
                        } else {
                            '0'
                        };
                        write!(f, "{d}")?;
                    }
                }
                Ok(())
            }
        }
        D(self, size, order)
    }
}
