use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest supported player count.
pub const MAX_PLAYERS: usize = 128;

/// A subset of players stored as a bitmask; bit `i` is player `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coalition(pub u128);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn full(n: usize) -> Coalition {
        assert!(n <= MAX_PLAYERS);
        if n == MAX_PLAYERS {
            Coalition(u128::MAX)
        } else {
            Coalition((1u128 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Coalition {
        Coalition(1u128 << i)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(it: I) -> Coalition {
        Coalition(it.into_iter().fold(0u128, |acc, i| acc | (1u128 << i)))
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_PLAYERS && (self.0 >> i) & 1 == 1
    }

    pub fn insert(self, i: usize) -> Coalition {
        Coalition(self.0 | (1u128 << i))
    }

    pub fn remove(self, i: usize) -> Coalition {
        Coalition(self.0 & !(1u128 << i))
    }

    pub fn union(self, o: Coalition) -> Coalition {
        Coalition(self.0 | o.0)
    }

    pub fn intersection(self, o: Coalition) -> Coalition {
        Coalition(self.0 & o.0)
    }

    pub fn difference(self, o: Coalition) -> Coalition {
        Coalition(self.0 & !o.0)
    }

    pub fn symmetric_difference(self, o: Coalition) -> Coalition {
        Coalition(self.0 ^ o.0)
    }

    pub fn is_subset(self, o: Coalition) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_disjoint(self, o: Coalition) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in increasing order.
    pub fn members(self) -> Members {
        Members(self.0)
    }

    /// True when every set bit is below `n`.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset(Coalition::full(n))
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

pub struct Members(u128);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Iterates over all subsets of `n` players in increasing bit order.
pub fn all_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    assert!(n < 64, "explicit enumeration limited to 63 players");
    (0u64..(1u64 << n)).map(|b| Coalition(b as u128))
}
