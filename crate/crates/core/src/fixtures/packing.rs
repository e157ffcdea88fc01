//! Packing games: v(S) is the largest total weight of pairwise disjoint
//! family members inside S.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::Rat;
use crate::game::GameOracle;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingGame {
    pub players: usize,
    pub sets: Vec<(Coalition, Rat)>,
}

impl PackingGame {
    pub fn new(players: usize, sets: Vec<(Coalition, Rat)>) -> Result<PackingGame> {
        if players > MAX_PLAYERS {
            return Err(Error::CapExceeded { players, cap: MAX_PLAYERS });
        }
        if let Some(i) = sets.iter().position(|(c, _)| !c.fits(players) || c.is_empty()) {
            return Err(Error::Invalid(format!("set {i} is empty or mentions a player outside 0..{players}")));
        }
        Ok(PackingGame { players, sets })
    }

    pub fn weight_of(&self, s: Coalition) -> Option<&Rat> {
        self.sets.iter().find(|(c, _)| *c == s).map(|(_, w)| w)
    }
}

/// Branches on the lowest available player: left uncovered, or covered
/// by a family member inside the available set.
fn pack(avail: Coalition, by_min: &[Vec<(Coalition, Rat)>], memo: &mut HashMap<u128, Rat>) -> Rat {
    if avail.is_empty() {
        return Rat::zero();
    }
    if let Some(v) = memo.get(&avail.0) {
        return v.clone();
    }
    let x = avail.0.trailing_zeros() as usize;
    let rest = avail.difference(Coalition::singleton(x));
    let mut best = pack(rest, by_min, memo);
    for (c, w) in &by_min[x] {
        if c.difference(avail).is_empty() {
            let v = w + &pack(avail.difference(*c), by_min, memo);
            if v > best {
                best = v;
            }
        }
    }
    memo.insert(avail.0, best.clone());
    best
}

impl GameOracle for PackingGame {
    fn player_count(&self) -> usize {
        self.players
    }

    fn value(&self, s: Coalition) -> Rat {
        let mut by_min: Vec<Vec<(Coalition, Rat)>> = vec![Vec::new(); self.players];
        for (c, w) in &self.sets {
            if w.is_positive() && c.difference(s).is_empty() {
                by_min[c.0.trailing_zeros() as usize].push((*c, w.clone()));
            }
        }
        pack(s, &by_min, &mut HashMap::new())
    }
}
