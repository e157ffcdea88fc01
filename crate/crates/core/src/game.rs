//! Games, allocations, excesses and brute-force excess minimizers.

use num_traits::Zero;
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::{IntVec, LinearSubspace, Rat};

/// Default brute-force enumeration cap, in players.
pub const DEFAULT_ENUM_CAP: usize = 24;

/// Player cap for the pairwise monotonicity and superadditivity checks.
pub const PROPERTY_CHECK_CAP: usize = 16;

static ENUM_CAP: Lazy<usize> = Lazy::new(|| {
    std::env::var("NUCNZ_ENUM_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
});

/// Enumeration cap, overridable through `NUCNZ_ENUM_CAP`.
pub fn enum_cap() -> usize {
    *ENUM_CAP
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Value,
    Cost,
}

/// A cooperative game evaluated on demand.
pub trait GameOracle: Sync {
    fn player_count(&self) -> usize;

    fn kind(&self) -> GameKind {
        GameKind::Value
    }

    /// v(S) for value games, c(S) for cost games; must return 0 on the empty set.
    fn value(&self, s: Coalition) -> Rat;
}

impl<G: GameOracle + ?Sized> GameOracle for &G {
    fn player_count(&self) -> usize {
        (**self).player_count()
    }
    fn kind(&self) -> GameKind {
        (**self).kind()
    }
    fn value(&self, s: Coalition) -> Rat {
        (**self).value(s)
    }
}

impl<G: GameOracle + ?Sized> GameOracle for Box<G> {
    fn player_count(&self) -> usize {
        (**self).player_count()
    }
    fn kind(&self) -> GameKind {
        (**self).kind()
    }
    fn value(&self, s: Coalition) -> Rat {
        (**self).value(s)
    }
}

/// Payoff vector indexed by player.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<Rat>);

impl Allocation {
    pub fn zeros(n: usize) -> Allocation {
        Allocation(vec![Rat::zero(); n])
    }

    pub fn uniform(n: usize, x: Rat) -> Allocation {
        Allocation(vec![x; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> &Rat {
        &self.0[i]
    }

    /// y(S).
    pub fn sum_over(&self, s: Coalition) -> Rat {
        s.members().map(|i| &self.0[i]).sum()
    }

    pub fn total(&self) -> Rat {
        self.0.iter().sum()
    }

    pub fn negated(&self) -> Allocation {
        Allocation(self.0.iter().map(|x| -x).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }
}

/// A coalition with its excess.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExcessReport {
    pub coalition: Coalition,
    pub excess: Rat,
}

/// Explicit value table indexed by coalition bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGame {
    n: usize,
    kind: GameKind,
    values: Vec<Rat>,
}

impl TableGame {
    pub fn new(n: usize, kind: GameKind, values: Vec<Rat>) -> Result<TableGame> {
        if n >= 32 {
            return Err(Error::Invalid(format!("table games support fewer than 32 players, got {n}")));
        }
        if values.len() != 1usize << n {
            return Err(Error::Invalid(format!(
                "table needs {} values for {n} players, got {}",
                1usize << n,
                values.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::Invalid("value of the empty coalition must be 0".into()));
        }
        Ok(TableGame { n, kind, values })
    }

    /// Builds a table by evaluating `f` on every coalition; `f(∅)` is forced to 0.
    pub fn from_fn(n: usize, kind: GameKind, f: impl Fn(Coalition) -> Rat) -> Result<TableGame> {
        if n >= 32 {
            return Err(Error::Invalid(format!("table games support fewer than 32 players, got {n}")));
        }
        let values = (0..1u128 << n)
            .map(|b| if b == 0 { Rat::zero() } else { f(Coalition(b)) })
            .collect();
        TableGame::new(n, kind, values)
    }

    /// Tabulates any oracle.
    pub fn tabulate<G: GameOracle + ?Sized>(g: &G) -> Result<TableGame> {
        check_cap(g.player_count(), enum_cap())?;
        TableGame::from_fn(g.player_count(), g.kind(), |s| g.value(s))
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }
}

impl GameOracle for TableGame {
    fn player_count(&self) -> usize {
        self.n
    }
    fn kind(&self) -> GameKind {
        self.kind
    }
    fn value(&self, s: Coalition) -> Rat {
        self.values[s.0 as usize].clone()
    }
}

/// Game given by a closure.
pub struct FnGame<F> {
    n: usize,
    kind: GameKind,
    f: F,
}

impl<F: Fn(Coalition) -> Rat + Sync> FnGame<F> {
    pub fn new(n: usize, kind: GameKind, f: F) -> FnGame<F> {
        FnGame { n, kind, f }
    }
}

impl<F: Fn(Coalition) -> Rat + Sync> GameOracle for FnGame<F> {
    fn player_count(&self) -> usize {
        self.n
    }
    fn kind(&self) -> GameKind {
        self.kind
    }
    fn value(&self, s: Coalition) -> Rat {
        if s.is_empty() {
            Rat::zero()
        } else {
            (self.f)(s)
        }
    }
}

/// Value-semantics view of a game: cost games appear as v = -c.
pub struct ValueView<'a, G: ?Sized> {
    inner: &'a G,
}

impl<'a, G: GameOracle + ?Sized> ValueView<'a, G> {
    pub fn new(inner: &'a G) -> ValueView<'a, G> {
        ValueView { inner }
    }

    /// Maps an allocation of the underlying game into the view.
    pub fn map_allocation(&self, y: &Allocation) -> Allocation {
        match self.inner.kind() {
            GameKind::Value => y.clone(),
            GameKind::Cost => y.negated(),
        }
    }
}

impl<'a, G: GameOracle + ?Sized> GameOracle for ValueView<'a, G> {
    fn player_count(&self) -> usize {
        self.inner.player_count()
    }
    fn value(&self, s: Coalition) -> Rat {
        match self.inner.kind() {
            GameKind::Value => self.inner.value(s),
            GameKind::Cost => -self.inner.value(s),
        }
    }
}

/// y(S) - v(S) for value games, c(S) - y(S) for cost games.
pub fn excess<G: GameOracle + ?Sized>(g: &G, y: &Allocation, s: Coalition) -> Rat {
    if s.is_empty() {
        return Rat::zero();
    }
    match g.kind() {
        GameKind::Value => y.sum_over(s) - g.value(s),
        GameKind::Cost => g.value(s) - y.sum_over(s),
    }
}

pub(crate) fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n > MAX_PLAYERS {
        Err(Error::CapExceeded { players: n, cap })
    } else {
        Ok(())
    }
}

fn check_len<G: GameOracle + ?Sized>(g: &G, y: &Allocation) -> Result<()> {
    if y.len() != g.player_count() {
        return Err(Error::DimensionMismatch { expected: g.player_count(), got: y.len() });
    }
    Ok(())
}

fn brute_search<G: GameOracle + ?Sized>(
    g: &G,
    y: &Allocation,
    keep: impl Fn(Coalition) -> bool,
) -> Result<Option<ExcessReport>> {
    let n = g.player_count();
    check_cap(n, enum_cap())?;
    check_len(g, y)?;
    let mut best: Option<ExcessReport> = None;
    for b in 0..(1u128 << n) {
        let s = Coalition(b);
        if !keep(s) {
            continue;
        }
        let e = excess(g, y, s);
        if best.as_ref().is_none_or(|r| e < r.excess) {
            best = Some(ExcessReport { coalition: s, excess: e });
        }
    }
    Ok(best)
}

/// Minimum excess over all coalitions; ties go to the smallest bitmask.
pub fn brute_min_excess<G: GameOracle + ?Sized>(g: &G, y: &Allocation) -> Result<ExcessReport> {
    Ok(brute_search(g, y, |_| true)?.expect("the empty coalition is always a candidate"))
}

/// Minimum excess over coalitions with a(S) != 0.
pub fn brute_nz_min_excess<G: GameOracle + ?Sized>(
    g: &G,
    y: &Allocation,
    a: &IntVec,
) -> Result<ExcessReport> {
    if a.len() != g.player_count() {
        return Err(Error::DimensionMismatch { expected: g.player_count(), got: a.len() });
    }
    if a.is_zero() {
        return Err(Error::ZeroVector);
    }
    let found = brute_search(g, y, |s| !a.sum_over(s).is_zero())?;
    found.ok_or_else(|| Error::Internal("no coalition with a(S) != 0".into()))
}

/// Minimum excess over coalitions whose incidence vector lies outside `l`.
pub fn brute_lsa_min_excess<G: GameOracle + ?Sized>(
    g: &G,
    y: &Allocation,
    l: &LinearSubspace,
) -> Result<ExcessReport> {
    if l.ambient_dim() != g.player_count() {
        return Err(Error::DimensionMismatch { expected: g.player_count(), got: l.ambient_dim() });
    }
    if l.is_full() {
        return Err(Error::FullSpace);
    }
    let found = brute_search(g, y, |s| !l.contains_coalition(s))?;
    found.ok_or_else(|| Error::Internal("no coalition outside the subspace".into()))
}

fn value_table<G: GameOracle + ?Sized>(g: &G) -> Result<Vec<Rat>> {
    let n = g.player_count();
    check_cap(n, PROPERTY_CHECK_CAP)?;
    Ok((0..1u128 << n).map(|b| g.value(Coalition(b))).collect())
}

/// v(S) <= v(S + i) for every S and i outside S.
pub fn is_monotone<G: GameOracle + ?Sized>(g: &G) -> Result<bool> {
    let n = g.player_count();
    let t = value_table(g)?;
    for b in 0..1usize << n {
        for i in 0..n {
            if b >> i & 1 == 0 && t[b] > t[b | 1 << i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// v(S u T) >= v(S) + v(T) for every disjoint pair.
pub fn is_superadditive<G: GameOracle + ?Sized>(g: &G) -> Result<bool> {
    let n = g.player_count();
    let t = value_table(g)?;
    let full = (1usize << n) - 1;
    for s in 1..=full {
        let rest = full & !s;
        let mut u = rest;
        while u > 0 {
            if u > s && t[s | u] < &t[s] + &t[u] {
                return Ok(false);
            }
            u = (u - 1) & rest;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unanimity3() -> TableGame {
        TableGame::from_fn(3, GameKind::Value, |s| if s.len() == 3 { Rat::one() } else { Rat::zero() }).unwrap()
    }

    fn third() -> Allocation {
        Allocation::uniform(3, Rat::new(1, 3))
    }

    #[test]
    fn excess_examples() {
        let g = unanimity3();
        assert_eq!(excess(&g, &third(), Coalition::EMPTY), Rat::zero());
        assert_eq!(excess(&g, &third(), Coalition::singleton(0)), Rat::new(1, 3));
        let card = FnGame::new(4, GameKind::Value, |s: Coalition| Rat::from_int(s.len() as i64));
        let ones = Allocation::uniform(4, Rat::one());
        for b in 0..16u128 {
            assert!(excess(&card, &ones, Coalition(b)).is_zero());
        }
    }

    #[test]
    fn cost_excess_sign() {
        let c = FnGame::new(2, GameKind::Cost, |s: Coalition| Rat::from_int(s.len() as i64 * 3));
        let y = Allocation::uniform(2, Rat::one());
        assert_eq!(excess(&c, &y, Coalition::full(2)), Rat::from_int(4));
    }

    #[test]
    fn brute_examples() {
        let g = unanimity3();
        let r = brute_min_excess(&g, &third()).unwrap();
        assert_eq!(r, ExcessReport { coalition: Coalition::EMPTY, excess: Rat::zero() });
        let r = brute_min_excess(&g, &Allocation::zeros(3)).unwrap();
        assert_eq!(r.coalition, Coalition::full(3));
        assert_eq!(r.excess, Rat::from_int(-1));
        // a(P) = 3, so the grand coalition with excess 0 is admissible.
        let r = brute_nz_min_excess(&g, &third(), &IntVec::from_i64s(&[1, 1, 1])).unwrap();
        assert_eq!(r.excess, Rat::zero());
        assert_eq!(r.coalition, Coalition::full(3));
        let r = brute_nz_min_excess(&g, &third(), &IntVec::from_i64s(&[1, -1, 0])).unwrap();
        assert_eq!(r.excess, Rat::new(1, 3));
        assert_eq!(r.coalition, Coalition::singleton(0));
        let zero = FnGame::new(3, GameKind::Value, |_| Rat::zero());
        let r = brute_nz_min_excess(&zero, &Allocation::zeros(3), &IntVec::from_i64s(&[1, -1, 0])).unwrap();
        assert_eq!(r.coalition, Coalition::singleton(0));
        assert!(brute_nz_min_excess(&zero, &Allocation::zeros(3), &IntVec::zeros(3)).is_err());
    }

    #[test]
    fn brute_lsa_examples() {
        let g = unanimity3();
        let y = Allocation(vec![Rat::new(1, 2), Rat::new(1, 4), Rat::new(1, 4)]);
        let r = brute_lsa_min_excess(&g, &y, &LinearSubspace::zero(3)).unwrap();
        assert!(!r.coalition.is_empty());
        let l = LinearSubspace::span_of_coalitions(&[Coalition::singleton(0), Coalition::singleton(1)], 3);
        let r = brute_lsa_min_excess(&g, &y, &l).unwrap();
        assert!(r.coalition.contains(2));
    }

    #[test]
    fn cap_enforced() {
        let big = FnGame::new(enum_cap() + 1, GameKind::Value, |_| Rat::zero());
        let y = Allocation::zeros(enum_cap() + 1);
        assert!(matches!(brute_min_excess(&big, &y), Err(Error::CapExceeded { .. })));
        let g = FnGame::new(17, GameKind::Value, |_| Rat::zero());
        assert!(is_monotone(&g).is_err());
    }

    #[test]
    fn property_checks() {
        let card = FnGame::new(4, GameKind::Value, |s: Coalition| Rat::from_int(s.len() as i64));
        assert!(is_monotone(&card).unwrap());
        assert!(is_superadditive(&card).unwrap());
        let neg = FnGame::new(3, GameKind::Value, |s: Coalition| Rat::from_int(-(s.len() as i64)));
        assert!(!is_monotone(&neg).unwrap());
        let sq = FnGame::new(3, GameKind::Value, |_| Rat::from_int(1));
        assert!(!is_superadditive(&sq).unwrap());
    }

    #[test]
    fn table_validation() {
        assert!(TableGame::new(2, GameKind::Value, vec![Rat::zero(); 3]).is_err());
        assert!(TableGame::new(1, GameKind::Value, vec![Rat::one(), Rat::one()]).is_err());
    }
}
