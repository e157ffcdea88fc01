//! Instance types for the excess problems, the LSA/NZ equivalence, restricted
//! min-excess and the subspace-avoiding approximation.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::exact_math::{hyperplane, integer_kernel_basis, IntVec, LinearSubspace, Rat};
use crate::mps::LsaSolver;
use crate::game::{brute_lsa_min_excess, brute_min_excess, brute_nz_min_excess, Allocation, ExcessReport, GameKind, GameOracle};

/// NZ-MinExcess: minimize y(S) - v(S) over S with a(S) != 0.
pub struct NZInstance<'g, G: ?Sized> {
    pub game: &'g G,
    pub y: Allocation,
    pub a: IntVec,
}

/// LSA-MinExcess: minimize y(S) - v(S) over S outside `l`.
pub struct LSAInstance<'g, G: ?Sized> {
    pub game: &'g G,
    pub y: Allocation,
    pub l: LinearSubspace,
}

impl<'g, G: GameOracle + ?Sized> NZInstance<'g, G> {
    pub fn new(game: &'g G, y: Allocation, a: IntVec) -> Result<Self> {
        let n = game.player_count();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        if a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.len() });
        }
        if a.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(NZInstance { game, y, a })
    }

    pub fn brute(&self) -> Result<ExcessReport> {
        brute_nz_min_excess(self.game, &self.y, &self.a)
    }
}

impl<'g, G: GameOracle + ?Sized> LSAInstance<'g, G> {
    pub fn new(game: &'g G, y: Allocation, l: LinearSubspace) -> Result<Self> {
        let n = game.player_count();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        if l.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: l.ambient_dim() });
        }
        if l.is_full() {
            return Err(Error::FullSpace);
        }
        Ok(LSAInstance { game, y, l })
    }

    pub fn brute(&self) -> Result<ExcessReport> {
        brute_lsa_min_excess(self.game, &self.y, &self.l)
    }
}

/// One NZ instance per integer kernel row of L.
pub fn lsa_to_nz<'g, G: GameOracle + ?Sized>(inst: &LSAInstance<'g, G>) -> Result<Vec<NZInstance<'g, G>>> {
    Ok(integer_kernel_basis(&inst.l)?
        .into_iter()
        .map(|a| NZInstance { game: inst.game, y: inst.y.clone(), a })
        .collect())
}

/// The hyperplane orthogonal to a.
pub fn nz_to_lsa<'g, G: GameOracle + ?Sized>(inst: &NZInstance<'g, G>) -> Result<LSAInstance<'g, G>> {
    Ok(LSAInstance { game: inst.game, y: inst.y.clone(), l: hyperplane(&inst.a)? })
}

/// LSA separation built from an NZ solver, one query per kernel row of L.
pub struct ViaNonZero<F> {
    pub solve: F,
}

impl<F> LsaSolver for ViaNonZero<F>
where
    F: Fn(&Allocation, &IntVec) -> Result<ExcessReport> + Sync,
{
    fn min_excess_avoiding(&self, y: &Allocation, l: &LinearSubspace) -> Result<ExcessReport> {
        if l.is_full() {
            return Err(Error::FullSpace);
        }
        let mut best: Option<ExcessReport> = None;
        for a in integer_kernel_basis(l)? {
            let r = (self.solve)(y, &a)?;
            if best.as_ref().is_none_or(|b| (&r.excess, r.coalition) < (&b.excess, b.coalition)) {
                best = Some(r);
            }
        }
        best.ok_or_else(|| Error::Internal("kernel of a proper subspace is non-empty".into()))
    }
}

/// Coalition with a lower bound on its value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxSolution {
    pub coalition: Coalition,
    pub lower_value_bound: Rat,
}

impl ApproxSolution {
    /// y(S) - lambda.
    pub fn cost(&self, y: &Allocation) -> Rat {
        y.sum_over(self.coalition) - &self.lower_value_bound
    }
}

/// An alpha-approximation algorithm for MinExcess on monotone value games.
pub trait MinExcessOracle: Sync {
    fn alpha(&self) -> Rat;

    fn solve(&self, g: &dyn GameOracle, y: &Allocation) -> Result<ApproxSolution>;

    /// Upper bound on v(P); the default evaluates v(P).
    fn value_upper_bound(&self, g: &dyn GameOracle) -> Rat {
        g.value(Coalition::full(g.player_count()))
    }
}

/// Exact MinExcess by enumeration.
pub struct ExactMinExcess;

impl MinExcessOracle for ExactMinExcess {
    fn alpha(&self) -> Rat {
        Rat::one()
    }

    fn solve(&self, g: &dyn GameOracle, y: &Allocation) -> Result<ApproxSolution> {
        let r = brute_min_excess(g, y)?;
        Ok(ApproxSolution { coalition: r.coalition, lower_value_bound: g.value(r.coalition) })
    }
}

fn check_value_game(g: &dyn GameOracle, y: &Allocation) -> Result<()> {
    if g.kind() != GameKind::Value {
        return Err(Error::Invalid("approximation reductions need a value game".into()));
    }
    if y.len() != g.player_count() {
        return Err(Error::DimensionMismatch { expected: g.player_count(), got: y.len() });
    }
    if !y.is_nonnegative() {
        return Err(Error::Invalid("allocation has a negative entry".into()));
    }
    Ok(())
}

/// Alpha-approximate MinExcess over coalitions S with A ⊆ S ⊆ P \ B.
pub fn restricted_min_excess(
    oracle: &dyn MinExcessOracle,
    g: &dyn GameOracle,
    y: &Allocation,
    a: Coalition,
    b: Coalition,
) -> Result<ApproxSolution> {
    check_value_game(g, y)?;
    let n = g.player_count();
    if !a.is_disjoint(b) {
        return Err(Error::Invalid(format!("sets overlap in {:?}", a.intersection(b))));
    }
    if !a.fits(n) || !b.fits(n) {
        return Err(Error::Invalid("set mentions a nonexistent player".into()));
    }
    let big = oracle.alpha() * oracle.value_upper_bound(g) + Rat::one();
    let yhat = Allocation(
        (0..n)
            .map(|p| {
                if a.contains(p) {
                    Rat::zero()
                } else if b.contains(p) {
                    big.clone()
                } else {
                    y.get(p).clone()
                }
            })
            .collect(),
    );
    let s = oracle.solve(g, &yhat)?;
    if !s.coalition.is_disjoint(b) {
        return Err(Error::OracleInconsistency(format!("oracle returned {:?} meeting the excluded set", s.coalition)));
    }
    Ok(ApproxSolution { coalition: s.coalition.union(a), lower_value_bound: s.lower_value_bound })
}

/// Players whose singleton lies outside L.
pub fn free_players(l: &LinearSubspace) -> Coalition {
    Coalition::from_members((0..l.ambient_dim()).filter(|&p| !l.contains_coalition(Coalition::singleton(p))))
}

fn subsets_up_to(items: &[usize], k: usize) -> Vec<Coalition> {
    let mut out = vec![Coalition::EMPTY];
    for &p in items {
        let grown: Vec<Coalition> = out.iter().filter(|s| s.len() < k).map(|s| s.insert(p)).collect();
        out.extend(grown);
    }
    out
}

/// (alpha + eps)-approximate LSA-MinExcess from an alpha-approximate MinExcess oracle.
pub fn lsa_approx<G: GameOracle + ?Sized>(
    oracle: &dyn MinExcessOracle,
    eps: &Rat,
    inst: &LSAInstance<'_, G>,
) -> Result<ApproxSolution> {
    let g: &dyn GameOracle = &inst.game;
    let y = &inst.y;
    let l = &inst.l;
    check_value_game(g, y)?;
    if !eps.is_positive() {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    if l.is_full() {
        return Err(Error::FullSpace);
    }
    let pp = free_players(l);
    if pp.is_empty() {
        return Err(Error::Invalid(format!("every singleton lies in L (dim {})", l.dim())));
    }
    let pp_list: Vec<usize> = pp.members().collect();
    let k = eps.recip().ceil().to_usize().ok_or_else(|| Error::Invalid("eps too small".into()))?;
    let mut best: Option<(Rat, ApproxSolution)> = None;
    let mut consider = |s: ApproxSolution| {
        if l.contains_coalition(s.coalition) {
            return;
        }
        let c = s.cost(y);
        let better = match &best {
            None => true,
            Some((bc, bs)) => c < *bc || (c == *bc && s.coalition < bs.coalition),
        };
        if better {
            best = Some((c, s));
        }
    };
    let mut tried = 0usize;
    for &p in &pp_list {
        let s = restricted_min_excess(oracle, g, y, Coalition::EMPTY, Coalition::singleton(p))?;
        tried += 2;
        consider(s.clone());
        consider(ApproxSolution { coalition: s.coalition.insert(p), lower_value_bound: s.lower_value_bound });
    }
    let mut outs: Vec<Coalition> = Vec::new();
    for i in subsets_up_to(&pp_list, k) {
        outs.push(pp.difference(i));
        if i.len() == k && k > 0 {
            let m = i.members().map(|q| y.get(q)).min().expect("nonempty in-set").clone();
            outs.push(Coalition::from_members(pp.difference(i).members().filter(|&q| *y.get(q) > m)));
        }
    }
    outs.sort();
    outs.dedup();
    for o in outs {
        let s = restricted_min_excess(oracle, g, y, pp.difference(o), o)?;
        tried += 1;
        consider(s);
    }
    best.map(|(_, s)| s)
        .ok_or_else(|| Error::Internal(format!("no candidate avoids L among {tried} tried (|P'| = {})", pp_list.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::TableGame;

    fn monotone_game(n: usize, seed: u64) -> TableGame {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut vals = vec![Rat::zero(); 1 << n];
        for s in 1..1usize << n {
            let mut lo = Rat::zero();
            for i in 0..n {
                if s >> i & 1 == 1 && vals[s ^ (1 << i)] > lo {
                    lo = vals[s ^ (1 << i)].clone();
                }
            }
            vals[s] = lo + Rat::from_int(rng.gen_range(0..4));
        }
        TableGame::new(n, GameKind::Value, vals).unwrap()
    }

    #[test]
    fn lsa_to_nz_examples() {
        let g = monotone_game(2, 1);
        let inst = LSAInstance::new(&g, Allocation::zeros(2), LinearSubspace::zero(2)).unwrap();
        let v: Vec<_> = lsa_to_nz(&inst).unwrap().into_iter().map(|i| i.a).collect();
        assert_eq!(v, vec![IntVec::from_i64s(&[1, 0]), IntVec::from_i64s(&[0, 1])]);
        let g3 = monotone_game(3, 2);
        let l = LinearSubspace::span_of_coalitions(&[Coalition::from_members([0, 1])], 3);
        let inst = LSAInstance::new(&g3, Allocation::zeros(3), l).unwrap();
        let v: Vec<_> = lsa_to_nz(&inst).unwrap().into_iter().map(|i| i.a).collect();
        assert_eq!(v, vec![IntVec::from_i64s(&[1, -1, 0]), IntVec::from_i64s(&[0, 0, 1])]);
    }

    #[test]
    fn nz_to_lsa_hyperplane() {
        let g = monotone_game(3, 3);
        let inst = NZInstance::new(&g, Allocation::zeros(3), IntVec::from_i64s(&[1, -1, 0])).unwrap();
        let l = nz_to_lsa(&inst).unwrap().l;
        assert_eq!(l.dim(), 2);
        assert!(l.contains_coalition(Coalition::from_members([0, 1])));
        assert!(l.contains_coalition(Coalition::singleton(2)));
        assert!(NZInstance::new(&g, Allocation::zeros(3), IntVec::zeros(3)).is_err());
    }

    #[test]
    fn restricted_matches_brute() {
        let g = monotone_game(5, 7);
        let y = Allocation((0..5).map(|i| Rat::new(i + 1, 2)).collect());
        let plain = ExactMinExcess.solve(&g, &y).unwrap();
        assert_eq!(restricted_min_excess(&ExactMinExcess, &g, &y, Coalition::EMPTY, Coalition::EMPTY).unwrap(), plain);
        let a = Coalition::singleton(1);
        let s = restricted_min_excess(&ExactMinExcess, &g, &y, a, Coalition::EMPTY).unwrap();
        assert!(s.coalition.contains(1));
        let want = (0..32u128).map(Coalition).filter(|c| c.contains(1)).map(|c| crate::game::excess(&g, &y, c)).min().unwrap();
        assert_eq!(crate::game::excess(&g, &y, s.coalition), want);
        let b = Coalition::singleton(3);
        let s = restricted_min_excess(&ExactMinExcess, &g, &y, Coalition::EMPTY, b).unwrap();
        assert!(!s.coalition.contains(3));
        let want = (0..32u128).map(Coalition).filter(|c| !c.contains(3)).map(|c| crate::game::excess(&g, &y, c)).min().unwrap();
        assert_eq!(crate::game::excess(&g, &y, s.coalition), want);
        assert!(restricted_min_excess(&ExactMinExcess, &g, &y, a, a).is_err());
    }

    #[test]
    fn lsa_approx_guarantee() {
        let eps = Rat::new(1, 4);
        for seed in 0..20 {
            let g = monotone_game(6, seed);
            let y = Allocation((0..6).map(|i| Rat::from_int((seed as i64 * 7 + i * 3) % 5)).collect());
            let l = LinearSubspace::span_of_coalitions(&[Coalition::from_members([0, 2]), Coalition::singleton(4)], 6);
            let inst = LSAInstance::new(&g, y.clone(), l.clone()).unwrap();
            let s = lsa_approx(&ExactMinExcess, &eps, &inst).unwrap();
            assert!(!l.contains_coalition(s.coalition));
            let opt = inst.brute().unwrap();
            let bound = (Rat::one() + &eps) * y.sum_over(opt.coalition) - g.value(opt.coalition);
            assert!(s.cost(&y) <= bound);
        }
    }
}
