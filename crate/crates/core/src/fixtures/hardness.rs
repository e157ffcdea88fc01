//! The monotone games on which subspace avoidance defeats a
//! polynomial number of min-excess queries.

use serde::{Deserialize, Serialize};

use super::report::{Check, Report};
use crate::coalition::{all_coalitions, Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::{IntVec, Rat};
use crate::game::{brute_min_excess, excess, is_monotone, Allocation, GameOracle};

/// Player cap for the brute-force adversary check (k <= 3).
pub const HARDNESS_CHECK_MAX_K: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardnessParams {
    pub k: usize,
    pub s_star: Coalition,
}

impl HardnessParams {
    /// A = 0..2k, B = 2k..4k.
    pub fn new(k: usize, s_star: Coalition) -> Result<HardnessParams> {
        if k < 2 {
            return Err(Error::Invalid(format!("k = {k} must be at least 2")));
        }
        if 4 * k > MAX_PLAYERS {
            return Err(Error::CapExceeded { players: 4 * k, cap: MAX_PLAYERS });
        }
        let h = HardnessParams { k, s_star };
        if !s_star.fits(4 * k) || s_star.intersection(h.a_set()).len() != k + 1 || s_star.intersection(h.b_set()).len() != k - 1 {
            return Err(Error::Invalid(format!("S* = {s_star:?} needs k+1 players of A and k-1 of B")));
        }
        Ok(h)
    }

    /// S* made of the first k+1 players of A and the first k-1 of B.
    pub fn standard(k: usize) -> Result<HardnessParams> {
        HardnessParams::new(k, Coalition::from_members((0..=k).chain(2 * k..3 * k - 1)))
    }

    pub fn a_set(&self) -> Coalition {
        Coalition::from_members(0..2 * self.k)
    }

    pub fn b_set(&self) -> Coalition {
        Coalition::from_members(2 * self.k..4 * self.k)
    }

    /// a = 1 on A, -1 on B.
    pub fn adversary_a(&self) -> IntVec {
        IntVec::from_i64s(&(0..4 * self.k).map(|i| if i < 2 * self.k { 1 } else { -1 }).collect::<Vec<_>>())
    }
}

/// v(S) = 2k + 1/2 when |S| > 2k or S is balanced k/k, else |S|; with
/// `s_star` set, v(S*) = 2k + 1/6.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardnessGame {
    pub k: usize,
    pub s_star: Option<Coalition>,
}

impl GameOracle for HardnessGame {
    fn player_count(&self) -> usize {
        4 * self.k
    }

    fn value(&self, s: Coalition) -> Rat {
        let k = self.k as i64;
        if Some(s) == self.s_star {
            return Rat::from_int(2 * k) + Rat::new(1, 6);
        }
        let in_a = s.intersection(Coalition::from_members(0..2 * self.k)).len();
        if s.len() > 2 * self.k || (in_a == self.k && s.len() - in_a == self.k) {
            Rat::from_int(2 * k) + Rat::new(1, 2)
        } else {
            Rat::from_int(s.len() as i64)
        }
    }
}

/// (v-bar, v_{S*}).
pub fn gen_hardness_pair(h: &HardnessParams) -> (HardnessGame, HardnessGame) {
    (HardnessGame { k: h.k, s_star: None }, HardnessGame { k: h.k, s_star: Some(h.s_star) })
}

/// Brute-force confirmation that S* is the unique non-zero optimum for
/// y = 1 and that plain min-excess cannot tell the two games apart.
pub fn hardness_adversary_check(h: &HardnessParams) -> Result<Report> {
    if h.k > HARDNESS_CHECK_MAX_K {
        return Err(Error::CapExceeded { players: 4 * h.k, cap: 4 * HARDNESS_CHECK_MAX_K });
    }
    let (vbar, vstar) = gen_hardness_pair(h);
    let n = 4 * h.k;
    let y = Allocation::uniform(n, Rat::one());
    let a = h.adversary_a();
    let mut rep = Report::new(format!("hardness k={}", h.k));
    let mut best: Option<Rat> = None;
    let mut argmins: Vec<Coalition> = Vec::new();
    let mut pointwise = true;
    for s in all_coalitions(n) {
        let (vb, vs) = (vbar.value(s), vstar.value(s));
        if (s == h.s_star && vs <= vb) || (s != h.s_star && vs != vb) {
            pointwise = false;
        }
        if num_traits::Zero::is_zero(&a.sum_over(s)) {
            continue;
        }
        let e = excess(&vstar, &y, s);
        match &best {
            Some(b) if e > *b => {}
            Some(b) if e == *b => argmins.push(s),
            _ => {
                best = Some(e);
                argmins = vec![s];
            }
        }
    }
    rep.push(Check::holds("v_S* >= v-bar with equality off S*", pointwise, "v_S*", "v-bar"));
    rep.push(Check::holds("S* is the unique NZ-MinExcess optimum", argmins == vec![h.s_star], format!("{argmins:?}"), format!("{:?}", h.s_star)));
    rep.push(Check::equal("NZ optimum excess", best.as_ref().expect("a(S*) != 0"), &Rat::new(-1, 6)));
    let mb = brute_min_excess(&vbar, &y)?;
    let ms = brute_min_excess(&vstar, &y)?;
    rep.push(Check::equal("MinExcess value agrees on both games", &mb.excess, &ms.excess));
    let in_a = mb.coalition.intersection(h.a_set()).len();
    let balanced = in_a == h.k && mb.coalition.len() == 2 * h.k;
    rep.push(Check::holds("v-bar MinExcess optimum is balanced", balanced, format!("{:?}", mb.coalition), "balanced k/k"));
    rep.push(Check::equal("v-bar optimum is a v_S* optimum", &excess(&vstar, &y, mb.coalition), &ms.excess));
    rep.push(Check::holds("v-bar monotone", is_monotone(&vbar)?, "v-bar", "monotone"));
    rep.push(Check::holds("v_S* monotone", is_monotone(&vstar)?, "v_S*", "monotone"));
    Ok(rep)
}
