//! Two packing games whose values differ by at most eps everywhere while
//! their nucleoli differ by 2^n eps.

use serde::{Deserialize, Serialize};

use super::packing::PackingGame;
use super::report::{Check, Report};
use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::Rat;
use crate::game::{excess, Allocation, GameOracle};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstabilityParams {
    pub n: usize,
    pub eps: Rat,
    #[serde(rename = "K")]
    pub k: Rat,
}

/// 2^e as a rational, e may be negative.
fn pow2(e: i64) -> Rat {
    if e >= 0 {
        Rat::from_bigint(num_bigint::BigInt::from(1) << e as usize)
    } else {
        pow2(-e).recip()
    }
}

impl InstabilityParams {
    pub fn new(n: usize, eps: Rat, k: Rat) -> Result<InstabilityParams> {
        if !eps.is_positive() {
            return Err(Error::Invalid(format!("eps = {eps} must be positive")));
        }
        if 1 + 8 * (n + 2) > MAX_PLAYERS {
            return Err(Error::CapExceeded { players: 1 + 8 * (n + 2), cap: MAX_PLAYERS });
        }
        if k < pow2(n as i64) * &eps {
            return Err(Error::Invalid(format!("K = {k} is below 2^n eps = {}", pow2(n as i64) * &eps)));
        }
        Ok(InstabilityParams { n, eps, k })
    }

    pub fn levels(&self) -> usize {
        self.n + 2
    }

    pub fn player_count(&self) -> usize {
        1 + 8 * self.levels()
    }

    /// Player r.
    pub fn r(&self) -> usize {
        0
    }

    /// Player p_i^(l), with l in 1..=n+2 and i in 1..=4.
    pub fn p(&self, l: usize, i: usize) -> usize {
        1 + 8 * (l - 1) + (i - 1)
    }

    /// Player q_i^(l).
    pub fn q(&self, l: usize, i: usize) -> usize {
        self.p(l, i) + 4
    }

    /// {q_1^(l-1), .., q_4^(l-1), p_i^(l)} for l >= 2.
    pub fn m_set(&self, l: usize, i: usize) -> Coalition {
        Coalition::from_members((1..=4).map(|j| self.q(l - 1, j)).chain([self.p(l, i)]))
    }

    /// 2^(l-2) eps.
    pub fn shift(&self, l: usize) -> Rat {
        pow2(l as i64 - 2) * &self.eps
    }

    fn lk(&self, l: usize) -> Rat {
        Rat::from_int(l as i64) * &self.k
    }

    fn family(&self, r_weight: Rat) -> Vec<(Coalition, Rat)> {
        let mut sets = vec![(Coalition::singleton(self.r()), r_weight)];
        for i in 1..=4 {
            sets.push((Coalition::from_members([self.r(), self.p(1, i)]), Rat::one()));
        }
        for l in 1..=self.levels() {
            for i in 1..=4 {
                sets.push((Coalition::from_members([self.p(l, i), self.q(l, i)]), Rat::from_int(2) * self.lk(l)));
            }
        }
        for l in 1..self.levels() {
            for i in 1..=4 {
                sets.push((self.m_set(l + 1, i), Rat::from_int(4) * self.lk(l)));
            }
        }
        sets
    }
}

/// The games v and v~; they differ only in the weight of {r}.
pub fn gen_instability_pair(p: &InstabilityParams) -> Result<(PackingGame, PackingGame)> {
    let n = p.player_count();
    Ok((PackingGame::new(n, p.family(Rat::one()))?, PackingGame::new(n, p.family(Rat::one() - &p.eps))?))
}

/// The claimed nucleoli y and y~.
pub fn instability_closed_forms(p: &InstabilityParams) -> (Allocation, Allocation) {
    let n = p.player_count();
    let mut y = vec![Rat::zero(); n];
    let mut yt = vec![Rat::zero(); n];
    y[p.r()] = Rat::one();
    yt[p.r()] = Rat::one() - &p.eps;
    for l in 1..=p.levels() {
        for i in 1..=4 {
            y[p.p(l, i)] = p.lk(l);
            y[p.q(l, i)] = p.lk(l);
            yt[p.p(l, i)] = p.lk(l) + p.shift(l);
            yt[p.q(l, i)] = p.lk(l) - p.shift(l);
        }
    }
    (Allocation(y), Allocation(yt))
}

fn ledger(rep: &mut Report, p: &InstabilityParams, tag: &str, g: &PackingGame, y: &Allocation, sign: i64) {
    let full = Coalition::full(p.player_count());
    let eps_term = |l: usize| p.shift(l) * Rat::from_int(sign);
    // Zero-excess partition: {r} and the pairs {p, q}.
    let mut parts = vec![Coalition::singleton(p.r())];
    for l in 1..=p.levels() {
        for i in 1..=4 {
            parts.push(Coalition::from_members([p.p(l, i), p.q(l, i)]));
        }
    }
    let union = parts.iter().fold(Coalition::EMPTY, |acc, c| acc.union(*c));
    rep.push(Check::holds(format!("{tag}: zero-excess sets partition P"), union == full, union.len(), full.len()));
    for c in &parts {
        rep.push(Check::equal(format!("{tag}: excess {c:?} = 0"), &excess(g, y, *c), &Rat::zero()));
    }
    let packed: Rat = parts.iter().map(|c| g.weight_of(*c).cloned().unwrap_or_else(Rat::zero)).sum();
    rep.push(Check::equal(format!("{tag}: y(P) = v(P)"), &y.total(), &g.value(full)));
    rep.push(Check::equal(format!("{tag}: partition packs v(P)"), &packed, &g.value(full)));
    rep.push(Check::holds(format!("{tag}: y >= 0"), y.is_nonnegative(), "y", "0"));
    for (c, w) in &g.sets {
        rep.push(Check::at_least(format!("{tag}: core constraint on {c:?}"), &y.sum_over(*c), w));
    }
    for l in 1..=p.levels() {
        for i in 1..=4 {
            let (pl, ql) = (Coalition::singleton(p.p(l, i)), Coalition::singleton(p.q(l, i)));
            let ep = excess(g, y, pl);
            let eq = excess(g, y, ql);
            rep.push(Check::equal(format!("{tag}: excess {{p_{i}^({l})}}"), &ep, &(p.lk(l) + eps_term(l))));
            rep.push(Check::equal(format!("{tag}: excess {{q_{i}^({l})}}"), &eq, &(p.lk(l) - eps_term(l))));
            let (name, sep) = if l == 1 {
                (format!("{tag}: excess {{r, p_{i}^(1)}}"), Coalition::from_members([p.r(), p.p(1, i)]))
            } else {
                (format!("{tag}: excess M_{i}^({l})"), p.m_set(l, i))
            };
            let es = excess(g, y, sep);
            rep.push(Check::equal(name, &es, &(p.lk(l) - eps_term(l))));
            let p_side = ep.min(es);
            rep.push(Check::equal(format!("{tag}: separating excesses balanced at ({l},{i})"), &p_side, &eq));
        }
    }
}

/// Every equation of the proof's excess ledger, evaluated exactly.
pub fn verify_instability_balance(p: &InstabilityParams) -> Result<Report> {
    let (v, vt) = gen_instability_pair(p)?;
    let (y, yt) = instability_closed_forms(p);
    let mut rep = Report::new(format!("instability n={} eps={} K={}", p.n, p.eps, p.k));
    ledger(&mut rep, p, "y", &v, &y, 0);
    ledger(&mut rep, p, "y~", &vt, &yt, 1);
    let top = p.levels();
    let gap = (yt.get(p.p(top, 1)) - y.get(p.p(top, 1))).abs();
    rep.push(Check::equal("top-level difference = 2^n eps", &gap, &(pow2(p.n as i64) * &p.eps)));
    Ok(rep)
}
