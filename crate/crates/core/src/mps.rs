//! The MPS scheme: repeated least-core LPs that fix dual-positive coalitions
//! until their span is the whole space.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::exact_math::{incidence_rats, integer_kernel_basis, LinearSubspace, Rat};
use crate::game::{check_cap, enum_cap, excess, Allocation, ExcessReport, GameKind, GameOracle, ValueView};
use crate::lp::{solve_lp_exact, LPInstance, LpStatus, RowKind, Simplex, VarBound};

/// Player cap for the explicit reference algorithm.
pub const REFERENCE_CAP: usize = 17;

/// Solves LSA-MinExcess for one fixed game: the minimum excess over
/// coalitions whose incidence vector is outside `l`.
///
/// Excesses use the game's own semantics (`c(S) - y(S)` for cost games).
pub trait LsaSolver: Sync {
    fn min_excess_avoiding(&self, y: &Allocation, l: &LinearSubspace) -> Result<ExcessReport>;
}

/// Separation by brute-force enumeration.
pub struct BruteLsa<'g, G: ?Sized> {
    pub game: &'g G,
}

impl<'g, G: GameOracle + ?Sized> LsaSolver for BruteLsa<'g, G> {
    fn min_excess_avoiding(&self, y: &Allocation, l: &LinearSubspace) -> Result<ExcessReport> {
        crate::game::brute_lsa_min_excess(self.game, y, l)
    }
}

pub enum MpsMode<'a> {
    /// Separate by sweeping all coalitions.
    Enumerate,
    /// Separate with an LSA-MinExcess oracle.
    Oracle(&'a dyn LsaSolver),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualEntry {
    pub coalition: Coalition,
    pub value: Rat,
}

/// One MPS level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub xi: Rat,
    pub fixed: Vec<Coalition>,
    pub duals: Vec<DualEntry>,
    pub cuts: usize,
}

/// Fixed coalitions with their levels and the span they generate together with P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpsState {
    pub fixed: Vec<(Coalition, Rat)>,
    pub span: LinearSubspace,
    pub iteration: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleolusResult {
    pub allocation: Allocation,
    pub trace: Vec<IterationRecord>,
}

/// Excess table over all coalitions, evaluated in scaled integers when possible.
struct EnumSeparator {
    n: usize,
    values: Vec<Rat>,
    scaled: Option<(Vec<i128>, BigInt)>,
}

const SCALE_LIMIT: u32 = 96;

fn fits(x: &BigInt) -> Option<i128> {
    if x.bits() <= SCALE_LIMIT as u64 {
        x.to_i128()
    } else {
        None
    }
}

impl EnumSeparator {
    fn new<G: GameOracle + ?Sized>(g: &G) -> Result<EnumSeparator> {
        let n = g.player_count();
        check_cap(n, enum_cap())?;
        let values: Vec<Rat> = (0..1u128 << n).map(|b| g.value(Coalition(b))).collect();
        let d = values.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let scaled: Option<Vec<i128>> = values.iter().map(|v| fits(&(v.numer() * (&d / v.denom())))).collect();
        Ok(EnumSeparator { n, values, scaled: scaled.map(|s| (s, d)) })
    }

    /// Coalitions outside `span`, as a bitmap.
    fn outside(&self, span: &LinearSubspace) -> Vec<bool> {
        let size = 1usize << self.n;
        let mut out = vec![false; size];
        let kernel = integer_kernel_basis(span).expect("span is not full while separating");
        let mut acc = vec![0i64; size];
        for a in &kernel {
            match a.to_i64s() {
                Some(a) => {
                    for s in 1..size {
                        acc[s] = acc[s & (s - 1)] + a[s.trailing_zeros() as usize];
                        if acc[s] != 0 {
                            out[s] = true;
                        }
                    }
                }
                None => {
                    for (s, o) in out.iter_mut().enumerate() {
                        *o = *o || !a.sum_over(Coalition(s as u128)).eq(&BigInt::from(0));
                    }
                }
            }
        }
        out
    }

    fn scaled_excess(&self, y: &Allocation) -> Option<(Vec<i128>, BigInt)> {
        let (vs, dv) = self.scaled.as_ref()?;
        let d = y.0.iter().fold(dv.clone(), |l, x| l.lcm(x.denom()));
        let f = fits(&(&d / dv))?;
        let ys: Option<Vec<i128>> = y.0.iter().map(|x| fits(&(x.numer() * (&d / x.denom())))).collect();
        let ys = ys?;
        let size = 1usize << self.n;
        let mut sum = vec![0i128; size];
        let mut ex = vec![0i128; size];
        for s in 1..size {
            sum[s] = sum[s & (s - 1)].checked_add(ys[s.trailing_zeros() as usize])?;
            ex[s] = sum[s].checked_sub(vs[s].checked_mul(f)?)?;
        }
        Some((ex, d))
    }

    /// Minimum outside `span` and up to `max_cuts` most violated coalitions below `xi`.
    fn sweep(&self, y: &Allocation, span: &LinearSubspace, xi: &Rat, max_cuts: usize) -> (ExcessReport, Vec<Coalition>) {
        let outside = self.outside(span);
        let size = 1usize << self.n;
        let mut cand: Vec<(Rat, Coalition)> = Vec::new();
        let mut best: Option<(Rat, usize)> = None;
        match self.scaled_excess(y) {
            Some((ex, d)) => {
                let threshold = xi * &Rat::from_bigint(d.clone());
                let mut best_i: Option<usize> = None;
                let mut below: Vec<usize> = Vec::new();
                for s in 1..size {
                    if !outside[s] {
                        continue;
                    }
                    if best_i.is_none_or(|b| ex[s] < ex[b]) {
                        best_i = Some(s);
                    }
                    if Rat::from_bigint(BigInt::from(ex[s])) < threshold {
                        below.push(s);
                    }
                }
                below.sort_by_key(|&s| (ex[s], s));
                below.truncate(max_cuts);
                let dr = Rat::from_bigint(d);
                for s in below {
                    cand.push((Rat::from_bigint(BigInt::from(ex[s])) / &dr, Coalition(s as u128)));
                }
                if let Some(b) = best_i {
                    best = Some((Rat::from_bigint(BigInt::from(ex[b])) / &dr, b));
                }
            }
            None => {
                let mut sum = vec![Rat::zero(); size];
                let mut all: Vec<(Rat, Coalition)> = Vec::new();
                for s in 1..size {
                    sum[s] = &sum[s & (s - 1)] + y.get(s.trailing_zeros() as usize);
                    if !outside[s] {
                        continue;
                    }
                    let e = &sum[s] - &self.values[s];
                    if best.as_ref().is_none_or(|(b, _)| e < *b) {
                        best = Some((e.clone(), s));
                    }
                    if e < *xi {
                        all.push((e, Coalition(s as u128)));
                    }
                }
                all.sort();
                all.truncate(max_cuts);
                cand = all;
            }
        }
        let (e, s) = best.expect("some coalition lies outside a proper subspace");
        (ExcessReport { coalition: Coalition(s as u128), excess: e }, cand.into_iter().map(|(_, s)| s).collect())
    }
}

enum Separator<'a> {
    Enum(EnumSeparator),
    Oracle(&'a dyn LsaSolver),
}

struct LevelOutcome {
    xi: Rat,
    y: Allocation,
    fixed: Vec<Coalition>,
    duals: Vec<DualEntry>,
    cuts: usize,
}

fn incidence_col(s: Coalition, n: usize, lead: Rat, sign: Rat) -> Vec<Rat> {
    let mut col = Vec::with_capacity(n + 1);
    col.push(lead);
    for i in 0..n {
        col.push(if s.contains(i) { sign.clone() } else { Rat::zero() });
    }
    col
}

/// Solves one level by cutting planes on the dual LP
/// `min sum_T mu_T (v(T)+xi_T) - sum_S lambda_S v(S)`
/// `s.t. sum lambda = 1, sum_T mu_T chi_T - sum_S lambda_S chi_S = 0, lambda >= 0`,
/// reading (xi, y) from its row duals.
#[allow(clippy::too_many_arguments)]
fn solve_level<G: GameOracle + ?Sized>(
    g: &G,
    vv: &ValueView<'_, G>,
    state: &MpsState,
    working: &mut Vec<Coalition>,
    sep: &Separator<'_>,
) -> Result<LevelOutcome> {
    let n = g.player_count();
    let full = Coalition::full(n);
    let mut lp = LPInstance { objective: vec![], rows: vec![], bounds: vec![] };
    for _ in 0..=n {
        lp.rows.push(crate::lp::LpRow::new(vec![], RowKind::Eq, Rat::zero()));
    }
    lp.rows[0].rhs = Rat::one();
    let mut sx = Simplex::new(&lp);
    let mut lambda_vars: Vec<(usize, Coalition)> = Vec::new();
    for &s in working.iter() {
        let k = sx.add_column(incidence_col(s, n, Rat::one(), -Rat::one()), vv.value(s), VarBound::NonNeg);
        lambda_vars.push((k, s));
    }
    let fixed_rows = std::iter::once((full, Rat::zero())).chain(state.fixed.iter().cloned());
    for (t, xi_t) in fixed_rows {
        let c = vv.value(t) + xi_t;
        sx.add_column(incidence_col(t, n, Rat::zero(), Rat::one()), -c, VarBound::Free);
    }
    let cut_cap = 1usize << n.min(40);
    let max_cuts = 2 * n + 2;
    let mut cuts = 0usize;
    loop {
        let sol = sx.solve();
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!("level LP status {:?}", sol.status)));
        }
        let xi = -&sol.dual[0];
        if xi != -&sol.objective {
            return Err(Error::Internal("level LP objective and dual disagree".into()));
        }
        let y = Allocation(sol.dual[1..].iter().map(|d| -d).collect());
        let new_rows: Vec<Coalition> = match sep {
            Separator::Enum(e) => e.sweep(&y, &state.span, &xi, max_cuts).1,
            Separator::Oracle(o) => {
                let y_game = vv.map_allocation(&y);
                let rep = o.min_excess_avoiding(&y_game, &state.span)?;
                if !rep.coalition.fits(n) || state.span.contains_coalition(rep.coalition) {
                    return Err(Error::OracleInconsistency(format!(
                        "coalition {:?} lies in the avoided subspace",
                        rep.coalition
                    )));
                }
                let actual = excess(g, &y_game, rep.coalition);
                if actual != rep.excess {
                    return Err(Error::OracleInconsistency(format!(
                        "reported excess {} for {:?}, actual {}",
                        rep.excess, rep.coalition, actual
                    )));
                }
                if actual < xi {
                    if working.contains(&rep.coalition) {
                        return Err(Error::Internal("violated coalition already in the LP".into()));
                    }
                    vec![rep.coalition]
                } else {
                    vec![]
                }
            }
        };
        if new_rows.is_empty() {
            let mut fixed = Vec::new();
            let mut duals = Vec::new();
            for &(k, s) in &lambda_vars {
                if !sol.primal[k].is_zero() {
                    fixed.push(s);
                    duals.push(DualEntry { coalition: s, value: sol.primal[k].clone() });
                }
            }
            return Ok(LevelOutcome { xi, y, fixed, duals, cuts });
        }
        for s in new_rows {
            cuts += 1;
            if cuts > cut_cap {
                return Err(Error::IterationLimit(cut_cap));
            }
            let k = sx.add_column(incidence_col(s, n, Rat::one(), -Rat::one()), vv.value(s), VarBound::NonNeg);
            lambda_vars.push((k, s));
            working.push(s);
        }
    }
}

fn validate<G: GameOracle + ?Sized>(g: &G) -> Result<usize> {
    let n = g.player_count();
    if n == 0 {
        return Err(Error::Invalid("game has no players".into()));
    }
    if n > crate::coalition::MAX_PLAYERS {
        return Err(Error::CapExceeded { players: n, cap: crate::coalition::MAX_PLAYERS });
    }
    Ok(n)
}

fn run_mps<G: GameOracle + ?Sized>(g: &G, mode: MpsMode<'_>, levels: Option<usize>) -> Result<(NucleolusResult, MpsState)> {
    let n = validate(g)?;
    let vv = ValueView::new(g);
    let full = Coalition::full(n);
    let sep = match mode {
        MpsMode::Enumerate => Separator::Enum(EnumSeparator::new(&vv)?),
        MpsMode::Oracle(o) => Separator::Oracle(o),
    };
    let mut state = MpsState { fixed: vec![], span: LinearSubspace::span_of_coalitions(&[full], n), iteration: 0 };
    let mut working: Vec<Coalition> = (0..n).map(Coalition::singleton).filter(|&s| !state.span.contains_coalition(s)).collect();
    let mut trace = Vec::new();
    let mut y = Allocation(vec![vv.value(full)]);
    while !state.span.is_full() {
        if levels.is_some_and(|l| state.iteration >= l) {
            break;
        }
        state.iteration += 1;
        if state.iteration > n + 1 {
            return Err(Error::IterationLimit(n + 1));
        }
        for s in (0..n).map(Coalition::singleton) {
            if !state.span.contains_coalition(s) && !working.contains(&s) {
                working.push(s);
            }
        }
        let out = solve_level(g, &vv, &state, &mut working, &sep)?;
        if out.fixed.is_empty() {
            return Err(Error::Internal("no coalition with nonzero dual".into()));
        }
        let mut rows: Vec<Vec<Rat>> = state.span.basis_rows().to_vec();
        for &s in &out.fixed {
            state.fixed.push((s, out.xi.clone()));
            rows.push(incidence_rats(s, n));
        }
        state.span = LinearSubspace::span_of(rows, n)?;
        working.retain(|&s| !state.span.contains_coalition(s));
        y = out.y;
        trace.push(IterationRecord { xi: out.xi, fixed: out.fixed, duals: out.duals, cuts: out.cuts });
    }
    if y.sum_over(full) != vv.value(full) {
        return Err(Error::Internal("allocation violates efficiency".into()));
    }
    for (s, xi) in &state.fixed {
        if excess(&vv, &y, *s) != *xi {
            return Err(Error::Internal(format!("fixed coalition {s:?} not at its level")));
        }
    }
    let allocation = vv.map_allocation(&y);
    Ok((NucleolusResult { allocation, trace }, state))
}

/// Nucleolus by the MPS scheme.
pub fn mps_nucleolus<G: GameOracle + ?Sized>(g: &G, mode: MpsMode<'_>) -> Result<NucleolusResult> {
    Ok(run_mps(g, mode, None)?.0)
}

/// Final MPS state alongside the result.
pub fn mps_nucleolus_with_state<G: GameOracle + ?Sized>(g: &G, mode: MpsMode<'_>) -> Result<(NucleolusResult, MpsState)> {
    run_mps(g, mode, None)
}

/// Optimal (xi, y) of the first MPS LP.
pub fn least_core<G: GameOracle + ?Sized>(g: &G, mode: MpsMode<'_>) -> Result<(Rat, Allocation)> {
    let n = validate(g)?;
    if n == 1 {
        return Ok((Rat::zero(), Allocation(vec![g.value(Coalition::full(1))])));
    }
    let vv = ValueView::new(g);
    let sep = match mode {
        MpsMode::Enumerate => Separator::Enum(EnumSeparator::new(&vv)?),
        MpsMode::Oracle(o) => Separator::Oracle(o),
    };
    let full = Coalition::full(n);
    let state = MpsState { fixed: vec![], span: LinearSubspace::span_of_coalitions(&[full], n), iteration: 0 };
    let mut working: Vec<Coalition> = (0..n).map(Coalition::singleton).collect();
    let out = solve_level(g, &vv, &state, &mut working, &sep)?;
    Ok((out.xi, vv.map_allocation(&out.y)))
}

/// Nucleolus by explicit LPs over all coalitions, fixing a tight coalition
/// exactly when no optimal solution of the level makes it slack.
pub fn reference_nucleolus<G: GameOracle + ?Sized>(g: &G) -> Result<NucleolusResult> {
    let n = validate(g)?;
    check_cap(n, REFERENCE_CAP)?;
    let vv = ValueView::new(g);
    let full = Coalition::full(n);
    let values: Vec<Rat> = (0..1u128 << n).map(|b| vv.value(Coalition(b))).collect();
    let mut fixed: Vec<(Coalition, Rat)> = vec![(full, Rat::zero())];
    let mut span = LinearSubspace::span_of_coalitions(&[full], n);
    let mut trace = Vec::new();
    let mut y = Allocation(vec![values[full.0 as usize].clone()]);
    let incid = |s: Coalition| -> Vec<Rat> { incidence_rats(s, n) };
    while !span.is_full() {
        if trace.len() > n {
            return Err(Error::IterationLimit(n + 1));
        }
        let open: Vec<Coalition> = (1..1u128 << n).map(Coalition).filter(|&s| !span.contains_coalition(s)).collect();
        // max xi, variables (xi, y_1..y_n).
        let mut obj = vec![Rat::zero(); n + 1];
        obj[0] = Rat::one();
        let mut lp = LPInstance::new(obj, vec![VarBound::Free; n + 1]);
        for (t, xt) in &fixed {
            let mut row = vec![Rat::zero()];
            row.extend(incid(*t));
            lp.push(row, RowKind::Eq, &values[t.0 as usize] + xt);
        }
        for &s in &open {
            let mut row = vec![-Rat::one()];
            row.extend(incid(s));
            lp.push(row, RowKind::Ge, values[s.0 as usize].clone());
        }
        let sol = solve_lp_exact(&lp);
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!("reference LP status {:?}", sol.status)));
        }
        let xi = sol.objective.clone();
        let level_y = Allocation(sol.primal[1..].to_vec());
        let mut witnesses = vec![level_y.clone()];
        let mut newly = Vec::new();
        for &s in &open {
            let tight_everywhere = witnesses.iter().all(|w| w.sum_over(s) - &values[s.0 as usize] == xi);
            if !tight_everywhere {
                continue;
            }
            let mut aux = LPInstance::new(incid(s), vec![VarBound::Free; n]);
            for (t, xt) in &fixed {
                aux.push(incid(*t), RowKind::Eq, &values[t.0 as usize] + xt);
            }
            for &t in &open {
                aux.push(incid(t), RowKind::Ge, &values[t.0 as usize] + &xi);
            }
            let a = solve_lp_exact(&aux);
            if a.status != LpStatus::Optimal {
                return Err(Error::Internal(format!("auxiliary LP status {:?}", a.status)));
            }
            if &a.objective - &values[s.0 as usize] == xi {
                newly.push(s);
            } else {
                witnesses.push(Allocation(a.primal.clone()));
            }
        }
        if newly.is_empty() {
            return Err(Error::Internal("no coalition is tight in every optimal solution".into()));
        }
        let mut rows = span.basis_rows().to_vec();
        for &s in &newly {
            fixed.push((s, xi.clone()));
            rows.push(incid(s));
        }
        span = LinearSubspace::span_of(rows, n)?;
        y = level_y;
        trace.push(IterationRecord { xi, fixed: newly, duals: vec![], cuts: 0 });
    }
    Ok(NucleolusResult { allocation: vv.map_allocation(&y), trace })
}

impl NucleolusResult {
    pub fn levels(&self) -> Vec<Rat> {
        self.trace.iter().map(|r| r.xi.clone()).collect()
    }
}

/// Sign adapter for reporting: maps a value-semantics level back to the game.
pub fn level_kind(kind: GameKind) -> &'static str {
    match kind {
        GameKind::Value => "y(S) - v(S)",
        GameKind::Cost => "c(S) - y(S)",
    }
}
