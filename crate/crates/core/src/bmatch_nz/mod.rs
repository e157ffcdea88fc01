//! b-matching games with b <= 2: the reductions between non-zero
//! min-excess, maximum-weight non-zero matching and shortest non-zero
//! cycle, and the solvers built on them.

mod cycles;
mod gadgets;
mod randomized;

use serde::{Deserialize, Serialize};

pub use cycles::{
    cycle_components, decompose_eulerian, is_simple_cycle, shortest_nz_cycle_bruteforce, shortest_nz_cycle_exact,
    shortest_nz_cycle_few_nonzero, Cycle, BRUTE_CYCLE_EDGE_CAP,
};
pub use gadgets::{reduce_bmatch_to_nzmatching, reduce_nzcycle_to_bmatch, reduce_nzmatching_to_nzcycle, CycleReduction, GadgetMap};
pub use randomized::nz_matching_randomized;

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::{integer_kernel_basis, IntVec, LinearSubspace, Rat};
use crate::game::{brute_nz_min_excess, enum_cap, excess, Allocation, ExcessReport, GameOracle};
use crate::matching::{b_matching_value, is_conservative, ExactMatchConfig, Matching, WEdge, WeightedGraph};
use crate::mps::LsaSolver;

/// Edge cap for the brute-force non-zero matching enumerator.
pub const BRUTE_MATCHING_EDGE_CAP: usize = 20;

/// v(S) = maximum weight of a b-matching in G[S].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BMatchingGame {
    pub graph: WeightedGraph,
    pub b: Vec<u8>,
}

impl BMatchingGame {
    pub fn new(graph: WeightedGraph, b: Vec<u8>) -> Result<BMatchingGame> {
        if b.len() != graph.n {
            return Err(Error::DimensionMismatch { expected: graph.n, got: b.len() });
        }
        if let Some(v) = b.iter().position(|&x| x != 1 && x != 2) {
            return Err(Error::Invalid(format!("b({v}) = {} is not 1 or 2", b[v])));
        }
        if graph.n > MAX_PLAYERS {
            return Err(Error::CapExceeded { players: graph.n, cap: MAX_PLAYERS });
        }
        if let Some(e) = graph.edges.iter().position(|e| e.u == e.v) {
            return Err(Error::Invalid(format!("edge {e} is a loop")));
        }
        Ok(BMatchingGame { graph, b })
    }

    pub fn b2_count(&self) -> usize {
        self.b.iter().filter(|&&x| x == 2).count()
    }
}

impl GameOracle for BMatchingGame {
    fn player_count(&self) -> usize {
        self.graph.n
    }

    fn value(&self, s: Coalition) -> Rat {
        b_matching_value(&self.graph, &self.b, s).expect("b validated at construction")
    }
}

/// NZ-MinExcess for a b-matching game: minimize y(S) - v(S) with a(S) != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMatchInstance {
    pub game: BMatchingGame,
    pub a: IntVec,
    pub y: Allocation,
}

impl BMatchInstance {
    pub fn new(game: BMatchingGame, a: IntVec, y: Allocation) -> Result<BMatchInstance> {
        let n = game.graph.n;
        if a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.len() });
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        Ok(BMatchInstance { game, a, y })
    }

    pub fn brute(&self) -> Result<ExcessReport> {
        brute_nz_min_excess(&self.game, &self.y, &self.a)
    }
}

/// Maximum-weight matching M with a(M) != 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NZMatchingInstance {
    pub graph: WeightedGraph,
}

impl NZMatchingInstance {
    pub fn new(graph: WeightedGraph) -> Result<NZMatchingInstance> {
        if graph.edges.iter().all(|e| e.a == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(NZMatchingInstance { graph })
    }

    /// Enumerates edge subsets; ties go to the lexicographically smallest set.
    pub fn brute(&self) -> Result<Option<Matching>> {
        let g = &self.graph;
        let m = g.edge_count();
        if m > BRUTE_MATCHING_EDGE_CAP {
            return Err(Error::CapExceeded { players: m, cap: BRUTE_MATCHING_EDGE_CAP });
        }
        let mut best: Option<(Rat, Matching)> = None;
        for mask in 0u32..1 << m {
            let mt = Matching { edges: (0..m).filter(|&e| mask >> e & 1 == 1).collect() };
            if mt.label(g) == 0 || !mt.is_valid(g) {
                continue;
            }
            let w = mt.weight(g);
            if best.as_ref().is_none_or(|(bw, bm)| w > *bw || (w == *bw && mt.edges < bm.edges)) {
                best = Some((w, mt));
            }
        }
        Ok(best.map(|(_, m)| m))
    }
}

/// Shortest cycle C with a(C) != 0 under conservative costs (stored as w).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NZCycleInstance {
    pub graph: WeightedGraph,
}

impl NZCycleInstance {
    pub fn new(graph: WeightedGraph) -> Result<NZCycleInstance> {
        if graph.edges.iter().all(|e| e.a == 0) {
            return Err(Error::ZeroVector);
        }
        if !is_conservative(&graph) {
            return Err(Error::Invalid("edge costs are not conservative".into()));
        }
        Ok(NZCycleInstance { graph })
    }
}

/// Solves a non-zero matching instance through the cycle reduction.
pub fn nz_matching_via_cycles(
    inst: &NZMatchingInstance,
    solver: impl Fn(&NZCycleInstance) -> Result<Option<Cycle>>,
) -> Result<Option<Matching>> {
    match reduce_nzmatching_to_nzcycle(inst)? {
        CycleReduction::Direct(m) => Ok(Some(m)),
        CycleReduction::Cycle(ci, map) => {
            let Some(c) = solver(&ci)? else { return Ok(None) };
            if c.cost > &map.k / Rat::from_int(2) {
                return Ok(None);
            }
            Ok(Some(map.matching_from_cycle(&c)))
        }
    }
}

/// Solver routing for b-matching excess queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Auto,
    Few2,
    Randomized,
    Brute,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "few2" => Ok(Strategy::Few2),
            "randomized" => Ok(Strategy::Randomized),
            "brute" => Ok(Strategy::Brute),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BMatchConfig {
    /// Largest number of b = 2 vertices routed to the few-non-zero solver by auto.
    pub few2_max_b2: usize,
    pub seed: u64,
    pub exact: ExactMatchConfig,
}

impl Default for BMatchConfig {
    fn default() -> Self {
        BMatchConfig { few2_max_b2: 4, seed: 0, exact: ExactMatchConfig::default() }
    }
}

/// The gadget instance scaled to integer weights (matching optima are scale-free).
fn integer_scaled(inst: &NZMatchingInstance) -> NZMatchingInstance {
    let lcm = inst.graph.edges.iter().fold(num_bigint::BigInt::from(1), |acc, e| num_integer::Integer::lcm(&acc, e.w.denom()));
    let f = Rat::from_bigint(lcm);
    let edges = inst.graph.edges.iter().map(|e| WEdge { w: &e.w * &f, ..e.clone() }).collect();
    NZMatchingInstance { graph: WeightedGraph { n: inst.graph.n, edges } }
}

/// NZ-MinExcess for b-matching games with the chosen strategy.
pub fn bmatch_nz_min_excess(inst: &BMatchInstance, strategy: Strategy, cfg: &BMatchConfig) -> Result<ExcessReport> {
    if inst.a.is_zero() {
        return Err(Error::ZeroVector);
    }
    let via = |st: Strategy| -> Result<ExcessReport> {
        let (nzm, map) = reduce_bmatch_to_nzmatching(inst)?;
        let m = match st {
            Strategy::Few2 => {
                let k = inst.game.b2_count() + 2;
                nz_matching_via_cycles(&nzm, |ci| Ok(shortest_nz_cycle_few_nonzero(ci, k)))?
            }
            _ => nz_matching_randomized(&integer_scaled(&nzm), cfg.seed, cfg.exact)?,
        };
        let m = m.ok_or_else(|| Error::Internal("reduced instance has no non-zero matching".into()))?;
        let s = map.coalition_of(&m);
        if num_traits::Zero::is_zero(&inst.a.sum_over(s)) {
            return Err(Error::Internal("back-translated coalition has a(S) = 0".into()));
        }
        Ok(ExcessReport { coalition: s, excess: excess(&inst.game, &inst.y, s) })
    };
    match strategy {
        Strategy::Brute => inst.brute(),
        Strategy::Few2 | Strategy::Randomized => via(strategy),
        Strategy::Auto => {
            if inst.game.b2_count() <= cfg.few2_max_b2 {
                return via(Strategy::Few2);
            }
            match via(Strategy::Randomized) {
                Err(Error::BoundExceeded(msg)) => {
                    if inst.game.graph.n <= enum_cap() {
                        inst.brute()
                    } else {
                        Err(Error::Invalid(format!("no applicable strategy: {msg}")))
                    }
                }
                other => other,
            }
        }
    }
}

/// LSA-MinExcess for b-matching games: one NZ query per kernel row of L.
pub fn bmatch_lsa_min_excess(
    game: &BMatchingGame,
    y: &Allocation,
    l: &LinearSubspace,
    strategy: Strategy,
    cfg: &BMatchConfig,
) -> Result<ExcessReport> {
    let n = game.graph.n;
    if l.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: l.ambient_dim() });
    }
    if l.is_full() {
        return Err(Error::FullSpace);
    }
    let mut best: Option<ExcessReport> = None;
    for a in integer_kernel_basis(l)? {
        let inst = BMatchInstance::new(game.clone(), a, y.clone())?;
        let r = bmatch_nz_min_excess(&inst, strategy, cfg)?;
        if best.as_ref().is_none_or(|b| (&r.excess, r.coalition) < (&b.excess, b.coalition)) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::Internal("kernel of a proper subspace is non-empty".into()))
}

/// LSA separation oracle for MPS on b-matching games.
pub struct BMatchLsa<'g> {
    pub game: &'g BMatchingGame,
    pub strategy: Strategy,
    pub cfg: BMatchConfig,
}

impl LsaSolver for BMatchLsa<'_> {
    fn min_excess_avoiding(&self, y: &Allocation, l: &LinearSubspace) -> Result<ExcessReport> {
        bmatch_lsa_min_excess(self.game, y, l, self.strategy, &self.cfg)
    }
}

#[cfg(test)]
mod tests;
