//! Seeded random instances for the cross-check suites.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bmatch_nz::{BMatchingGame, NZCycleInstance};
use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::exact_math::Rat;
use crate::game::{GameKind, TableGame};
use crate::graph::Graph;
use crate::matching::{WEdge, WeightedGraph};

/// Player cap for random table games.
pub const RANDOM_GAME_CAP: usize = 12;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// p/q with p in `num` and q in 1..=max_den.
pub fn random_rat(rng: &mut impl Rng, num: RangeInclusive<i64>, max_den: i64) -> Rat {
    Rat::new(rng.gen_range(num), rng.gen_range(1..=max_den))
}

/// Random values raised to their running maximum over subsets.
pub fn random_monotone_game(players: usize, seed: u64) -> Result<TableGame> {
    if players > RANDOM_GAME_CAP {
        return Err(Error::CapExceeded { players, cap: RANDOM_GAME_CAP });
    }
    let mut rng = rng_from_seed(seed);
    let mut vals = vec![Rat::zero(); 1 << players];
    for b in 1..1usize << players {
        let s = Coalition(b as u128);
        let mut v = random_rat(&mut rng, 0..=4 * s.len() as i64, 3);
        for i in s.members() {
            v = v.max(vals[b & !(1 << i)].clone());
        }
        vals[b] = v;
    }
    TableGame::new(players, GameKind::Value, vals)
}

fn random_pair(rng: &mut impl Rng, n: usize) -> (usize, usize) {
    let u = rng.gen_range(0..n);
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    (u, v)
}

/// Loop-free multigraph with m uniformly drawn edges.
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    random_graph_with(&mut rng_from_seed(seed), n, m)
}

pub fn random_graph_with(rng: &mut impl Rng, n: usize, m: usize) -> Result<Graph> {
    if n < 2 && m > 0 {
        return Err(Error::Invalid("a loop-free graph with edges needs two vertices".into()));
    }
    let edges = (0..m).map(|_| random_pair(rng, n)).collect();
    Graph::new(n, edges)
}

/// Loop-free multigraph with integer weights and labels from the given ranges.
pub fn random_weighted_graph(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    w: RangeInclusive<i64>,
    a: RangeInclusive<i64>,
) -> WeightedGraph {
    let edges = (0..m)
        .map(|_| {
            let (u, v) = random_pair(rng, n);
            WEdge::labelled(u, v, Rat::from_int(rng.gen_range(w.clone())), rng.gen_range(a.clone()))
        })
        .collect();
    WeightedGraph { n, edges }
}

/// b-matching game with at most `max_b2` vertices of capacity 2.
pub fn random_bmatch_game(rng: &mut impl Rng, n: usize, m: usize, max_b2: usize, w: RangeInclusive<i64>) -> BMatchingGame {
    let mut graph = random_weighted_graph(rng, n, m, w, 0..=0);
    for e in &mut graph.edges {
        e.a = 0;
    }
    let mut b = vec![1u8; n];
    let twos = rng.gen_range(0..=max_b2.min(n));
    for _ in 0..twos {
        b[rng.gen_range(0..n)] = 2;
    }
    BMatchingGame::new(graph, b).expect("generated game is valid")
}

/// Conservative cycle instance, loops allowed; retries until costs are conservative.
pub fn random_cycle_instance(
    rng: &mut impl Rng,
    n: usize,
    m: usize,
    c: RangeInclusive<i64>,
    a: RangeInclusive<i64>,
) -> NZCycleInstance {
    assert!(m > 0 && *a.start() != 0 || *a.end() != 0, "labels must be able to be non-zero");
    loop {
        let edges: Vec<WEdge> = (0..m)
            .map(|_| {
                let (u, v) = if n == 1 || rng.gen_bool(0.1) {
                    let x = rng.gen_range(0..n);
                    (x, x)
                } else {
                    random_pair(rng, n)
                };
                let cost = Rat::from_int(rng.gen_range(c.clone()));
                let cost = if u == v { cost.abs() } else { cost };
                WEdge::labelled(u, v, cost, rng.gen_range(a.clone()))
            })
            .collect();
        if let Ok(inst) = NZCycleInstance::new(WeightedGraph { n, edges }) {
            return inst;
        }
    }
}
