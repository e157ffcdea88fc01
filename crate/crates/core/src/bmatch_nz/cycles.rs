//! Shortest non-zero cycle: brute force and the guess-the-non-zero-edges
//! T-join solver.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::NZCycleInstance;
use crate::error::{Error, Result};
use crate::exact_math::Rat;
use crate::matching::{TJoinOracle, WEdge, WeightedGraph};

/// Edge cap for the brute-force cycle enumerator.
pub const BRUTE_CYCLE_EDGE_CAP: usize = 16;

/// A simple cycle as sorted edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub edges: Vec<usize>,
    pub cost: Rat,
    pub label: i64,
}

impl Cycle {
    pub fn from_edges(g: &WeightedGraph, mut edges: Vec<usize>) -> Cycle {
        edges.sort_unstable();
        Cycle { cost: g.weight_of(&edges), label: g.label_of(&edges), edges }
    }

    fn beats(&self, other: &Cycle) -> bool {
        (&self.cost, &self.edges) < (&other.cost, &other.edges)
    }
}

fn keep_best(best: &mut Option<Cycle>, c: Cycle) {
    if best.as_ref().is_none_or(|b| c.beats(b)) {
        *best = Some(c);
    }
}

/// True when the edge set is one simple cycle; a loop is a cycle by itself.
pub fn is_simple_cycle(g: &WeightedGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    let deg = g.degrees(set);
    if deg.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let mut uf = UnionFind::<usize>::new(g.n);
    for &e in set {
        uf.union(g.edges[e].u, g.edges[e].v);
    }
    let root = uf.find(g.edges[set[0]].u);
    (0..g.n).all(|v| deg[v] == 0 || uf.find(v) == root)
}

/// Components of an edge set in which every touched vertex has degree 2.
pub fn cycle_components(g: &WeightedGraph, set: &[usize]) -> Vec<Vec<usize>> {
    let deg = g.degrees(set);
    let mut uf = UnionFind::<usize>::new(g.n);
    for &e in set {
        uf.union(g.edges[e].u, g.edges[e].v);
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for &e in set {
        let r = uf.find(g.edges[e].u);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, v)) => v.push(e),
            None => groups.push((r, vec![e])),
        }
    }
    groups
        .into_iter()
        .map(|(_, es)| es)
        .filter(|es| es.iter().all(|&e| deg[g.edges[e].u] == 2 && deg[g.edges[e].v] == 2))
        .collect()
}

/// Splits an edge set with all degrees even into simple cycles.
pub fn decompose_eulerian(g: &WeightedGraph, set: &[usize]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    for (k, &e) in set.iter().enumerate() {
        adj[g.edges[e].u].push(k);
        if g.edges[e].u != g.edges[e].v {
            adj[g.edges[e].v].push(k);
        }
    }
    let mut used = vec![false; set.len()];
    let mut pos: Vec<Option<usize>> = vec![None; g.n];
    let mut out = Vec::new();
    for k0 in 0..set.len() {
        if used[k0] {
            continue;
        }
        let start = g.edges[set[k0]].u;
        let mut path = vec![start];
        let mut path_edges: Vec<usize> = Vec::new();
        pos[start] = Some(0);
        let mut cur = start;
        loop {
            let Some(&k) = adj[cur].iter().find(|&&k| !used[k]) else { break };
            used[k] = true;
            let nxt = g.edges[set[k]].other(cur);
            path_edges.push(set[k]);
            if let Some(p) = pos[nxt] {
                out.push(path_edges.split_off(p));
                for &x in &path[p + 1..] {
                    pos[x] = None;
                }
                path.truncate(p + 1);
                if path_edges.is_empty() && adj[nxt].iter().all(|&k| used[k]) {
                    break;
                }
            } else {
                pos[nxt] = Some(path.len());
                path.push(nxt);
            }
            cur = nxt;
        }
        for &x in &path {
            pos[x] = None;
        }
    }
    out
}

/// Minimum-cost simple cycle with a(C) != 0 by enumerating edge subsets.
pub fn shortest_nz_cycle_bruteforce(inst: &NZCycleInstance) -> Result<Option<Cycle>> {
    let g = &inst.graph;
    let m = g.edge_count();
    if m > BRUTE_CYCLE_EDGE_CAP {
        return Err(Error::CapExceeded { players: m, cap: BRUTE_CYCLE_EDGE_CAP });
    }
    let mut best = None;
    for mask in 1u32..1 << m {
        let set: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        if g.label_of(&set) != 0 && is_simple_cycle(g, &set) {
            keep_best(&mut best, Cycle::from_edges(g, set));
        }
    }
    Ok(best)
}

fn subsets_up_to(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(items: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if !cur.is_empty() {
            f(cur);
        }
        if cur.len() == k {
            return;
        }
        for i in from..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut Vec::new(), f);
}

/// Guesses the non-zero part N of the cycle (|N| <= k, a(N) != 0) and
/// closes it with a minimum odd(N)-join among zero-label edges.
pub fn shortest_nz_cycle_few_nonzero(inst: &NZCycleInstance, k: usize) -> Option<Cycle> {
    let g = &inst.graph;
    let zero_ids: Vec<usize> = (0..g.edge_count()).filter(|&e| g.edges[e].a == 0).collect();
    let nonzero: Vec<usize> = (0..g.edge_count()).filter(|&e| g.edges[e].a != 0).collect();
    let zg = WeightedGraph {
        n: g.n,
        edges: zero_ids.iter().map(|&e| WEdge { a: 0, ..g.edges[e].clone() }).collect(),
    };
    let mut tj = TJoinOracle::new(&zg);
    let mut best = None;
    subsets_up_to(&nonzero, k, &mut |n_set| {
        if g.label_of(n_set) == 0 {
            return;
        }
        let mut t = vec![false; g.n];
        for &e in n_set {
            let WEdge { u, v, .. } = g.edges[e];
            if u != v {
                t[u] ^= true;
                t[v] ^= true;
            }
        }
        let Ok(j) = tj.solve(&t) else { return };
        let mut all: Vec<usize> = j.iter().map(|&i| zero_ids[i]).collect();
        all.extend_from_slice(n_set);
        for c in decompose_eulerian(g, &all) {
            let c = Cycle::from_edges(g, c);
            if c.label != 0 {
                keep_best(&mut best, c);
            }
        }
    });
    best
}

/// The few-non-zero solver with no limit on the guessed part.
pub fn shortest_nz_cycle_exact(inst: &NZCycleInstance) -> Option<Cycle> {
    let k = inst.graph.edges.iter().filter(|e| e.a != 0).count();
    shortest_nz_cycle_few_nonzero(inst, k)
}
