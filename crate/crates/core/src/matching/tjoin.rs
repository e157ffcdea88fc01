//! Minimum-cost T-joins.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{max_weight_max_cardinality_matching, WEdge, WeightedGraph};
use crate::error::{Error, Result};
use crate::exact_math::Rat;

/// Costs taken from the edge weights and a vertex set T of even size.
#[derive(Clone, Debug)]
pub struct TJoinInstance {
    pub graph: WeightedGraph,
    pub t: Vec<bool>,
}

impl TJoinInstance {
    /// Rejects odd |T|, isolated T vertices and negative cycles.
    pub fn new(graph: WeightedGraph, t: Vec<bool>) -> Result<TJoinInstance> {
        if t.len() != graph.n {
            return Err(Error::DimensionMismatch { expected: graph.n, got: t.len() });
        }
        if t.iter().filter(|&&x| x).count() % 2 == 1 {
            return Err(Error::NoTJoin);
        }
        let deg = graph.degrees(&(0..graph.edge_count()).filter(|&e| graph.edges[e].u != graph.edges[e].v).collect::<Vec<_>>());
        if let Some(v) = (0..graph.n).find(|&v| t[v] && deg[v] == 0) {
            return Err(Error::Invalid(format!("vertex {v} of T is isolated")));
        }
        if !is_conservative(&graph) {
            return Err(Error::Invalid("costs have a negative cycle".into()));
        }
        Ok(TJoinInstance { graph, t })
    }

    pub fn solve(&self) -> Result<Vec<usize>> {
        min_cost_t_join(&self.graph, &self.t)
    }
}

/// No cycle of negative total cost: the cheapest empty-boundary edge set costs 0.
pub fn is_conservative(g: &WeightedGraph) -> bool {
    let j = min_cost_t_join(g, &vec![false; g.n]).expect("the empty join always exists");
    !g.weight_of(&j).is_negative()
}

fn dijkstra(g: &WeightedGraph, adj: &[Vec<(usize, usize)>], cost: &[Rat], s: usize) -> (Vec<Option<Rat>>, Vec<Option<usize>>) {
    let mut dist: Vec<Option<Rat>> = vec![None; g.n];
    let mut via = vec![None; g.n];
    let mut done = vec![false; g.n];
    dist[s] = Some(Rat::zero());
    let mut heap = BinaryHeap::from([(Reverse(Rat::zero()), s)]);
    while let Some((Reverse(d), u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(w, e) in &adj[u] {
            let nd = &d + &cost[e];
            if dist[w].as_ref().is_none_or(|old| nd < *old) {
                dist[w] = Some(nd.clone());
                via[w] = Some(e);
                heap.push((Reverse(nd), w));
            }
        }
    }
    (dist, via)
}

/// Shortest-path data for repeated T-join queries on one graph.
pub struct TJoinOracle<'g> {
    g: &'g WeightedGraph,
    neg: Vec<bool>,
    parity: Vec<bool>,
    runs: Vec<Option<(Vec<Option<Rat>>, Vec<Option<usize>>)>>,
    cost: Vec<Rat>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl<'g> TJoinOracle<'g> {
    pub fn new(g: &'g WeightedGraph) -> Self {
        let neg: Vec<bool> = g.edges.iter().map(|e| e.w.is_negative()).collect();
        let mut parity = vec![false; g.n];
        let mut adj = vec![Vec::new(); g.n];
        for (e, WEdge { u, v, .. }) in g.edges.iter().enumerate() {
            if u != v {
                if neg[e] {
                    parity[*u] ^= true;
                    parity[*v] ^= true;
                }
                adj[*u].push((*v, e));
                adj[*v].push((*u, e));
            }
        }
        let cost = g.edges.iter().map(|e| e.w.abs()).collect();
        TJoinOracle { g, neg, parity, runs: vec![None; g.n], cost, adj }
    }

    /// Minimum-cost edge set whose odd-degree vertices are exactly T.
    pub fn solve(&mut self, t: &[bool]) -> Result<Vec<usize>> {
        let g = self.g;
        if t.len() != g.n {
            return Err(Error::DimensionMismatch { expected: g.n, got: t.len() });
        }
        let terms: Vec<usize> = (0..g.n).filter(|&v| t[v] ^ self.parity[v]).collect();
        if terms.len() % 2 == 1 {
            return Err(Error::NoTJoin);
        }
        for &s in &terms {
            if self.runs[s].is_none() {
                self.runs[s] = Some(dijkstra(g, &self.adj, &self.cost, s));
            }
        }
        let mut pairs = Vec::new();
        for i in 0..terms.len() {
            let dist = &self.runs[terms[i]].as_ref().expect("computed above").0;
            for j in i + 1..terms.len() {
                if let Some(d) = &dist[terms[j]] {
                    pairs.push(WEdge::new(i, j, -d));
                }
            }
        }
        let aux = WeightedGraph { n: terms.len(), edges: pairs };
        let pm = max_weight_max_cardinality_matching(&aux);
        if 2 * pm.edges.len() != terms.len() {
            return Err(Error::NoTJoin);
        }
        let mut inside = self.neg.clone();
        for k in pm.edges {
            let (i, j) = (terms[aux.edges[k].u], terms[aux.edges[k].v]);
            let via = &self.runs[i].as_ref().expect("computed above").1;
            let mut x = j;
            while x != i {
                let e = via[x].expect("reachable vertex has a predecessor");
                inside[e] ^= true;
                x = g.edges[e].other(x);
            }
        }
        Ok((0..g.edge_count()).filter(|&e| inside[e]).collect())
    }
}

/// Minimum-cost edge set whose odd-degree vertices are exactly T.
///
/// Negative edges are taken first and T adjusted by their odd vertices;
/// the rest is a minimum perfect matching on shortest-path distances.
pub fn min_cost_t_join(g: &WeightedGraph, t: &[bool]) -> Result<Vec<usize>> {
    TJoinOracle::new(g).solve(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn odd_set(g: &WeightedGraph, j: &[usize]) -> Vec<bool> {
        let mut odd = vec![false; g.n];
        for &e in j {
            if g.edges[e].u != g.edges[e].v {
                odd[g.edges[e].u] ^= true;
                odd[g.edges[e].v] ^= true;
            }
        }
        odd
    }

    #[test]
    fn examples() {
        let g = WeightedGraph::from_triples(3, &[(0, 1, 2), (1, 2, 3)]).unwrap();
        assert!(min_cost_t_join(&g, &[false; 3]).unwrap().is_empty());
        let g = WeightedGraph::from_triples(3, &[(0, 1, -2), (1, 2, 3)]).unwrap();
        assert_eq!(min_cost_t_join(&g, &[true, true, false]).unwrap(), vec![0]);
        let g = WeightedGraph::from_triples(3, &[(0, 1, -1), (1, 2, 2), (2, 0, 2)]).unwrap();
        assert!(min_cost_t_join(&g, &[false; 3]).unwrap().is_empty());
        assert!(is_conservative(&g));
        let bad = WeightedGraph::from_triples(3, &[(0, 1, -3), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert!(!is_conservative(&bad));
        assert!(TJoinInstance::new(bad, vec![false; 3]).is_err());
        let split = WeightedGraph::from_triples(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert_eq!(min_cost_t_join(&split, &[true, false, true, false]), Err(Error::NoTJoin));
    }

    #[test]
    fn matches_brute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.gen_range(2..=6);
            let m = rng.gen_range(0..=10);
            let g = super::super::tests::random_graph(&mut rng, n, m, -3, 6);
            let t: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let mut best: Option<Rat> = None;
            for mask in 0u32..1 << m {
                let j: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
                if odd_set(&g, &j) == t {
                    let c = g.weight_of(&j);
                    if best.as_ref().is_none_or(|b| c < *b) {
                        best = Some(c);
                    }
                }
            }
            match min_cost_t_join(&g, &t) {
                Ok(j) => {
                    assert_eq!(odd_set(&g, &j), t);
                    assert_eq!(Some(g.weight_of(&j)), best);
                }
                Err(e) => {
                    assert_eq!(e, Error::NoTJoin);
                    assert!(best.is_none());
                }
            }
        }
    }
}
