//! Matchings, b-matchings with b <= 2, T-joins and exact-weight perfect matchings.

mod blossom;
mod pfaffian;
mod tjoin;

use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::exact_math::Rat;

pub use blossom::max_weight_matching_edges;
pub use pfaffian::{exact_weight_matching_randomized, ExactMatchConfig, MatchingPolynomial, MODULUS};
pub use tjoin::{is_conservative, min_cost_t_join, TJoinInstance, TJoinOracle};

/// An edge with a weight and an integer label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WEdge {
    pub u: usize,
    pub v: usize,
    pub w: Rat,
    #[serde(default)]
    pub a: i64,
}

impl WEdge {
    pub fn new(u: usize, v: usize, w: Rat) -> WEdge {
        WEdge { u, v, w, a: 0 }
    }

    pub fn labelled(u: usize, v: usize, w: Rat, a: i64) -> WEdge {
        WEdge { u, v, w, a }
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Multigraph with weighted, labelled edges; edge ids are list positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<WEdge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<WEdge>) -> Result<WeightedGraph> {
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::Invalid(format!("edge {i} = ({},{}) has an endpoint outside 0..{n}", e.u, e.v)));
            }
        }
        Ok(WeightedGraph { n, edges })
    }

    pub fn from_triples(n: usize, edges: &[(usize, usize, i64)]) -> Result<WeightedGraph> {
        WeightedGraph::new(n, edges.iter().map(|&(u, v, w)| WEdge::new(u, v, Rat::from_int(w))).collect())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight_of(&self, set: &[usize]) -> Rat {
        set.iter().map(|&e| &self.edges[e].w).sum()
    }

    pub fn label_of(&self, set: &[usize]) -> i64 {
        set.iter().map(|&e| self.edges[e].a).sum()
    }

    /// Degree of each vertex in the edge set, loops counted twice.
    pub fn degrees(&self, set: &[usize]) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &e in set {
            d[self.edges[e].u] += 1;
            d[self.edges[e].v] += 1;
        }
        d
    }

    /// Subgraph induced by the vertex set, keeping vertex numbering; returns the kept edge ids.
    pub fn induced_edges(&self, s: Coalition) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| s.contains(self.edges[e].u) && s.contains(self.edges[e].v)).collect()
    }
}

/// A set of edge ids, no two sharing a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<usize>,
}

impl Matching {
    pub fn weight(&self, g: &WeightedGraph) -> Rat {
        g.weight_of(&self.edges)
    }

    pub fn label(&self, g: &WeightedGraph) -> i64 {
        g.label_of(&self.edges)
    }

    pub fn is_valid(&self, g: &WeightedGraph) -> bool {
        self.edges.iter().all(|&e| e < g.edge_count() && g.edges[e].u != g.edges[e].v)
            && g.degrees(&self.edges).iter().all(|&d| d <= 1)
    }

    pub fn is_perfect(&self, g: &WeightedGraph) -> bool {
        self.is_valid(g) && 2 * self.edges.len() == g.n
    }
}

fn solve(g: &WeightedGraph, max_cardinality: bool) -> Vec<usize> {
    let ids: Vec<usize> = (0..g.edges.len()).filter(|&e| g.edges[e].u != g.edges[e].v).collect();
    let list: Vec<(usize, usize, Rat)> = ids.iter().map(|&e| (g.edges[e].u, g.edges[e].v, g.edges[e].w.clone())).collect();
    max_weight_matching_edges(g.n, &list, max_cardinality).into_iter().map(|k| ids[k]).collect()
}

/// Exact maximum-weight matching.
pub fn max_weight_matching(g: &WeightedGraph) -> Matching {
    let edges = solve(g, false);
    let m = Matching { edges };
    debug_assert!(g.edge_count() > 12 || m.weight(g) == brute_max_weight_matching(g).weight(g));
    m
}

/// Maximum-weight matching among those of maximum cardinality.
pub fn max_weight_max_cardinality_matching(g: &WeightedGraph) -> Matching {
    Matching { edges: solve(g, true) }
}

/// Maximum-weight perfect matching, if one exists.
pub fn max_weight_perfect_matching(g: &WeightedGraph) -> Option<Matching> {
    let m = max_weight_max_cardinality_matching(g);
    m.is_perfect(g).then_some(m)
}

/// Maximum-weight matching by enumerating edge subsets; bounded to 24 edges.
pub fn brute_max_weight_matching(g: &WeightedGraph) -> Matching {
    assert!(g.edge_count() <= 24, "brute-force matching is limited to 24 edges");
    let mut best = (Rat::zero(), Vec::new());
    let mut cur = Vec::new();
    let mut used = vec![false; g.n];
    fn rec(g: &WeightedGraph, i: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, w: Rat, best: &mut (Rat, Vec<usize>)) {
        if i == g.edge_count() {
            if w > best.0 {
                *best = (w, cur.clone());
            }
            return;
        }
        rec(g, i + 1, used, cur, w.clone(), best);
        let e = &g.edges[i];
        if e.u != e.v && !used[e.u] && !used[e.v] {
            used[e.u] = true;
            used[e.v] = true;
            cur.push(i);
            rec(g, i + 1, used, cur, w + &e.w, best);
            cur.pop();
            used[e.u] = false;
            used[e.v] = false;
        }
    }
    rec(g, 0, &mut used, &mut cur, Rat::zero(), &mut best);
    Matching { edges: best.1 }
}

fn check_b(g: &WeightedGraph, b: &[u8]) -> Result<()> {
    if b.len() != g.n {
        return Err(Error::DimensionMismatch { expected: g.n, got: b.len() });
    }
    if let Some(v) = b.iter().position(|&x| x != 1 && x != 2) {
        return Err(Error::Invalid(format!("b({v}) = {} is not 1 or 2", b[v])));
    }
    Ok(())
}

/// Maximum-weight b-matching (b <= 2) as edge ids, via vertex splitting:
/// every vertex gets b(v) copies and a positive edge uv becomes the path
/// u'-x-y-v' whose middle edge is matched exactly when uv is not used.
pub fn max_weight_b_matching(g: &WeightedGraph, b: &[u8]) -> Result<Vec<usize>> {
    check_b(g, b)?;
    let mut first = Vec::with_capacity(g.n);
    let mut count = 0;
    for &bv in b {
        first.push(count);
        count += bv as usize;
    }
    let useful: Vec<usize> = (0..g.edge_count()).filter(|&e| g.edges[e].u != g.edges[e].v && g.edges[e].w.is_positive()).collect();
    let mut list = Vec::new();
    for (t, &e) in useful.iter().enumerate() {
        let WEdge { u, v, w, .. } = &g.edges[e];
        let x = count + 2 * t;
        let y = x + 1;
        list.push((x, y, w.clone()));
        for c in 0..b[*u] as usize {
            list.push((first[*u] + c, x, w.clone()));
        }
        for c in 0..b[*v] as usize {
            list.push((y, first[*v] + c, w.clone()));
        }
    }
    let total = count + 2 * useful.len();
    let chosen = max_weight_matching_edges(total, &list, false);
    let mut hit = vec![0u8; useful.len()];
    for k in chosen {
        let (p, q, _) = list[k];
        let (lo, hi) = (p.min(q), p.max(q));
        if lo < count && hi >= count {
            hit[(hi - count) / 2] += 1;
        }
    }
    Ok(useful.iter().zip(hit).filter(|&(_, h)| h == 2).map(|(&e, _)| e).collect())
}

/// Weight of a maximum b-matching in G[S].
pub fn b_matching_value(g: &WeightedGraph, b: &[u8], s: Coalition) -> Result<Rat> {
    check_b(g, b)?;
    let keep = g.induced_edges(s);
    let sub = WeightedGraph { n: g.n, edges: keep.iter().map(|&e| g.edges[e].clone()).collect() };
    let chosen = max_weight_b_matching(&sub, b)?;
    Ok(sub.weight_of(&chosen))
}

/// Brute-force b-matching value; bounded to 20 edges.
pub fn brute_b_matching_value(g: &WeightedGraph, b: &[u8], s: Coalition) -> Result<Rat> {
    check_b(g, b)?;
    let keep: Vec<usize> = g.induced_edges(s).into_iter().filter(|&e| g.edges[e].u != g.edges[e].v).collect();
    if keep.len() > 20 {
        return Err(Error::CapExceeded { players: keep.len(), cap: 20 });
    }
    let mut best = Rat::zero();
    for mask in 0u32..1 << keep.len() {
        let set: Vec<usize> = (0..keep.len()).filter(|&i| mask >> i & 1 == 1).map(|i| keep[i]).collect();
        if g.degrees(&set).iter().zip(b).all(|(&d, &bv)| d <= bv as usize) {
            best = best.max(g.weight_of(&set));
        }
    }
    Ok(best)
}

/// Even vertex count plus a zero-weight, zero-label edge between every pair
/// of vertices; every matching extends to a perfect one of equal weight and label.
pub fn pad_to_perfect(g: &WeightedGraph) -> WeightedGraph {
    let n = g.n + g.n % 2;
    let mut edges = g.edges.clone();
    for u in 0..n {
        for v in u + 1..n {
            edges.push(WEdge::new(u, v, Rat::zero()));
        }
    }
    WeightedGraph { n, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matching_examples() {
        let g = WeightedGraph::from_triples(3, &[(0, 1, 2), (1, 2, 3)]).unwrap();
        assert_eq!(max_weight_matching(&g).edges, vec![1]);
        let g = WeightedGraph::from_triples(4, &[(0, 1, 5), (1, 2, 1), (2, 3, 5), (3, 0, 1)]).unwrap();
        let m = max_weight_matching(&g);
        assert_eq!((m.edges.clone(), m.weight(&g)), (vec![0, 2], Rat::from_int(10)));
        let g = WeightedGraph::from_triples(3, &[(0, 1, -2), (1, 2, -3)]).unwrap();
        assert!(max_weight_matching(&g).edges.is_empty());
    }

    pub(crate) fn random_graph(rng: &mut impl Rng, n: usize, m: usize, lo: i64, hi: i64) -> WeightedGraph {
        let edges = (0..m)
            .map(|_| {
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                WEdge::labelled(u, v, Rat::new(rng.gen_range(lo..=hi), rng.gen_range(1..=2)), rng.gen_range(-2..=2))
            })
            .collect();
        WeightedGraph::new(n, edges).unwrap()
    }

    #[test]
    fn blossom_matches_brute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.gen_range(2..=9);
            let m = rng.gen_range(0..=12);
            let g = random_graph(&mut rng, n, m, -3, 9);
            let got = max_weight_matching(&g);
            assert!(got.is_valid(&g));
            assert_eq!(got.weight(&g), brute_max_weight_matching(&g).weight(&g), "{g:?}");
        }
    }

    #[test]
    fn max_cardinality_perfect() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let n = 2 * rng.gen_range(1..=4);
            let m = rng.gen_range(0..=12);
            let g = random_graph(&mut rng, n, m, -5, 5);
            let got = max_weight_perfect_matching(&g);
            let mut best: Option<Rat> = None;
            let mut cur = Vec::new();
            fn rec(g: &WeightedGraph, i: usize, cur: &mut Vec<usize>, best: &mut Option<Rat>) {
                if i == g.edge_count() {
                    let m = Matching { edges: cur.clone() };
                    if m.is_perfect(g) {
                        let w = m.weight(g);
                        if best.as_ref().is_none_or(|b| w > *b) {
                            *best = Some(w);
                        }
                    }
                    return;
                }
                rec(g, i + 1, cur, best);
                cur.push(i);
                rec(g, i + 1, cur, best);
                cur.pop();
            }
            rec(&g, 0, &mut cur, &mut best);
            assert_eq!(got.map(|m| m.weight(&g)), best);
        }
    }

    #[test]
    fn b_matching_examples() {
        let e = WeightedGraph::from_triples(2, &[(0, 1, 5)]).unwrap();
        assert_eq!(b_matching_value(&e, &[1, 1], Coalition::full(2)).unwrap(), Rat::from_int(5));
        let t = WeightedGraph::from_triples(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert_eq!(b_matching_value(&t, &[2, 2, 2], Coalition::full(3)).unwrap(), Rat::from_int(3));
        assert_eq!(b_matching_value(&t, &[2, 2, 2], Coalition::singleton(1)).unwrap(), Rat::zero());
        assert!(b_matching_value(&t, &[2, 3, 2], Coalition::full(3)).is_err());
    }

    #[test]
    fn b_matching_matches_brute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            let m = rng.gen_range(0..=10);
            let g = random_graph(&mut rng, n, m, -2, 6);
            let b: Vec<u8> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
            let s = Coalition(rng.gen_range(0..1u128 << n));
            assert_eq!(b_matching_value(&g, &b, s).unwrap(), brute_b_matching_value(&g, &b, s).unwrap());
        }
    }

    #[test]
    fn padding() {
        let g = WeightedGraph::new(3, vec![]).unwrap();
        let p = pad_to_perfect(&g);
        assert_eq!((p.n, p.edge_count()), (4, 6));
        assert!(p.edges.iter().all(|e| e.w.is_zero() && e.a == 0));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(0..=5);
            let g = random_graph(&mut rng, n, m, -2, 6);
            let p = pad_to_perfect(&g);
            assert_eq!(max_weight_matching(&g).weight(&g), max_weight_perfect_matching(&p).unwrap().weight(&p));
        }
    }
}
