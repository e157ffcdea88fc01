//! Independence-oracle matroids built from graphic matroids, the non-zero
//! basis and independent set problems, and the arboricity and network
//! strength games.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::{IntVec, Rat};
use crate::game::{Allocation, ExcessReport, GameKind, GameOracle};
use crate::graph::Graph;

/// A matroid on `0..ground_size()`; sets are indicator vectors.
pub trait Matroid: Sync {
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: &[bool]) -> bool;

    /// Rank of `set`, by greedy insertion.
    fn rank(&self, set: &[bool]) -> usize {
        let mut cur = vec![false; self.ground_size()];
        let mut r = 0;
        for e in 0..set.len() {
            if set[e] {
                cur[e] = true;
                if self.is_independent(&cur) {
                    r += 1;
                } else {
                    cur[e] = false;
                }
            }
        }
        r
    }
}

impl<M: Matroid + ?Sized> Matroid for &M {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        (**self).is_independent(set)
    }
    fn rank(&self, set: &[bool]) -> usize {
        (**self).rank(set)
    }
}

pub fn indicator(members: &[usize], m: usize) -> Vec<bool> {
    let mut v = vec![false; m];
    for &e in members {
        v[e] = true;
    }
    v
}

pub fn coalition_indicator(s: Coalition, m: usize) -> Vec<bool> {
    (0..m).map(|e| s.contains(e)).collect()
}

fn members(set: &[bool]) -> Vec<usize> {
    (0..set.len()).filter(|&e| set[e]).collect()
}

/// Every subset is independent.
pub struct FreeMatroid(pub usize);

impl Matroid for FreeMatroid {
    fn ground_size(&self) -> usize {
        self.0
    }
    fn is_independent(&self, _set: &[bool]) -> bool {
        true
    }
    fn rank(&self, set: &[bool]) -> usize {
        set.iter().filter(|&&b| b).count()
    }
}

/// Forests of a graph.
pub struct GraphicMatroid<'g>(pub &'g Graph);

impl Matroid for GraphicMatroid<'_> {
    fn ground_size(&self) -> usize {
        self.0.edge_count()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        graphic_is_independent(self.0, set)
    }
}

pub fn graphic_is_independent(g: &Graph, set: &[bool]) -> bool {
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(g.n);
    g.edges.iter().zip(set).all(|(&(u, v), &inside)| !inside || uf.union(u, v))
}

/// Edge sets that split into k forests.
pub struct UnionMatroid<'g> {
    pub graph: &'g Graph,
    pub k: usize,
}

impl Matroid for UnionMatroid<'_> {
    fn ground_size(&self) -> usize {
        self.graph.edge_count()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        union_k_is_independent(self.graph, self.k, set)
    }
    fn rank(&self, set: &[bool]) -> usize {
        let mut p = ForestPartition::new(self.graph, self.k);
        members(set).into_iter().filter(|&e| p.try_insert(e)).count()
    }
}

pub fn union_k_is_independent(g: &Graph, k: usize, set: &[bool]) -> bool {
    let mut p = ForestPartition::new(g, k);
    members(set).into_iter().all(|e| p.try_insert(e))
}

/// Partition of a growing edge set into k forests, maintained by
/// shortest augmenting paths.
pub struct ForestPartition<'g> {
    graph: &'g Graph,
    k: usize,
    forest: Vec<Option<usize>>,
}

impl<'g> ForestPartition<'g> {
    pub fn new(graph: &'g Graph, k: usize) -> Self {
        ForestPartition { graph, k, forest: vec![None; graph.edge_count()] }
    }

    pub fn forest_count(&self) -> usize {
        self.k
    }

    pub fn add_forest(&mut self) {
        self.k += 1;
    }

    /// Edges of forest i.
    pub fn forest(&self, i: usize) -> Vec<usize> {
        (0..self.forest.len()).filter(|&e| self.forest[e] == Some(i)).collect()
    }

    pub fn forests(&self) -> Vec<Vec<usize>> {
        (0..self.k).map(|i| self.forest(i)).collect()
    }

    /// Edges on the forest-i path between the endpoints of e; None if they are disconnected there.
    fn cycle(&self, adj: &[Vec<Vec<(usize, usize)>>], i: usize, e: usize) -> Option<Vec<usize>> {
        let (s, t) = self.graph.edges[e];
        if s == t {
            return Some(vec![]);
        }
        let mut via: Vec<Option<(usize, usize)>> = vec![None; self.graph.n];
        let mut seen = vec![false; self.graph.n];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            if u == t {
                break;
            }
            for &(w, f) in &adj[i][u] {
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some((u, f));
                    q.push_back(w);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut path = Vec::new();
        let mut u = t;
        while let Some((p, f)) = via[u] {
            path.push(f);
            u = p;
        }
        Some(path)
    }

    /// Adds edge x if the enlarged set still splits into k forests.
    pub fn try_insert(&mut self, x: usize) -> bool {
        debug_assert!(self.forest[x].is_none());
        let mut adj = vec![vec![Vec::new(); self.graph.n]; self.k];
        for (e, f) in self.forest.iter().enumerate() {
            if let Some(i) = *f {
                let (u, v) = self.graph.edges[e];
                adj[i][u].push((v, e));
                adj[i][v].push((u, e));
            }
        }
        let m = self.forest.len();
        let mut parent: Vec<Option<usize>> = vec![None; m];
        let mut seen = vec![false; m];
        seen[x] = true;
        let mut q = VecDeque::from([x]);
        while let Some(e) = q.pop_front() {
            for i in 0..self.k {
                if self.forest[e] == Some(i) {
                    continue;
                }
                match self.cycle(&adj, i, e) {
                    None => {
                        let mut cur = e;
                        let mut target = i;
                        loop {
                            let old = self.forest[cur];
                            self.forest[cur] = Some(target);
                            match parent[cur] {
                                None => break,
                                Some(p) => {
                                    target = old.expect("relabelled edges lie in a forest");
                                    cur = p;
                                }
                            }
                        }
                        return true;
                    }
                    Some(cyc) => {
                        for f in cyc {
                            if !seen[f] {
                                seen[f] = true;
                                parent[f] = Some(e);
                                q.push_back(f);
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// Sets whose complement keeps full rank.
pub struct DualMatroid<M> {
    inner: M,
    full_rank: usize,
}

impl<M: Matroid> DualMatroid<M> {
    pub fn new(inner: M) -> Self {
        let full_rank = inner.rank(&vec![true; inner.ground_size()]);
        DualMatroid { inner, full_rank }
    }
}

impl<M: Matroid> Matroid for DualMatroid<M> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        let rest: Vec<bool> = set.iter().map(|b| !b).collect();
        self.inner.rank(&rest) == self.full_rank
    }
}

pub fn dual_is_independent<M: Matroid + ?Sized>(m: &M, set: &[bool]) -> bool {
    let full = m.rank(&vec![true; m.ground_size()]);
    let rest: Vec<bool> = set.iter().map(|b| !b).collect();
    m.rank(&rest) == full
}

/// Independent sets of size at most k.
pub struct Truncation<M> {
    pub inner: M,
    pub k: usize,
}

pub fn truncate<M: Matroid>(inner: M, k: usize) -> Truncation<M> {
    Truncation { inner, k }
}

impl<M: Matroid> Matroid for Truncation<M> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        set.iter().filter(|&&b| b).count() <= self.k && self.inner.is_independent(set)
    }
    fn rank(&self, set: &[bool]) -> usize {
        self.inner.rank(set).min(self.k)
    }
}

fn greedy<M: Matroid + ?Sized>(m: &M, w: &[Rat], skip_negative: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.ground_size()).collect();
    order.sort_by(|&x, &y| w[y].cmp(&w[x]).then(x.cmp(&y)));
    let mut cur = vec![false; m.ground_size()];
    for e in order {
        if skip_negative && w[e].is_negative() {
            continue;
        }
        cur[e] = true;
        if !m.is_independent(&cur) {
            cur[e] = false;
        }
    }
    members(&cur)
}

/// Greedy maximum-weight basis; ties go to smaller indices.
pub fn max_weight_basis<M: Matroid + ?Sized>(m: &M, w: &[Rat]) -> Vec<usize> {
    greedy(m, w, false)
}

/// Greedy maximum-weight independent set, skipping negative weights.
pub fn max_weight_independent_set<M: Matroid + ?Sized>(m: &M, w: &[Rat]) -> Vec<usize> {
    greedy(m, w, true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NZBasisResult {
    pub set: Vec<usize>,
    pub weight: Rat,
    pub a_value: BigInt,
}

fn weight_of(set: &[usize], w: &[Rat]) -> Rat {
    set.iter().map(|&e| &w[e]).sum()
}

fn a_of(set: &[usize], a: &IntVec) -> BigInt {
    set.iter().map(|&e| a.get(e)).sum()
}

fn better(cand: &NZBasisResult, best: &Option<NZBasisResult>) -> bool {
    match best {
        None => true,
        Some(b) => cand.weight > b.weight || (cand.weight == b.weight && cand.set < b.set),
    }
}

/// Maximum-weight basis B with a(B) != 0, searched one exchange away from a greedy basis.
pub fn nz_max_weight_basis<M: Matroid + ?Sized>(m: &M, w: &[Rat], a: &IntVec) -> Option<NZBasisResult> {
    let b0 = max_weight_basis(m, w);
    let a0 = a_of(&b0, a);
    if !a0.is_zero() {
        return Some(NZBasisResult { weight: weight_of(&b0, w), set: b0, a_value: a0 });
    }
    let ground = m.ground_size();
    let w0 = weight_of(&b0, w);
    let mut cur = indicator(&b0, ground);
    let mut best: Option<NZBasisResult> = None;
    for &e in &b0 {
        cur[e] = false;
        for f in 0..ground {
            if cur[f] || f == e || a.get(f) == a.get(e) {
                continue;
            }
            cur[f] = true;
            if m.is_independent(&cur) {
                let weight = &w0 - &w[e] + &w[f];
                let cand = NZBasisResult { set: members(&cur), weight, a_value: a.get(f) - a.get(e) };
                if better(&cand, &best) {
                    best = Some(cand);
                }
            }
            cur[f] = false;
        }
        cur[e] = true;
    }
    best
}

/// Maximum-weight independent set F with a(F) != 0, over all truncations.
pub fn nz_max_weight_independent_set<M: Matroid + ?Sized>(m: &M, w: &[Rat], a: &IntVec) -> Option<NZBasisResult> {
    let r = m.rank(&vec![true; m.ground_size()]);
    let mut best = None;
    for k in 1..=r {
        if let Some(c) = nz_max_weight_basis(&truncate(m, k), w, a) {
            if better(&c, &best) {
                best = Some(c);
            }
        }
    }
    best
}

fn check_edges(g: &Graph) -> Result<()> {
    if g.edge_count() > MAX_PLAYERS {
        return Err(Error::CapExceeded { players: g.edge_count(), cap: MAX_PLAYERS });
    }
    Ok(())
}

/// Fewest forests covering S; errors if S has a loop.
pub fn arboricity_value(g: &Graph, s: Coalition) -> Result<usize> {
    let mut p = ForestPartition::new(g, 0);
    for e in s.members() {
        let (u, v) = g.edges[e];
        if u == v {
            return Err(Error::Invalid(format!("edge {e} is a loop")));
        }
        if !p.try_insert(e) {
            p.add_forest();
            p.try_insert(e);
        }
    }
    Ok(p.forest_count())
}

/// Most edge-disjoint spanning trees inside S.
pub fn network_strength_value(g: &Graph, s: Coalition) -> usize {
    if g.n < 2 {
        return 0;
    }
    let t = g.n - 1;
    let set = coalition_indicator(s, g.edge_count());
    let mut k = 0;
    while (k + 1) * t <= s.len() && (UnionMatroid { graph: g, k: k + 1 }).rank(&set) == (k + 1) * t {
        k += 1;
    }
    k
}

/// Cost game on edges: c(S) is the arboricity of S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArboricityGame {
    pub graph: Graph,
}

impl ArboricityGame {
    pub fn new(graph: Graph) -> Result<Self> {
        check_edges(&graph)?;
        if let Some(e) = graph.edges.iter().position(|&(u, v)| u == v) {
            return Err(Error::Invalid(format!("edge {e} is a loop")));
        }
        Ok(ArboricityGame { graph })
    }
}

impl GameOracle for ArboricityGame {
    fn player_count(&self) -> usize {
        self.graph.edge_count()
    }
    fn kind(&self) -> GameKind {
        GameKind::Cost
    }
    fn value(&self, s: Coalition) -> Rat {
        Rat::from_int(arboricity_value(&self.graph, s).expect("loops rejected at construction") as i64)
    }
}

/// Value game on edges: v(S) is the number of disjoint spanning trees in S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkStrengthGame {
    pub graph: Graph,
}

impl NetworkStrengthGame {
    pub fn new(graph: Graph) -> Result<Self> {
        check_edges(&graph)?;
        if graph.n < 2 {
            return Err(Error::Invalid("network strength needs at least two vertices".into()));
        }
        Ok(NetworkStrengthGame { graph })
    }
}

impl GameOracle for NetworkStrengthGame {
    fn player_count(&self) -> usize {
        self.graph.edge_count()
    }
    fn value(&self, s: Coalition) -> Rat {
        Rat::from_int(network_strength_value(&self.graph, s) as i64)
    }
}

fn check_nz_input(g: &Graph, y: &Allocation, a: &IntVec) -> Result<()> {
    check_edges(g)?;
    let m = g.edge_count();
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    if a.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: a.len() });
    }
    if a.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

fn keep_best(best: &mut Option<ExcessReport>, cand: ExcessReport) {
    let better = match best {
        None => true,
        Some(b) => cand.excess < b.excess || (cand.excess == b.excess && cand.coalition < b.coalition),
    };
    if better {
        *best = Some(cand);
    }
}

/// NZ-MinExcess on the arboricity game: for each k, the heaviest
/// non-zero set coverable by k forests.
pub fn arboricity_nz_min_excess(game: &ArboricityGame, y: &Allocation, a: &IntVec) -> Result<ExcessReport> {
    let g = &game.graph;
    check_nz_input(g, y, a)?;
    let full = Coalition::full(g.edge_count());
    let top = arboricity_value(g, full)?;
    let mut best = None;
    for k in 1..=top {
        if let Some(r) = nz_max_weight_independent_set(&UnionMatroid { graph: g, k }, &y.0, a) {
            let s = Coalition::from_members(r.set);
            keep_best(&mut best, ExcessReport { coalition: s, excess: game.value(s) - y.sum_over(s) });
        }
    }
    best.ok_or_else(|| Error::Internal("no non-zero coalition found".into()))
}

/// NZ-MinExcess on the network strength game: for each k, the lightest
/// non-zero set containing k disjoint spanning trees, found through the
/// dual of the k-fold union.
pub fn network_strength_nz_min_excess(game: &NetworkStrengthGame, y: &Allocation, a: &IntVec) -> Result<ExcessReport> {
    let g = &game.graph;
    check_nz_input(g, y, a)?;
    let m = g.edge_count();
    let mut best = None;
    let neg: Vec<Rat> = y.0.iter().map(|x| -x).collect();
    if let Some(r) = nz_max_weight_independent_set(&FreeMatroid(m), &neg, a) {
        let s = Coalition::from_members(r.set);
        keep_best(&mut best, ExcessReport { coalition: s, excess: y.sum_over(s) - game.value(s) });
    }
    if g.is_connected() {
        let t = g.n - 1;
        let total: BigInt = a.entries().iter().sum();
        let mut ext = g.clone();
        let mut ya = y.0.clone();
        let mut aa = a.entries().to_vec();
        if !total.is_zero() {
            ext.edges.push((0, 0));
            ya.push(Rat::one() + y.0.iter().map(|x| x.abs()).sum::<Rat>());
            aa.push(-total);
        }
        let aa = IntVec::new(aa);
        let all = vec![true; ext.edge_count()];
        for k in 1..=m / t {
            let um = UnionMatroid { graph: &ext, k };
            if um.rank(&all) != k * t {
                break;
            }
            let dual = DualMatroid::new(um);
            if let Some(r) = nz_max_weight_independent_set(&dual, &ya, &aa) {
                let f = indicator(&r.set, ext.edge_count());
                if f.len() > m && !f[m] {
                    continue;
                }
                let s = Coalition::from_members((0..m).filter(|&e| !f[e]));
                keep_best(&mut best, ExcessReport { coalition: s, excess: y.sum_over(s) - game.value(s) });
            }
        }
    }
    best.ok_or_else(|| Error::Internal("no non-zero coalition found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::brute_nz_min_excess;
    use rand::{Rng, SeedableRng};

    fn triangle() -> Graph {
        Graph::cycle(3)
    }

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    #[test]
    fn oracle_examples() {
        let g = triangle();
        let all = vec![true; 3];
        assert!(!graphic_is_independent(&g, &all));
        assert!(union_k_is_independent(&g, 2, &all));
        let path = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let d = DualMatroid::new(GraphicMatroid(&path));
        assert!(d.is_independent(&[false, false]));
        assert!(!d.is_independent(&[true, false]));
        assert!(!dual_is_independent(&GraphicMatroid(&path), &[false, true]));
    }

    #[test]
    fn greedy_examples() {
        let g = triangle();
        let m = GraphicMatroid(&g);
        assert_eq!(max_weight_basis(&m, &rats(&[3, 2, 1])), vec![0, 1]);
        assert_eq!(max_weight_independent_set(&m, &rats(&[-1, -2, -3])), Vec::<usize>::new());
        assert_eq!(max_weight_basis(&m, &rats(&[1, 1, 1])), vec![0, 1]);
    }

    #[test]
    fn nz_basis_examples() {
        let g = triangle();
        let m = GraphicMatroid(&g);
        let r = nz_max_weight_basis(&m, &rats(&[3, 2, 1]), &IntVec::from_i64s(&[1, -1, 0])).unwrap();
        assert_eq!((r.set, r.weight, r.a_value), (vec![0, 2], Rat::from_int(4), BigInt::from(1)));
        let r = nz_max_weight_basis(&m, &rats(&[3, 2, 1]), &IntVec::from_i64s(&[1, 0, 0])).unwrap();
        assert_eq!(r.set, vec![0, 1]);
        assert!(nz_max_weight_basis(&m, &rats(&[3, 2, 1]), &IntVec::zeros(3)).is_none());
        let single = Graph::new(2, vec![(0, 1)]).unwrap();
        let r = nz_max_weight_independent_set(&GraphicMatroid(&single), &rats(&[-5]), &IntVec::from_i64s(&[1])).unwrap();
        assert_eq!((r.set, r.weight), (vec![0], Rat::from_int(-5)));
        let r = nz_max_weight_independent_set(&m, &rats(&[3, 2, 1]), &IntVec::from_i64s(&[1, -1, 0])).unwrap();
        assert_eq!((r.set, r.weight), (vec![0, 2], Rat::from_int(4)));
    }

    #[test]
    fn game_values() {
        let g = triangle();
        assert_eq!(arboricity_value(&g, Coalition::full(3)).unwrap(), 2);
        assert_eq!(arboricity_value(&g, Coalition::EMPTY).unwrap(), 0);
        let k4 = Graph::complete(4);
        assert_eq!(network_strength_value(&k4, Coalition::full(6)), 2);
        assert_eq!(network_strength_value(&k4, Coalition::EMPTY), 0);
    }

    fn random_graph(rng: &mut impl Rng, n: usize, m: usize, loops: bool) -> Graph {
        let edges = (0..m)
            .map(|_| loop {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if loops || u != v {
                    break (u, v);
                }
            })
            .collect();
        Graph::new(n, edges).unwrap()
    }

    fn brute_forests(g: &Graph, s: Coalition, k: usize) -> bool {
        let e: Vec<usize> = s.members().collect();
        let total = k.pow(e.len() as u32);
        (0..total).any(|mut code| {
            let mut parts = vec![vec![false; g.edge_count()]; k];
            for &x in &e {
                parts[code % k][x] = true;
                code /= k;
            }
            parts.iter().all(|p| graphic_is_independent(g, p))
        })
    }

    #[test]
    fn union_matches_brute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let m = rng.gen_range(1..=7);
            let n = rng.gen_range(2..=4);
            let g = random_graph(&mut rng, n, m, false);
            for s in crate::coalition::all_coalitions(m) {
                let arb = arboricity_value(&g, s).unwrap();
                assert!(arb == 0 || brute_forests(&g, s, arb));
                assert!(arb == 0 || !brute_forests(&g, s, arb - 1));
            }
        }
    }

    #[test]
    fn nz_solvers_match_brute() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut tested = 0;
        while tested < 60 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(2..=4);
            let g = random_graph(&mut rng, n, m, false);
            let y = Allocation((0..m).map(|_| Rat::new(rng.gen_range(-4..=6), rng.gen_range(1..=3))).collect());
            let a = IntVec::from_i64s(&(0..m).map(|_| rng.gen_range(-2..=2)).collect::<Vec<_>>());
            if a.is_zero() {
                continue;
            }
            tested += 1;
            let ag = ArboricityGame::new(g.clone()).unwrap();
            let got = arboricity_nz_min_excess(&ag, &y, &a).unwrap();
            assert_eq!(got.excess, brute_nz_min_excess(&ag, &y, &a).unwrap().excess);
            let ng = NetworkStrengthGame::new(g).unwrap();
            let got = network_strength_nz_min_excess(&ng, &y, &a).unwrap();
            assert_eq!(got.excess, brute_nz_min_excess(&ng, &y, &a).unwrap().excess, "{:?} {:?} {:?}", ng.graph, y, a);
        }
    }

    #[test]
    fn tree_strength_forced() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (1, 3)]).unwrap();
        let ng = NetworkStrengthGame::new(g).unwrap();
        let y = Allocation(rats(&[-1, -1, -1]));
        let r = network_strength_nz_min_excess(&ng, &y, &IntVec::from_i64s(&[0, 1, 0])).unwrap();
        assert_eq!(r.coalition, Coalition::full(3));
        assert_eq!(r.excess, Rat::from_int(-4));
    }
}
