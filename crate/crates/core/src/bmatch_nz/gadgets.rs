//! The three gadget reductions: b-matching min-excess to non-zero matching,
//! non-zero matching to shortest non-zero cycle, and back to b-matching.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::cycles::{cycle_components, Cycle};
use super::{BMatchInstance, BMatchingGame, NZCycleInstance, NZMatchingInstance};
use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::exact_math::{IntVec, Rat};
use crate::game::Allocation;
use crate::matching::{max_weight_b_matching, max_weight_matching, pad_to_perfect, Matching, WEdge, WeightedGraph};

/// Correspondence between a source instance and its reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetMap {
    pub construction: String,
    /// The constant K of the construction.
    pub k: Rat,
    /// Additive constant in the value identity.
    pub offset: Rat,
    /// Target vertices of each source vertex.
    pub vertex_map: Vec<Vec<usize>>,
    /// Target edges standing for each source vertex.
    pub vertex_edges: Vec<Vec<usize>>,
    /// Target edges standing for each source edge.
    pub edge_map: Vec<Vec<usize>>,
    /// The maximum-weight perfect matching of the padded graph.
    pub base_matching: Vec<usize>,
    /// Target edges with larger ids are padding.
    pub source_edges: usize,
}

/// Node gadget [v1, ~v1, v2, ~v2] per vertex and an edge gadget per edge;
/// w'(M') = K(|V|+|E|) + y(V) + w(M) - y(S) for the induced coalition S.
pub fn reduce_bmatch_to_nzmatching(inst: &BMatchInstance) -> Result<(NZMatchingInstance, GadgetMap)> {
    let g = &inst.game.graph;
    let b = &inst.game.b;
    let (nv, ne) = (g.n, g.edge_count());
    let sum_w: Rat = g.edges.iter().map(|e| e.w.abs()).sum();
    let sum_y: Rat = inst.y.0.iter().map(Rat::abs).sum();
    let k = Rat::from_int(2) * (sum_w + Rat::from_int(2) * sum_y) + Rat::one();
    let half = Rat::new(1, 2);
    let mut edges = Vec::new();
    let mut vertex_map = Vec::with_capacity(nv);
    let mut vertex_edges = Vec::with_capacity(nv);
    for v in 0..nv {
        let [v1, t1, v2, t2] = [4 * v, 4 * v + 1, 4 * v + 2, 4 * v + 3];
        let av = inst.a.get(v).to_i64().ok_or_else(|| Error::BoundExceeded(format!("a({v}) does not fit in i64")))?;
        let side = (&k + inst.y.get(v)) * &half;
        let base = edges.len();
        edges.push(WEdge::new(v1, t1, side.clone()));
        edges.push(WEdge::new(v2, t2, side));
        edges.push(WEdge::labelled(t1, t2, k.clone(), av));
        vertex_map.push(vec![v1, t1, v2, t2]);
        vertex_edges.push(vec![base, base + 1, base + 2]);
    }
    let mut edge_map = Vec::with_capacity(ne);
    for (e, ed) in g.edges.iter().enumerate() {
        let (xe, ye) = (4 * nv + 2 * e, 4 * nv + 2 * e + 1);
        let link = (&k + &ed.w) * &half;
        let mut ids = vec![edges.len()];
        edges.push(WEdge::new(xe, ye, k.clone()));
        for (x, gx) in [(ed.u, xe), (ed.v, ye)] {
            for i in 0..b[x] as usize {
                ids.push(edges.len());
                edges.push(WEdge::new(4 * x + 2 * i, gx, link.clone()));
            }
        }
        edge_map.push(ids);
    }
    let target = WeightedGraph::new(4 * nv + 2 * ne, edges)?;
    let offset = &k * Rat::from_int((nv + ne) as i64) + inst.y.total();
    let source_edges = target.edge_count();
    let map = GadgetMap {
        construction: "bmatch_to_nzmatching".into(),
        k,
        offset,
        vertex_map,
        vertex_edges,
        edge_map,
        base_matching: Vec::new(),
        source_edges,
    };
    Ok((NZMatchingInstance::new(target)?, map))
}

impl GadgetMap {
    /// Vertices whose {~v1, ~v2} edge is matched.
    pub fn coalition_of(&self, m: &Matching) -> Coalition {
        let mut s = Coalition::EMPTY;
        for (v, ids) in self.vertex_edges.iter().enumerate() {
            if m.edges.contains(&ids[2]) {
                s = s.insert(v);
            }
        }
        s
    }

    /// Source edges whose gadget uses a link edge.
    pub fn bmatching_of(&self, m: &Matching) -> Vec<usize> {
        (0..self.edge_map.len()).filter(|&e| self.edge_map[e][1..].iter().any(|x| m.edges.contains(x))).collect()
    }

    /// Symmetric difference of the base matching with the cycle, padding dropped.
    pub fn matching_from_cycle(&self, c: &Cycle) -> Matching {
        let mut edges: Vec<usize> = self
            .base_matching
            .iter()
            .filter(|e| !c.edges.contains(e))
            .chain(c.edges.iter().filter(|e| !self.base_matching.contains(e)))
            .copied()
            .filter(|&e| e < self.source_edges)
            .collect();
        edges.sort_unstable();
        Matching { edges }
    }

    /// Source cycles carried by the b-matching of G'[S]; the best non-zero one.
    pub fn cycle_from_coalition(&self, source: &NZCycleInstance, target: &BMatchingGame, s: Coalition) -> Result<Option<Cycle>> {
        let keep = target.graph.induced_edges(s);
        let sub = WeightedGraph { n: target.graph.n, edges: keep.iter().map(|&e| target.graph.edges[e].clone()).collect() };
        let chosen: Vec<usize> = max_weight_b_matching(&sub, &target.b)?.into_iter().map(|i| keep[i]).collect();
        let used: Vec<usize> =
            (0..self.edge_map.len()).filter(|&e| self.edge_map[e].iter().all(|x| chosen.contains(x))).collect();
        let mut best: Option<Cycle> = None;
        for comp in cycle_components(&source.graph, &used) {
            let c = Cycle::from_edges(&source.graph, comp);
            if c.label != 0 && best.as_ref().is_none_or(|b| (&c.cost, &c.edges) < (&b.cost, &b.edges)) {
                best = Some(c);
            }
        }
        Ok(best)
    }
}

/// Result of the matching-to-cycle reduction.
#[derive(Clone, Debug)]
pub enum CycleReduction {
    /// The maximum-weight matching is already non-zero.
    Direct(Matching),
    Cycle(NZCycleInstance, GadgetMap),
}

/// Pads to complete, takes a maximum-weight perfect matching M and flips
/// costs and labels on it: c = w - K, a' = -a on M; c = K - w, a' = a off M.
pub fn reduce_nzmatching_to_nzcycle(inst: &NZMatchingInstance) -> Result<CycleReduction> {
    let g = &inst.graph;
    let m0 = max_weight_matching(g);
    if m0.label(g) != 0 {
        return Ok(CycleReduction::Direct(m0));
    }
    let padded = pad_to_perfect(g);
    let mut base = max_weight_matching(&padded).edges;
    let mut covered = padded.degrees(&base);
    for e in g.edge_count()..padded.edge_count() {
        let WEdge { u, v, .. } = padded.edges[e];
        if covered[u] == 0 && covered[v] == 0 {
            covered[u] = 1;
            covered[v] = 1;
            base.push(e);
        }
    }
    base.sort_unstable();
    let k = Rat::from_int(2) * g.edges.iter().map(|e| e.w.abs()).sum::<Rat>() + Rat::one();
    let mut on = vec![false; padded.edge_count()];
    for &e in &base {
        on[e] = true;
    }
    let edges = padded
        .edges
        .iter()
        .enumerate()
        .map(|(e, ed)| {
            if on[e] {
                WEdge::labelled(ed.u, ed.v, &ed.w - &k, -ed.a)
            } else {
                WEdge::labelled(ed.u, ed.v, &k - &ed.w, ed.a)
            }
        })
        .collect();
    let cycle = NZCycleInstance::new(WeightedGraph::new(padded.n, edges)?)?;
    let map = GadgetMap {
        construction: "nzmatching_to_nzcycle".into(),
        k,
        offset: g.weight_of(&base.iter().copied().filter(|&e| e < g.edge_count()).collect::<Vec<_>>()),
        vertex_map: (0..g.n).map(|v| vec![v]).collect(),
        vertex_edges: Vec::new(),
        edge_map: (0..g.edge_count()).map(|e| vec![e]).collect(),
        base_matching: base,
        source_edges: g.edge_count(),
    };
    Ok(CycleReduction::Cycle(cycle, map))
}

/// Subdivides every edge e = uv into u-x_e (weight K - c(e)) and x_e-v
/// (weight K); b = 2, y = K everywhere, a'(x_e) = a(e).
pub fn reduce_nzcycle_to_bmatch(inst: &NZCycleInstance) -> Result<(BMatchInstance, GadgetMap)> {
    let g = &inst.graph;
    let (nv, ne) = (g.n, g.edge_count());
    let k = Rat::from_int(2) * g.edges.iter().map(|e| e.w.abs()).sum::<Rat>() + Rat::one();
    let mut edges = Vec::with_capacity(2 * ne);
    let mut edge_map = Vec::with_capacity(ne);
    for (e, ed) in g.edges.iter().enumerate() {
        let x = nv + e;
        edge_map.push(vec![2 * e, 2 * e + 1]);
        edges.push(WEdge::new(ed.u, x, &k - &ed.w));
        edges.push(WEdge::new(x, ed.v, k.clone()));
    }
    let n = nv + ne;
    let game = BMatchingGame::new(WeightedGraph::new(n, edges)?, vec![2; n])?;
    let mut a = vec![0i64; n];
    for (e, ed) in g.edges.iter().enumerate() {
        a[nv + e] = ed.a;
    }
    let target = BMatchInstance::new(game, IntVec::from_i64s(&a), Allocation::uniform(n, k.clone()))?;
    let map = GadgetMap {
        construction: "nzcycle_to_bmatch".into(),
        k,
        offset: Rat::zero(),
        vertex_map: (0..nv).map(|v| vec![v]).collect(),
        vertex_edges: Vec::new(),
        edge_map,
        base_matching: Vec::new(),
        source_edges: ne,
    };
    Ok((target, map))
}
