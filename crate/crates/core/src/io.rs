//! JSON input and output formats for games, allocations, subspaces and
//! reduction instances.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bmatch_nz::{BMatchConfig, BMatchInstance, BMatchLsa, BMatchingGame, NZCycleInstance, NZMatchingInstance, Strategy};
use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::exact_math::{IntVec, LinearSubspace, Rat};
use crate::fixtures::PackingGame;
use crate::game::{Allocation, GameKind, GameOracle, TableGame};
use crate::graph::Graph;
use crate::matching::{WEdge, WeightedGraph};
use crate::matroid::{arboricity_nz_min_excess, network_strength_nz_min_excess, ArboricityGame, NetworkStrengthGame};
use crate::mps::{BruteLsa, LsaSolver};
use crate::nz_reductions::ViaNonZero;

/// Vertex cap for graphs read from reduction inputs.
pub const MAX_GRAPH_VERTICES: usize = 4096;

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, Rat)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLabelledGraph {
    n: usize,
    edges: Vec<(usize, usize, Rat, i64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    members: Vec<usize>,
    weight: Rat,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawGame {
    Table { values: Vec<Rat> },
    Bmatching { graph: RawWeightedGraph, b: Vec<u8> },
    Arboricity { graph: RawGraph },
    NetworkStrength { graph: RawGraph },
    Packing { players: usize, sets: Vec<RawSet> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGameFile {
    kind: Option<GameKind>,
    players: Option<Vec<String>>,
    game: RawGame,
}

/// A parsed game of one of the supported families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameSpec {
    Table(TableGame),
    BMatching(BMatchingGame),
    Arboricity(ArboricityGame),
    NetworkStrength(NetworkStrengthGame),
    Packing(PackingGame),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameFile {
    pub players: Vec<String>,
    pub game: GameSpec,
}

impl GameFile {
    pub fn oracle(&self) -> &dyn GameOracle {
        match &self.game {
            GameSpec::Table(g) => g,
            GameSpec::BMatching(g) => g,
            GameSpec::Arboricity(g) => g,
            GameSpec::NetworkStrength(g) => g,
            GameSpec::Packing(g) => g,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match &self.game {
            GameSpec::Table(_) => "table",
            GameSpec::BMatching(_) => "bmatching",
            GameSpec::Arboricity(_) => "arboricity",
            GameSpec::NetworkStrength(_) => "network_strength",
            GameSpec::Packing(_) => "packing",
        }
    }

    /// Oracle-mode separation for this game family.
    pub fn lsa_solver(&self, cfg: &BMatchConfig) -> Box<dyn LsaSolver + '_> {
        match &self.game {
            GameSpec::Table(g) => Box::new(BruteLsa { game: g }),
            GameSpec::Packing(g) => Box::new(BruteLsa { game: g }),
            GameSpec::BMatching(g) => Box::new(BMatchLsa { game: g, strategy: Strategy::Auto, cfg: *cfg }),
            GameSpec::Arboricity(g) => Box::new(ViaNonZero { solve: move |y: &Allocation, a: &IntVec| arboricity_nz_min_excess(g, y, a) }),
            GameSpec::NetworkStrength(g) => {
                Box::new(ViaNonZero { solve: move |y: &Allocation, a: &IntVec| network_strength_nz_min_excess(g, y, a) })
            }
        }
    }
}

impl GameOracle for GameFile {
    fn player_count(&self) -> usize {
        self.oracle().player_count()
    }
    fn kind(&self) -> GameKind {
        self.oracle().kind()
    }
    fn value(&self, s: Coalition) -> Rat {
        self.oracle().value(s)
    }
}

fn graph_from(raw: RawGraph) -> Result<Graph> {
    if raw.n > MAX_GRAPH_VERTICES {
        return Err(Error::CapExceeded { players: raw.n, cap: MAX_GRAPH_VERTICES });
    }
    Graph::new(raw.n, raw.edges)
}

fn weighted_from(n: usize, edges: Vec<WEdge>) -> Result<WeightedGraph> {
    if n > MAX_GRAPH_VERTICES {
        return Err(Error::CapExceeded { players: n, cap: MAX_GRAPH_VERTICES });
    }
    WeightedGraph::new(n, edges)
}

/// Reads a game file: {"kind", "players", "game": {"type", ...}}.
pub fn parse_game_file(text: &str) -> Result<GameFile> {
    let raw: RawGameFile = serde_json::from_str(text).map_err(parse_err)?;
    let game = match raw.game {
        RawGame::Table { values } => {
            let n = values.len().trailing_zeros() as usize;
            if values.is_empty() || values.len() != 1 << n {
                return Err(Error::Invalid(format!("table has {} values, not a power of two", values.len())));
            }
            GameSpec::Table(TableGame::new(n, raw.kind.unwrap_or(GameKind::Value), values)?)
        }
        RawGame::Bmatching { graph, b } => {
            let g = weighted_from(graph.n, graph.edges.into_iter().map(|(u, v, w)| WEdge::new(u, v, w)).collect())?;
            GameSpec::BMatching(BMatchingGame::new(g, b)?)
        }
        RawGame::Arboricity { graph } => GameSpec::Arboricity(ArboricityGame::new(graph_from(graph)?)?),
        RawGame::NetworkStrength { graph } => GameSpec::NetworkStrength(NetworkStrengthGame::new(graph_from(graph)?)?),
        RawGame::Packing { players, sets } => {
            if players > MAX_PLAYERS {
                return Err(Error::CapExceeded { players, cap: MAX_PLAYERS });
            }
            let mut out = Vec::with_capacity(sets.len());
            for s in sets {
                if let Some(&p) = s.members.iter().find(|&&p| p >= players) {
                    return Err(Error::Invalid(format!("packing set mentions player {p} outside 0..{players}")));
                }
                out.push((Coalition::from_members(s.members), s.weight));
            }
            GameSpec::Packing(PackingGame::new(players, out)?)
        }
    };
    let file = GameFile { players: Vec::new(), game };
    let n = file.player_count();
    if let Some(kind) = raw.kind {
        if kind != file.kind() {
            return Err(Error::Invalid(format!("{} games are {:?} games", file.type_name(), file.kind()).to_lowercase()));
        }
    }
    let players = match raw.players {
        Some(p) if p.len() != n => return Err(Error::DimensionMismatch { expected: n, got: p.len() }),
        Some(p) => p,
        None => (0..n).map(|i| i.to_string()).collect(),
    };
    Ok(GameFile { players, ..file })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAllocation {
    y: Vec<Rat>,
}

/// Reads {"y": [...]}; checks the length when `n` is given.
pub fn parse_allocation(text: &str, n: Option<usize>) -> Result<Allocation> {
    let raw: RawAllocation = serde_json::from_str(text).map_err(parse_err)?;
    if let Some(n) = n {
        if raw.y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: raw.y.len() });
        }
    }
    Ok(Allocation(raw.y))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubspace {
    basis: Vec<Vec<Rat>>,
}

/// Reads {"basis": [[...], ...]} as the span of its rows in Q^n.
pub fn parse_subspace(text: &str, n: usize) -> Result<LinearSubspace> {
    let raw: RawSubspace = serde_json::from_str(text).map_err(parse_err)?;
    if n > MAX_PLAYERS {
        return Err(Error::CapExceeded { players: n, cap: MAX_PLAYERS });
    }
    LinearSubspace::span_of(raw.basis, n)
}

/// Reads an integer vector: a JSON array or comma-separated integers.
pub fn parse_int_vec(text: &str) -> Result<IntVec> {
    let t = text.trim();
    let items: Vec<String> = if t.starts_with('[') {
        let v: Vec<Value> = serde_json::from_str(t).map_err(parse_err)?;
        v.into_iter().map(|x| x.as_str().map(str::to_owned).unwrap_or_else(|| x.to_string())).collect()
    } else {
        t.split(',').map(|s| s.trim().to_owned()).collect()
    };
    let mut out = Vec::with_capacity(items.len());
    for s in items {
        let r: Rat = s.parse()?;
        if !r.is_integer() {
            return Err(Error::Parse(format!("{s} is not an integer")));
        }
        out.push(r.numer().clone());
    }
    Ok(IntVec::new(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBMatch {
    graph: RawWeightedGraph,
    b: Vec<u8>,
    a: Vec<i64>,
    y: Vec<Rat>,
}

/// Source instance of one of the reductions.
#[derive(Clone, Debug)]
pub enum ReductionInput {
    BMatch(BMatchInstance),
    Matching(NZMatchingInstance),
    Cycle(NZCycleInstance),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionKind {
    /// b-matching min-excess to non-zero matching.
    A2M,
    /// Non-zero matching to shortest non-zero cycle.
    M2C,
    /// Shortest non-zero cycle to b-matching min-excess.
    C2B,
}

impl std::str::FromStr for ReductionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<ReductionKind> {
        match s {
            "a2m" => Ok(ReductionKind::A2M),
            "m2c" => Ok(ReductionKind::M2C),
            "c2b" => Ok(ReductionKind::C2B),
            _ => Err(Error::Parse(format!("unknown reduction {s:?}; expected a2m, m2c or c2b"))),
        }
    }
}

/// a2m: {"graph": {"n", "edges": [[u,v,w]]}, "b", "a", "y"};
/// m2c and c2b: {"n", "edges": [[u,v,w,a]]}.
pub fn parse_reduction_input(kind: ReductionKind, text: &str) -> Result<ReductionInput> {
    match kind {
        ReductionKind::A2M => {
            let raw: RawBMatch = serde_json::from_str(text).map_err(parse_err)?;
            let g = weighted_from(raw.graph.n, raw.graph.edges.into_iter().map(|(u, v, w)| WEdge::new(u, v, w)).collect())?;
            let game = BMatchingGame::new(g, raw.b)?;
            Ok(ReductionInput::BMatch(BMatchInstance::new(game, IntVec::from_i64s(&raw.a), Allocation(raw.y))?))
        }
        ReductionKind::M2C | ReductionKind::C2B => {
            let raw: RawLabelledGraph = serde_json::from_str(text).map_err(parse_err)?;
            let g = weighted_from(raw.n, raw.edges.into_iter().map(|(u, v, w, a)| WEdge::labelled(u, v, w, a)).collect())?;
            Ok(if kind == ReductionKind::M2C {
                ReductionInput::Matching(NZMatchingInstance::new(g)?)
            } else {
                ReductionInput::Cycle(NZCycleInstance::new(g)?)
            })
        }
    }
}

/// Labelled graph in the m2c / c2b input format.
pub fn labelled_graph_json(g: &WeightedGraph) -> Value {
    json!({
        "n": g.n,
        "edges": g.edges.iter().map(|e| json!([e.u, e.v, e.w, e.a])).collect::<Vec<_>>(),
    })
}

/// b-matching instance in the a2m input format.
pub fn bmatch_instance_json(inst: &BMatchInstance) -> Result<Value> {
    let mut a = Vec::with_capacity(inst.a.len());
    for x in inst.a.entries() {
        a.push(i64::try_from(x).map_err(|_| Error::BoundExceeded(format!("label {x} does not fit in i64")))?);
    }
    let g = &inst.game.graph;
    Ok(json!({
        "graph": {"n": g.n, "edges": g.edges.iter().map(|e| json!([e.u, e.v, e.w])).collect::<Vec<_>>()},
        "b": inst.game.b,
        "a": a,
        "y": inst.y,
    }))
}

/// Game file text for a parsed game.
pub fn game_file_json(file: &GameFile) -> Value {
    let game = match &file.game {
        GameSpec::Table(t) => json!({"type": "table", "values": t.values()}),
        GameSpec::BMatching(g) => json!({
            "type": "bmatching",
            "graph": {"n": g.graph.n, "edges": g.graph.edges.iter().map(|e| json!([e.u, e.v, e.w])).collect::<Vec<_>>()},
            "b": g.b,
        }),
        GameSpec::Arboricity(g) => json!({"type": "arboricity", "graph": g.graph}),
        GameSpec::NetworkStrength(g) => json!({"type": "network_strength", "graph": g.graph}),
        GameSpec::Packing(p) => json!({
            "type": "packing",
            "players": p.players,
            "sets": p.sets.iter().map(|(c, w)| json!({"members": c.members().collect::<Vec<_>>(), "weight": w})).collect::<Vec<_>>(),
        }),
    };
    json!({"kind": file.kind(), "players": file.players, "game": game})
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
}

/// Machine-readable error object.
pub fn error_json(e: &Error) -> Value {
    serde_json::to_value(ErrorJson { error: e.kind(), message: e.to_string() }).expect("plain struct")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_game_roundtrip() {
        let text = r#"{"kind":"value","players":["a","b"],"game":{"type":"table","values":["0","0","0","1"]}}"#;
        let f = parse_game_file(text).unwrap();
        assert_eq!((f.player_count(), f.kind()), (2, GameKind::Value));
        assert_eq!(f.value(Coalition::full(2)), Rat::one());
        let again = parse_game_file(&game_file_json(&f).to_string()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn combinatorial_games() {
        let bm = r#"{"game":{"type":"bmatching","graph":{"n":3,"edges":[[0,1,"2"],[1,2,3]]},"b":[1,2,1]}}"#;
        let f = parse_game_file(bm).unwrap();
        assert_eq!(f.value(Coalition::full(3)), Rat::from_int(5));
        let arb = r#"{"kind":"cost","game":{"type":"arboricity","graph":{"n":3,"edges":[[0,1],[1,2],[2,0]]}}}"#;
        let f = parse_game_file(arb).unwrap();
        assert_eq!((f.player_count(), f.kind()), (3, GameKind::Cost));
        assert_eq!(f.value(Coalition::full(3)), Rat::from_int(2));
        let ns = r#"{"game":{"type":"network_strength","graph":{"n":2,"edges":[[0,1],[0,1]]}}}"#;
        assert_eq!(parse_game_file(ns).unwrap().value(Coalition::full(2)), Rat::from_int(2));
        let pk = r#"{"game":{"type":"packing","players":3,"sets":[{"members":[0,1],"weight":"3/2"},{"members":[2],"weight":1}]}}"#;
        let f = parse_game_file(pk).unwrap();
        assert_eq!(f.value(Coalition::full(3)), Rat::new(5, 2));
        assert_eq!(parse_game_file(&game_file_json(&f).to_string()).unwrap(), f);
    }

    #[test]
    fn malformed_game_files() {
        let bad = [
            "",
            "{}",
            r#"{"game":{"type":"table","values":["0","1","2"]}}"#,
            r#"{"game":{"type":"table","values":[]}}"#,
            r#"{"game":{"type":"table","values":["0","1/0"]}}"#,
            r#"{"game":{"type":"unknown"}}"#,
            r#"{"kind":"value","game":{"type":"arboricity","graph":{"n":2,"edges":[[0,1]]}}}"#,
            r#"{"game":{"type":"arboricity","graph":{"n":2,"edges":[[0,0]]}}}"#,
            r#"{"game":{"type":"bmatching","graph":{"n":2,"edges":[[0,5,"1"]]},"b":[1,1]}}"#,
            r#"{"game":{"type":"bmatching","graph":{"n":2,"edges":[]},"b":[1,3]}}"#,
            r#"{"players":["x"],"game":{"type":"table","values":["0","0","0","0"]}}"#,
            r#"{"game":{"type":"packing","players":2,"sets":[{"members":[4],"weight":1}]}}"#,
            r#"{"game":{"type":"table","values":["0","1"]},"extra":1}"#,
        ];
        for t in bad {
            assert!(parse_game_file(t).is_err(), "accepted {t}");
        }
    }

    #[test]
    fn allocations_and_subspaces() {
        let y = parse_allocation(r#"{"y":["1/3","2/3",1]}"#, Some(3)).unwrap();
        assert_eq!(y.total(), Rat::from_int(2));
        assert!(parse_allocation(r#"{"y":["1"]}"#, Some(2)).is_err());
        assert!(parse_allocation(r#"{"y":["x"]}"#, None).is_err());
        let l = parse_subspace(r#"{"basis":[["1","1","0"],[2,2,0]]}"#, 3).unwrap();
        assert_eq!(l.dim(), 1);
        assert!(parse_subspace(r#"{"basis":[["1"]]}"#, 3).is_err());
        assert_eq!(parse_subspace(r#"{"basis":[]}"#, 2).unwrap().dim(), 0);
        assert_eq!(parse_int_vec("1, -1,0").unwrap(), IntVec::from_i64s(&[1, -1, 0]));
        assert_eq!(parse_int_vec("[1,\"-2\"]").unwrap(), IntVec::from_i64s(&[1, -2]));
        assert!(parse_int_vec("1/2").is_err());
    }

    #[test]
    fn reduction_inputs_chain() {
        let a2m = r#"{"graph":{"n":2,"edges":[[0,1,"3"]]},"b":[1,1],"a":[1,0],"y":["1","1/2"]}"#;
        let ReductionInput::BMatch(bm) = parse_reduction_input(ReductionKind::A2M, a2m).unwrap() else { panic!() };
        let again = parse_reduction_input(ReductionKind::A2M, &bmatch_instance_json(&bm).unwrap().to_string()).unwrap();
        assert!(matches!(again, ReductionInput::BMatch(b) if b == bm));
        let (nzm, _) = crate::bmatch_nz::reduce_bmatch_to_nzmatching(&bm).unwrap();
        let text = labelled_graph_json(&nzm.graph).to_string();
        assert!(matches!(parse_reduction_input(ReductionKind::M2C, &text).unwrap(), ReductionInput::Matching(m) if m == nzm));
        let c2b = r#"{"n":3,"edges":[[0,1,1,1],[1,2,1,0],[2,0,1,0]]}"#;
        assert!(matches!(parse_reduction_input(ReductionKind::C2B, c2b).unwrap(), ReductionInput::Cycle(_)));
        let neg = r#"{"n":2,"edges":[[0,1,-1,1],[0,1,0,0]]}"#;
        assert!(parse_reduction_input(ReductionKind::C2B, neg).is_err());
        assert!(parse_reduction_input(ReductionKind::M2C, r#"{"n":2,"edges":[[0,1,1,0]]}"#).is_err());
        assert!("x2y".parse::<ReductionKind>().is_err());
    }

    #[test]
    fn error_objects() {
        let v = error_json(&Error::ZeroVector);
        assert_eq!(v["error"], "zero_vector");
    }
}
