use num_traits::Zero;
use rand::Rng;

use super::*;
use crate::fixtures::{random_bmatch_game, random_cycle_instance, random_rat, random_weighted_graph, rng_from_seed};
use crate::game::brute_lsa_min_excess;

fn rat(n: i64) -> Rat {
    Rat::from_int(n)
}

fn random_instance(rng: &mut impl Rng, max_b2: usize) -> BMatchInstance {
    let n = rng.gen_range(1..=5);
    let m = if n < 2 { 0 } else { rng.gen_range(0..=6) };
    let game = random_bmatch_game(rng, n, m, max_b2, -5..=5);
    let mut a: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    if a.iter().all(|&x| x == 0) {
        a[0] = 1;
    }
    let y = Allocation((0..n).map(|_| random_rat(rng, -6..=6, 3)).collect());
    BMatchInstance::new(game, IntVec::from_i64s(&a), y).unwrap()
}

fn cycle_inst(n: usize, edges: &[(usize, usize, i64, i64)]) -> NZCycleInstance {
    let es = edges.iter().map(|&(u, v, c, a)| WEdge::labelled(u, v, rat(c), a)).collect();
    NZCycleInstance::new(WeightedGraph::new(n, es).unwrap()).unwrap()
}

fn matching_inst(n: usize, edges: &[(usize, usize, i64, i64)]) -> NZMatchingInstance {
    let es = edges.iter().map(|&(u, v, w, a)| WEdge::labelled(u, v, rat(w), a)).collect();
    NZMatchingInstance::new(WeightedGraph::new(n, es).unwrap()).unwrap()
}

#[test]
fn single_edge_gadget_counts() {
    let g = WeightedGraph::from_triples(2, &[(0, 1, 3)]).unwrap();
    let inst = BMatchInstance::new(BMatchingGame::new(g, vec![1, 1]).unwrap(), IntVec::from_i64s(&[1, 0]), Allocation::uniform(2, rat(1)))
        .unwrap();
    let (nzm, map) = reduce_bmatch_to_nzmatching(&inst).unwrap();
    assert_eq!((nzm.graph.n, nzm.graph.edge_count()), (10, 9));
    assert_eq!(map.k, rat(2 * (3 + 2 * 2) + 1));
    let g2 = WeightedGraph::from_triples(2, &[(0, 1, 3)]).unwrap();
    let inst2 = BMatchInstance::new(BMatchingGame::new(g2, vec![2, 2]).unwrap(), IntVec::from_i64s(&[1, 0]), Allocation::zeros(2)).unwrap();
    let (nzm2, _) = reduce_bmatch_to_nzmatching(&inst2).unwrap();
    assert_eq!((nzm2.graph.n, nzm2.graph.edge_count()), (10, 11));
}

#[test]
fn empty_edge_set_selects_labelled_vertex() {
    let g = WeightedGraph::new(3, vec![]).unwrap();
    let y = Allocation(vec![rat(5), rat(2), rat(1)]);
    let inst = BMatchInstance::new(BMatchingGame::new(g, vec![1, 2, 1]).unwrap(), IntVec::from_i64s(&[1, 1, 0]), y).unwrap();
    let (nzm, map) = reduce_bmatch_to_nzmatching(&inst).unwrap();
    let m = nzm.brute().unwrap().unwrap();
    assert_eq!(map.coalition_of(&m), Coalition::singleton(1));
    let r = bmatch_nz_min_excess(&inst, Strategy::Few2, &BMatchConfig::default()).unwrap();
    assert_eq!((r.coalition, r.excess), (Coalition::singleton(1), rat(2)));
}

#[test]
fn gadget_value_identity() {
    let mut rng = rng_from_seed(5);
    for _ in 0..30 {
        let inst = random_instance(&mut rng, 2);
        let (nzm, map) = reduce_bmatch_to_nzmatching(&inst).unwrap();
        if nzm.graph.edge_count() > 16 {
            continue;
        }
        let m = nzm.brute().unwrap().unwrap();
        let s = map.coalition_of(&m);
        let vs = inst.game.value(s);
        assert_eq!(m.weight(&nzm.graph), &map.offset + &vs - inst.y.sum_over(s));
        assert_eq!(excess(&inst.game, &inst.y, s), inst.brute().unwrap().excess);
        let used = map.bmatching_of(&m);
        assert_eq!(inst.game.graph.weight_of(&used), vs);
    }
}

#[test]
fn few2_matches_brute() {
    let mut rng = rng_from_seed(21);
    let cfg = BMatchConfig::default();
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 3);
        let want = inst.brute().unwrap();
        let got = bmatch_nz_min_excess(&inst, Strategy::Few2, &cfg).unwrap();
        assert_eq!(got.excess, want.excess, "{inst:?}");
        assert!(!inst.a.sum_over(got.coalition).is_zero());
    }
}

#[test]
fn matching_to_cycle_examples() {
    let direct = matching_inst(2, &[(0, 1, 4, 1)]);
    assert!(matches!(reduce_nzmatching_to_nzcycle(&direct).unwrap(), CycleReduction::Direct(_)));
    let two = matching_inst(4, &[(0, 1, 3, 1), (2, 3, 3, -1)]);
    let CycleReduction::Cycle(ci, map) = reduce_nzmatching_to_nzcycle(&two).unwrap() else { panic!("expected a cycle instance") };
    assert!(is_conservative(&ci.graph));
    let c = shortest_nz_cycle_exact(&ci).unwrap();
    assert_eq!(c.cost, rat(3));
    let m = map.matching_from_cycle(&c);
    assert_eq!(m.weight(&two.graph), rat(3));
    assert_ne!(m.label(&two.graph), 0);
    assert_eq!(two.brute().unwrap().unwrap().weight(&two.graph), rat(3));
}

#[test]
fn matching_to_cycle_matches_brute() {
    let mut rng = rng_from_seed(8);
    for _ in 0..150 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=7);
        let g = random_weighted_graph(&mut rng, n, m, -5..=5, -2..=2);
        let Ok(inst) = NZMatchingInstance::new(g) else { continue };
        let want = inst.brute().unwrap();
        let got = nz_matching_via_cycles(&inst, |ci| Ok(shortest_nz_cycle_exact(ci))).unwrap();
        match (&want, &got) {
            (None, None) => {}
            (Some(w), Some(g)) => {
                assert!(g.is_valid(&inst.graph) && g.label(&inst.graph) != 0);
                assert_eq!(g.weight(&inst.graph), w.weight(&inst.graph), "{inst:?}");
            }
            _ => panic!("disagreement on {inst:?}: {want:?} vs {got:?}"),
        }
    }
}

#[test]
fn cycle_to_bmatch_examples() {
    let tri = cycle_inst(3, &[(0, 1, 1, 1), (1, 2, 1, 0), (2, 0, 1, 0)]);
    let cfg = BMatchConfig::default();
    let (bm, map) = reduce_nzcycle_to_bmatch(&tri).unwrap();
    let r = bmatch_nz_min_excess(&bm, Strategy::Brute, &cfg).unwrap();
    assert_eq!(r.excess, rat(3));
    let c = map.cycle_from_coalition(&tri, &bm.game, r.coalition).unwrap().unwrap();
    assert_eq!((c.edges.clone(), c.cost.clone()), (vec![0, 1, 2], rat(3)));
    let with_pair = cycle_inst(4, &[(0, 1, 1, 1), (1, 2, 1, 0), (2, 0, 1, 0), (2, 3, 0, 0), (2, 3, 0, 0)]);
    let (bm, map) = reduce_nzcycle_to_bmatch(&with_pair).unwrap();
    let r = bmatch_nz_min_excess(&bm, Strategy::Brute, &cfg).unwrap();
    let c = map.cycle_from_coalition(&with_pair, &bm.game, r.coalition).unwrap().unwrap();
    assert_eq!((c.edges, c.cost), (vec![0, 1, 2], rat(3)));
}

#[test]
fn nonconservative_costs_rejected() {
    let g = WeightedGraph::new(3, vec![
        WEdge::labelled(0, 1, rat(-2), 1),
        WEdge::labelled(1, 2, rat(1), 0),
        WEdge::labelled(2, 0, rat(0), 0),
    ])
    .unwrap();
    assert!(matches!(NZCycleInstance::new(g), Err(Error::Invalid(_))));
}

#[test]
fn cycle_to_bmatch_matches_brute() {
    let mut rng = rng_from_seed(3);
    let cfg = BMatchConfig::default();
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=4);
        let ci = random_cycle_instance(&mut rng, n, m, -2..=4, -1..=1);
        let want = shortest_nz_cycle_bruteforce(&ci).unwrap();
        let (bm, map) = reduce_nzcycle_to_bmatch(&ci).unwrap();
        let r = bm.brute().unwrap();
        let got = if r.excess > &map.k / rat(2) { None } else { map.cycle_from_coalition(&ci, &bm.game, r.coalition).unwrap() };
        assert_eq!(got.as_ref().map(|c| &c.cost), want.as_ref().map(|c| &c.cost), "{ci:?}");
        if let Some(c) = &want {
            assert_eq!(r.excess, c.cost);
        }
        let _ = cfg;
    }
}

#[test]
fn brute_cycle_examples() {
    let forest = cycle_inst(4, &[(0, 1, 1, 1), (1, 2, 1, 1), (1, 3, 2, 0)]);
    assert_eq!(shortest_nz_cycle_bruteforce(&forest).unwrap(), None);
    assert_eq!(shortest_nz_cycle_exact(&forest), None);
    let tri = cycle_inst(3, &[(0, 1, 1, 1), (1, 2, 1, 0), (2, 0, 1, 0)]);
    assert_eq!(shortest_nz_cycle_bruteforce(&tri).unwrap().unwrap().cost, rat(3));
    assert_eq!(shortest_nz_cycle_few_nonzero(&tri, 1).unwrap().cost, rat(3));
    let two = cycle_inst(6, &[(0, 1, 1, 1), (1, 2, 1, 0), (2, 0, 1, 0), (3, 4, 0, 0), (4, 5, 1, 0), (5, 3, 0, 0)]);
    let c = shortest_nz_cycle_bruteforce(&two).unwrap().unwrap();
    assert_eq!((c.edges, c.cost), (vec![0, 1, 2], rat(3)));
    let mut par = vec![(0, 1, 1, 0); 17];
    par[0].3 = 1;
    let big = cycle_inst(2, &par);
    assert!(matches!(shortest_nz_cycle_bruteforce(&big), Err(Error::CapExceeded { .. })));
}

#[test]
fn few_nonzero_matches_brute() {
    let mut rng = rng_from_seed(17);
    for t in 0..200 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=12);
        let ci = random_cycle_instance(&mut rng, n, m, -2..=5, -2..=2);
        let want = shortest_nz_cycle_bruteforce(&ci).unwrap();
        let k = want.as_ref().map_or(0, |c| c.edges.iter().filter(|&&e| ci.graph.edges[e].a != 0).count());
        let got = shortest_nz_cycle_few_nonzero(&ci, k.max(1));
        assert_eq!(got.as_ref().map(|c| &c.cost), want.as_ref().map(|c| &c.cost), "trial {t}: {ci:?}");
        if let Some(c) = got {
            assert!(is_simple_cycle(&ci.graph, &c.edges) && c.label != 0);
        }
        assert_eq!(shortest_nz_cycle_exact(&ci).map(|c| c.cost), want.map(|c| c.cost));
    }
}

#[test]
fn conservativeness_matches_cycle_search() {
    let mut rng = rng_from_seed(4);
    for _ in 0..200 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=8);
        let g = random_weighted_graph(&mut rng, n, m, -3..=4, 1..=1);
        let min_cycle = shortest_nz_cycle_bruteforce(&NZCycleInstance { graph: g.clone() }).unwrap();
        assert_eq!(is_conservative(&g), min_cycle.is_none_or(|c| !c.cost.is_negative()), "{g:?}");
    }
}

#[test]
fn eulerian_decomposition() {
    let g = WeightedGraph::from_triples(5, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 4, 1), (4, 2, 1), (1, 1, 1)]).unwrap();
    let all: Vec<usize> = (0..7).collect();
    let cycles = decompose_eulerian(&g, &all);
    let mut seen: Vec<usize> = cycles.iter().flatten().copied().collect();
    seen.sort_unstable();
    assert_eq!(seen, all);
    assert!(cycles.iter().all(|c| is_simple_cycle(&g, c)));
    assert_eq!(cycles.len(), 3);
}

#[test]
fn randomized_examples() {
    let cfg = ExactMatchConfig::default();
    let direct = matching_inst(2, &[(0, 1, 4, 1)]);
    let m = nz_matching_randomized(&direct, 1, cfg).unwrap().unwrap();
    assert_eq!(m.edges, vec![0]);
    let two = matching_inst(4, &[(0, 1, 3, 1), (2, 3, 3, -1)]);
    let m = nz_matching_randomized(&two, 1, cfg).unwrap().unwrap();
    assert_eq!((m.weight(&two.graph), m.edges.len()), (rat(3), 1));
    let zero = WeightedGraph::from_triples(2, &[(0, 1, 1)]).unwrap();
    assert_eq!(NZMatchingInstance::new(zero), Err(Error::ZeroVector));
}

#[test]
fn randomized_matches_brute() {
    let mut rng = rng_from_seed(12);
    let cfg = ExactMatchConfig::default();
    for t in 0..60 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=7);
        let g = random_weighted_graph(&mut rng, n, m, -8..=8, -3..=3);
        let Ok(inst) = NZMatchingInstance::new(g) else { continue };
        let want = inst.brute().unwrap().map(|m| m.weight(&inst.graph));
        let got = nz_matching_randomized(&inst, t, cfg).unwrap();
        if let Some(m) = &got {
            assert!(m.is_valid(&inst.graph) && m.label(&inst.graph) != 0);
        }
        assert_eq!(got.map(|m| m.weight(&inst.graph)), want, "{inst:?}");
    }
}

#[test]
fn lsa_matches_brute() {
    let mut rng = rng_from_seed(31);
    let cfg = BMatchConfig::default();
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 2);
        let n = inst.game.graph.n;
        let rows: Vec<Coalition> = (0..rng.gen_range(0..n)).map(|_| Coalition(rng.gen_range(1..1u128 << n))).collect();
        let l = LinearSubspace::span_of_coalitions(&rows, n);
        if l.is_full() {
            continue;
        }
        let want = brute_lsa_min_excess(&inst.game, &inst.y, &l).unwrap();
        for st in [Strategy::Auto, Strategy::Few2, Strategy::Brute] {
            let got = bmatch_lsa_min_excess(&inst.game, &inst.y, &l, st, &cfg).unwrap();
            assert_eq!(got.excess, want.excess);
            assert!(!l.contains_coalition(got.coalition));
        }
    }
}

#[test]
fn full_reduction_loop_preserves_optimum() {
    let mut rng = rng_from_seed(9);
    for _ in 0..8 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=3);
        let ci = random_cycle_instance(&mut rng, n, m, 0..=3, -1..=1);
        let want = shortest_nz_cycle_bruteforce(&ci).unwrap();
        let (bm, map_c) = reduce_nzcycle_to_bmatch(&ci).unwrap();
        let (nzm, map_a) = reduce_bmatch_to_nzmatching(&bm).unwrap();
        let m = nz_matching_via_cycles(&nzm, |c2| Ok(shortest_nz_cycle_exact(c2))).unwrap().unwrap();
        let s = map_a.coalition_of(&m);
        let ex = excess(&bm.game, &bm.y, s);
        let got = if ex > &map_c.k / rat(2) { None } else { map_c.cycle_from_coalition(&ci, &bm.game, s).unwrap() };
        assert_eq!(got.map(|c| c.cost), want.map(|c| c.cost), "{ci:?}");
    }
}

#[test]
fn randomized_strategy_on_small_gadgets() {
    let mut rng = rng_from_seed(44);
    let cfg = BMatchConfig::default();
    let mut solved = 0;
    for _ in 0..40 {
        let n = rng.gen_range(1..=2);
        let m = if n == 2 { rng.gen_range(0..=1) } else { 0 };
        let game = random_bmatch_game(&mut rng, n, m, 1, -2..=2);
        let a = IntVec::from_i64s(&(0..n).map(|i| if i == 0 { 1 } else { rng.gen_range(-1..=1) }).collect::<Vec<_>>());
        let y = Allocation((0..n).map(|_| rat(rng.gen_range(0..=1))).collect());
        let inst = BMatchInstance::new(game, a, y).unwrap();
        match bmatch_nz_min_excess(&inst, Strategy::Randomized, &cfg) {
            Ok(r) => {
                solved += 1;
                assert_eq!(r.excess, inst.brute().unwrap().excess);
            }
            Err(Error::BoundExceeded(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    eprintln!("randomized strategy solved {solved}/40 small gadget instances");
    assert!(solved > 0);
}

