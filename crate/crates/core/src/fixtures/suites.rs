//! Seeded brute-force cross-check suites shared by `selftest` and the acceptance tests.

use std::cell::Cell;

use num_traits::Zero;
use rand::Rng;

use crate::bmatch_nz::{
    bmatch_lsa_min_excess, nz_matching_randomized, nz_matching_via_cycles, reduce_bmatch_to_nzmatching,
    reduce_nzcycle_to_bmatch, reduce_nzmatching_to_nzcycle, shortest_nz_cycle_bruteforce, shortest_nz_cycle_exact,
    shortest_nz_cycle_few_nonzero, BMatchConfig, BMatchInstance, CycleReduction, NZMatchingInstance, Strategy,
};
use crate::coalition::Coalition;
use crate::error::Result;
use crate::exact_math::{integer_kernel_basis, IntVec, LinearSubspace, Rat};
use crate::game::{
    brute_lsa_min_excess, brute_nz_min_excess, enum_cap, excess, Allocation, GameKind, GameOracle, TableGame,
};
use crate::graph::Graph;
use crate::matching::{is_conservative, ExactMatchConfig, WeightedGraph};
use crate::matroid::{
    arboricity_nz_min_excess, graphic_is_independent, network_strength_nz_min_excess, nz_max_weight_basis,
    ArboricityGame, GraphicMatroid, NetworkStrengthGame,
};
use crate::mps::{mps_nucleolus, reference_nucleolus, BruteLsa, MpsMode};
use crate::nz_reductions::{lsa_approx, lsa_to_nz, ExactMinExcess, LSAInstance, ViaNonZero};

use super::{
    gen_instability_pair, instability_closed_forms, random_bmatch_game, random_cycle_instance, random_graph_with,
    random_monotone_game, random_rat, random_weighted_graph, rng_from_seed, verify_instability_balance, Check,
    InstabilityParams, Report,
};

/// Mismatches recorded individually before only the count is kept.
const MAX_LISTED: usize = 5;

struct Tally {
    report: Report,
    ok: usize,
    total: usize,
}

impl Tally {
    fn new(name: &str) -> Tally {
        Tally { report: Report::new(name), ok: 0, total: 0 }
    }

    fn record(&mut self, label: impl FnOnce() -> String, pass: bool, lhs: impl std::fmt::Display, rhs: impl std::fmt::Display) {
        self.total += 1;
        if pass {
            self.ok += 1;
        } else if self.total - self.ok <= MAX_LISTED {
            self.report.push(Check::holds(label(), false, lhs, rhs));
        }
    }

    fn finish(mut self, what: &str) -> Report {
        self.report.push(Check::holds(what, self.ok == self.total, self.ok, self.total));
        self.report
    }
}

fn random_subspace(rng: &mut impl Rng, n: usize) -> LinearSubspace {
    loop {
        let d = rng.gen_range(0..n.max(1));
        let rows: Vec<Vec<Rat>> = (0..d).map(|_| (0..n).map(|_| Rat::from_int(rng.gen_range(-2..=2))).collect()).collect();
        let l = LinearSubspace::span_of(rows, n).expect("rows have the ambient length");
        if !l.is_full() {
            return l;
        }
    }
}

fn random_allocation(rng: &mut impl Rng, n: usize, num: std::ops::RangeInclusive<i64>) -> Allocation {
    Allocation((0..n).map(|_| random_rat(rng, num.clone(), 4)).collect())
}

/// Minimum over the NZ instances of `lsa_to_nz` against direct LSA enumeration.
pub fn nz_equivalence_suite(seed: u64, count: usize) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("nz_equivalence");
    for i in 0..count {
        let n = rng.gen_range(1..=8);
        let g = random_monotone_game(n, rng.gen())?;
        let y = random_allocation(&mut rng, n, -8..=16);
        let l = random_subspace(&mut rng, n);
        let want = brute_lsa_min_excess(&g, &y, &l)?;
        let inst = LSAInstance::new(&g, y.clone(), l.clone())?;
        let mut got: Option<Rat> = None;
        for nz in lsa_to_nz(&inst)? {
            let r = brute_nz_min_excess(&g, &y, &nz.a)?;
            got = Some(got.map_or(r.excess.clone(), |b| b.min(r.excess)));
        }
        let got = got.expect("a proper subspace has a non-empty kernel");
        t.record(|| format!("instance {i} (n={n}, dim={})", l.dim()), got == want.excess, &got, &want.excess);
    }
    Ok(t.finish("min over NZ instances equals LSA optimum"))
}

/// Game made symmetric in players 0 and 1 by taking the pointwise maximum with its swap.
fn symmetrize(g: &TableGame) -> Result<TableGame> {
    let swap = |s: Coalition| {
        let (a, b) = (s.contains(0), s.contains(1));
        let mut t = s.difference(Coalition::from_members([0, 1]));
        if a {
            t = t.insert(1);
        }
        if b {
            t = t.insert(0);
        }
        t
    };
    TableGame::from_fn(g.player_count(), GameKind::Value, |s| g.value(s).max(g.value(swap(s))))
}

/// Adds a last player contributing exactly `d` to every coalition.
fn with_dummy(g: &TableGame, d: Rat) -> Result<TableGame> {
    let n = g.player_count();
    TableGame::from_fn(n + 1, GameKind::Value, |s| {
        if s.contains(n) {
            g.value(s.difference(Coalition::singleton(n))) + &d
        } else {
            g.value(s)
        }
    })
}

fn symmetric_pairs(g: &TableGame) -> Vec<(usize, usize)> {
    let n = g.player_count();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let both = Coalition::from_members([i, j]);
            let sym = (0..1u128 << n)
                .map(Coalition)
                .filter(|s| s.intersection(both).is_empty())
                .all(|s| g.value(s.insert(i)) == g.value(s.insert(j)));
            if sym {
                out.push((i, j));
            }
        }
    }
    out
}

fn dummies(g: &TableGame) -> Vec<usize> {
    let n = g.player_count();
    (0..n)
        .filter(|&i| {
            let vi = g.value(Coalition::singleton(i));
            (0..1u128 << n).map(Coalition).filter(|s| !s.contains(i)).all(|s| g.value(s.insert(i)) == g.value(s) + &vi)
        })
        .collect()
}

/// Both MPS modes against the reference nucleolus, plus symmetry and dummy checks.
pub fn mps_suite(seed: u64, count: usize) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("mps");
    let (mut sym_ok, mut sym_total, mut dummy_ok, mut dummy_total) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..count {
        let n = rng.gen_range(1..=6);
        let base = random_monotone_game(n, rng.gen())?;
        let g = match i % 3 {
            1 if n >= 2 => symmetrize(&base)?,
            2 if n >= 2 => with_dummy(&random_monotone_game(n - 1, rng.gen())?, random_rat(&mut rng, 0..=4, 2))?,
            _ => base,
        };
        let want = reference_nucleolus(&g)?.allocation;
        let en = mps_nucleolus(&g, MpsMode::Enumerate)?.allocation;
        let solver = BruteLsa { game: &g };
        let or = mps_nucleolus(&g, MpsMode::Oracle(&solver))?.allocation;
        t.record(|| format!("instance {i} enumerate (n={})", g.player_count()), en == want, fmt_alloc(&en), fmt_alloc(&want));
        t.record(|| format!("instance {i} oracle (n={})", g.player_count()), or == want, fmt_alloc(&or), fmt_alloc(&want));
        for (a, b) in symmetric_pairs(&g) {
            sym_total += 1;
            sym_ok += usize::from(en.get(a) == en.get(b));
        }
        for d in dummies(&g) {
            dummy_total += 1;
            dummy_ok += usize::from(*en.get(d) == g.value(Coalition::singleton(d)));
        }
    }
    let mut r = t.finish("nucleolus agrees with reference (both modes)");
    r.push(Check::holds("symmetric players paid equally", sym_ok == sym_total && sym_total > 0, sym_ok, sym_total));
    r.push(Check::holds("dummy players paid v({i})", dummy_ok == dummy_total && dummy_total > 0, dummy_ok, dummy_total));
    Ok(r)
}

fn fmt_alloc(y: &Allocation) -> String {
    let parts: Vec<String> = y.0.iter().map(Rat::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn random_bmatch_instance(rng: &mut impl Rng, max_b2: usize) -> Result<BMatchInstance> {
    let n = rng.gen_range(1..=5);
    let m = if n < 2 { 0 } else { rng.gen_range(0..=6) };
    let game = random_bmatch_game(rng, n, m, max_b2, -5..=5);
    let mut a: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    if a.iter().all(|&x| x == 0) {
        a[rng.gen_range(0..n)] = 1;
    }
    let y = random_allocation(rng, n, -6..=6);
    BMatchInstance::new(game, IntVec::from_i64s(&a), y)
}

/// b-matching NZ optimum through the matching and cycle gadgets, and the cycle round trip.
pub fn reduction_chain_suite(seed: u64, count: usize, loops: usize) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("reduction_chain");
    let (cons_ok, cons_total) = (Cell::new(0usize), Cell::new(0usize));
    for i in 0..count {
        let inst = random_bmatch_instance(&mut rng, 5)?;
        let want = brute_nz_min_excess(&inst.game, &inst.y, &inst.a)?;
        let (nzm, map) = reduce_bmatch_to_nzmatching(&inst)?;
        let m = nz_matching_via_cycles(&nzm, |ci| {
            cons_total.set(cons_total.get() + 1);
            cons_ok.set(cons_ok.get() + usize::from(is_conservative(&ci.graph)));
            Ok(shortest_nz_cycle_exact(ci))
        })?;
        let got = m.map(|m| {
            let s = map.coalition_of(&m);
            (s, excess(&inst.game, &inst.y, s))
        });
        let pass = matches!(&got, Some((s, ex)) if *ex == want.excess && !inst.a.sum_over(*s).is_zero());
        let shown = got.map_or("none".to_string(), |(_, ex)| ex.to_string());
        t.record(|| format!("b-matching instance {i}"), pass, shown, &want.excess);
    }
    let mut lt = Tally::new("cycle_loop");
    for i in 0..loops {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=3);
        let ci = random_cycle_instance(&mut rng, n, m, 0..=3, -1..=1);
        let want = shortest_nz_cycle_bruteforce(&ci)?;
        let (bm, map_c) = reduce_nzcycle_to_bmatch(&ci)?;
        let (nzm, map_a) = reduce_bmatch_to_nzmatching(&bm)?;
        let m = nz_matching_via_cycles(&nzm, |c2| {
            cons_total.set(cons_total.get() + 1);
            cons_ok.set(cons_ok.get() + usize::from(is_conservative(&c2.graph)));
            Ok(shortest_nz_cycle_exact(c2))
        })?;
        let got = match m {
            None => None,
            Some(m) => {
                let s = map_a.coalition_of(&m);
                if excess(&bm.game, &bm.y, s) > &map_c.k / Rat::from_int(2) {
                    None
                } else {
                    map_c.cycle_from_coalition(&ci, &bm.game, s)?
                }
            }
        };
        let (g, w) = (got.map(|c| c.cost), want.map(|c| c.cost));
        lt.record(|| format!("cycle instance {i}"), g == w, fmt_opt(&g), fmt_opt(&w));
    }
    let mut r = t.finish("gadget optimum equals brute force");
    let lr = lt.finish("cycle round trip preserves the optimum");
    r.checks.extend(lr.checks);
    let (ok, total) = (cons_ok.get(), cons_total.get());
    r.push(Check::holds("produced cycle instances are conservative", ok == total, ok, total));
    Ok(r)
}

fn fmt_opt(x: &Option<Rat>) -> String {
    x.as_ref().map_or("none".to_string(), Rat::to_string)
}

/// Every b(v) = 1 gadget keeps its non-zero edge behind a degree-one vertex.
fn dead_ends_hold(inst: &BMatchInstance, g: &WeightedGraph) -> bool {
    let all: Vec<usize> = (0..g.edge_count()).collect();
    let deg = g.degrees(&all);
    (0..inst.game.graph.n).filter(|&v| inst.game.b[v] == 1).all(|v| deg[4 * v + 2] == 1)
}

/// Few-b=2 strategy against brute force, with the promise checked on each produced instance.
pub fn few2_suite(seed: u64, count: usize) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let cfg = BMatchConfig::default();
    let mut t = Tally::new("few2");
    let mut promise = Tally::new("promise");
    for i in 0..count {
        let inst = random_bmatch_instance(&mut rng, 3)?;
        let n = inst.game.graph.n;
        let l = random_subspace(&mut rng, n);
        let want = brute_lsa_min_excess(&inst.game, &inst.y, &l)?;
        let got = bmatch_lsa_min_excess(&inst.game, &inst.y, &l, Strategy::Few2, &cfg)?;
        let pass = got.excess == want.excess && !l.contains_coalition(got.coalition);
        t.record(|| format!("instance {i} (b2={})", inst.game.b2_count()), pass, &got.excess, &want.excess);
        let k = inst.game.b2_count() + 2;
        for a in integer_kernel_basis(&l)? {
            let sub = BMatchInstance::new(inst.game.clone(), a, inst.y.clone())?;
            let (nzm, _) = reduce_bmatch_to_nzmatching(&sub)?;
            let structural = dead_ends_hold(&sub, &nzm.graph);
            let bounded = match reduce_nzmatching_to_nzcycle(&nzm)? {
                CycleReduction::Direct(_) => true,
                CycleReduction::Cycle(ci, _) => {
                    shortest_nz_cycle_few_nonzero(&ci, k).map(|c| c.cost) == shortest_nz_cycle_exact(&ci).map(|c| c.cost)
                }
            };
            promise.record(|| format!("instance {i} kernel vector"), structural && bounded, structural, bounded);
        }
    }
    let mut r = t.finish("few2 equals brute force");
    r.checks.extend(promise.finish("promise bound holds").checks);
    Ok(r)
}

/// Randomized NZ matching against brute force; every returned matching is verified.
pub fn randomized_suite(seed: u64, count: usize) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let cfg = ExactMatchConfig::default();
    let mut r = Report::new("randomized");
    let (mut agree, mut total, mut verified, mut returned) = (0usize, 0usize, 0usize, 0usize);
    let mut trial = 0u64;
    while total < count {
        trial += 1;
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(1..=7);
        let g = random_weighted_graph(&mut rng, n, m, -8..=8, -3..=3);
        let Ok(inst) = NZMatchingInstance::new(g) else { continue };
        total += 1;
        let want = inst.brute()?.map(|m| m.weight(&inst.graph));
        let got = nz_matching_randomized(&inst, seed ^ trial, cfg)?;
        if let Some(m) = &got {
            returned += 1;
            verified += usize::from(m.is_valid(&inst.graph) && m.label(&inst.graph) != 0);
        }
        agree += usize::from(got.map(|m| m.weight(&inst.graph)) == want);
    }
    r.push(Check::holds("agreement with brute force (at least 99%)", agree * 100 >= total * 99, agree, total));
    r.push(Check::holds("returned matchings feasible and non-zero", verified == returned, verified, returned));
    Ok(r)
}

fn brute_nz_basis(g: &Graph, w: &[Rat], a: &IntVec) -> Option<Rat> {
    let m = g.edge_count();
    let sets: Vec<Vec<bool>> = (0..1u32 << m).map(|b| (0..m).map(|e| b >> e & 1 == 1).collect()).collect();
    let indep: Vec<&Vec<bool>> = sets.iter().filter(|s| graphic_is_independent(g, s)).collect();
    let rank = indep.iter().map(|s| s.iter().filter(|&&x| x).count()).max().unwrap_or(0);
    indep
        .into_iter()
        .filter(|s| s.iter().filter(|&&x| x).count() == rank)
        .filter(|s| !(0..m).filter(|&e| s[e]).map(|e| a.get(e).clone()).sum::<num_bigint::BigInt>().is_zero())
        .map(|s| (0..m).filter(|&e| s[e]).map(|e| w[e].clone()).sum::<Rat>())
        .max()
}

fn random_nonzero_a(rng: &mut impl Rng, m: usize) -> IntVec {
    let mut a: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
    if a.iter().all(|&x| x == 0) {
        a[rng.gen_range(0..m)] = 1;
    }
    IntVec::from_i64s(&a)
}

/// Arboricity and network-strength solvers, NZ bases, and oracle-mode nucleoli.
pub fn matroid_suite(seed: u64, solvers: usize, bases: usize, nucleoli: usize) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("matroid_solvers");
    for i in 0..solvers {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=6);
        let g = random_graph_with(&mut rng, n, m)?;
        let y = random_allocation(&mut rng, m, -4..=8);
        let a = random_nonzero_a(&mut rng, m);
        let ag = ArboricityGame::new(g.clone())?;
        let (got, want) = (arboricity_nz_min_excess(&ag, &y, &a)?, brute_nz_min_excess(&ag, &y, &a)?);
        t.record(|| format!("arboricity graph {i}"), got.excess == want.excess, &got.excess, &want.excess);
        let ng = NetworkStrengthGame::new(g)?;
        let (got, want) = (network_strength_nz_min_excess(&ng, &y, &a)?, brute_nz_min_excess(&ng, &y, &a)?);
        t.record(|| format!("network strength graph {i}"), got.excess == want.excess, &got.excess, &want.excess);
    }
    let mut r = t.finish("NZ min-excess solvers equal brute force");
    let mut bt = Tally::new("nz_basis");
    for i in 0..bases {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=8);
        let g = random_graph_with(&mut rng, n, m)?;
        let w: Vec<Rat> = (0..m).map(|_| random_rat(&mut rng, -5..=5, 2)).collect();
        let a = random_nonzero_a(&mut rng, m);
        let got = nz_max_weight_basis(&GraphicMatroid(&g), &w, &a).map(|b| b.weight);
        let want = brute_nz_basis(&g, &w, &a);
        bt.record(|| format!("graphic matroid {i}"), got == want, fmt_opt(&got), fmt_opt(&want));
    }
    r.checks.extend(bt.finish("NZ max-weight basis equals brute force").checks);
    let mut nt = Tally::new("matroid_nucleoli");
    for i in 0..nucleoli {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=5);
        let g = random_graph_with(&mut rng, n, m)?;
        let ag = ArboricityGame::new(g.clone())?;
        let solver = ViaNonZero { solve: |y: &Allocation, a: &IntVec| arboricity_nz_min_excess(&ag, y, a) };
        let (got, want) = (mps_nucleolus(&ag, MpsMode::Oracle(&solver))?.allocation, reference_nucleolus(&ag)?.allocation);
        nt.record(|| format!("arboricity nucleolus {i}"), got == want, fmt_alloc(&got), fmt_alloc(&want));
        let ng = NetworkStrengthGame::new(g)?;
        let solver = ViaNonZero { solve: |y: &Allocation, a: &IntVec| network_strength_nz_min_excess(&ng, y, a) };
        let (got, want) = (mps_nucleolus(&ng, MpsMode::Oracle(&solver))?.allocation, reference_nucleolus(&ng)?.allocation);
        nt.record(|| format!("network strength nucleolus {i}"), got == want, fmt_alloc(&got), fmt_alloc(&want));
    }
    r.checks.extend(nt.finish("oracle-mode nucleolus equals reference").checks);
    Ok(r)
}

/// The approximation bound of `lsa_approx` with the exact oracle against the LSA optimum.
pub fn lsa_approx_suite(seed: u64, count: usize, eps: &[Rat]) -> Result<Report> {
    let mut rng = rng_from_seed(seed);
    let mut t = Tally::new("lsa_approx");
    let mut done = 0;
    while done < count {
        let n = rng.gen_range(1..=7);
        let g = random_monotone_game(n, rng.gen())?;
        let y = random_allocation(&mut rng, n, 0..=12);
        let l = random_subspace(&mut rng, n);
        if crate::nz_reductions::free_players(&l).is_empty() {
            continue;
        }
        done += 1;
        let opt = brute_lsa_min_excess(&g, &y, &l)?;
        let (ys, vs) = (y.sum_over(opt.coalition), g.value(opt.coalition));
        let inst = LSAInstance::new(&g, y.clone(), l.clone())?;
        for e in eps {
            let s = lsa_approx(&ExactMinExcess, e, &inst)?;
            let cost = s.cost(&y);
            let bound = (Rat::one() + e) * &ys - &vs;
            let feasible = !l.contains_coalition(s.coalition) && s.lower_value_bound <= g.value(s.coalition);
            t.record(|| format!("game {done} eps {e}"), feasible && cost <= bound, &cost, &bound);
        }
    }
    Ok(t.finish("y(S) - lambda within (1+eps) y(S*) - v(S*)"))
}

/// Outcome of the instability experiment.
#[derive(Clone, Debug)]
pub struct InstabilityOutcome {
    pub closed: (Allocation, Allocation),
    pub nucleoli: Option<(Allocation, Allocation)>,
    pub report: Report,
}

/// Ledger verification, and full MPS on both games when within the enumeration cap.
pub fn instability_experiment(p: &InstabilityParams) -> Result<InstabilityOutcome> {
    let closed = instability_closed_forms(p);
    let mut report = verify_instability_balance(p)?;
    report.experiment = "instability".into();
    let mut nucleoli = None;
    if p.player_count() <= enum_cap() {
        let (v, vt) = gen_instability_pair(p)?;
        let y = mps_nucleolus(&v, MpsMode::Enumerate)?.allocation;
        let yt = mps_nucleolus(&vt, MpsMode::Enumerate)?.allocation;
        report.push(Check::holds("nucleolus of v equals closed form", y == closed.0, fmt_alloc(&y), fmt_alloc(&closed.0)));
        report.push(Check::holds("nucleolus of v~ equals closed form", yt == closed.1, fmt_alloc(&yt), fmt_alloc(&closed.1)));
        let top = p.p(p.levels(), 1);
        let diff = (y.get(top) - yt.get(top)).abs();
        let expect = &p.eps * Rat::from_bigint(num_bigint::BigInt::from(1) << p.n);
        report.push(Check::equal("nucleolus top-level difference", &diff, &expect));
        nucleoli = Some((y, yt));
    }
    Ok(InstabilityOutcome { closed, nucleoli, report })
}

/// Reduced-size run of every suite.
pub fn selftest(seed: u64) -> Result<Vec<Report>> {
    let mut rng = rng_from_seed(seed);
    let mut s = || rng.gen::<u64>();
    Ok(vec![
        nz_equivalence_suite(s(), 20)?,
        mps_suite(s(), 12)?,
        reduction_chain_suite(s(), 10, 2)?,
        few2_suite(s(), 15)?,
        randomized_suite(s(), 10)?,
        matroid_suite(s(), 20, 40, 3)?,
        lsa_approx_suite(s(), 20, &[Rat::new(1, 2), Rat::new(1, 4)])?,
    ])
}
