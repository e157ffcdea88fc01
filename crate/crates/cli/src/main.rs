use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nucnz::bmatch_nz::{
    bmatch_lsa_min_excess, bmatch_nz_min_excess, reduce_bmatch_to_nzmatching, reduce_nzcycle_to_bmatch,
    reduce_nzmatching_to_nzcycle, BMatchConfig, BMatchInstance, CycleReduction, Strategy,
};
use nucnz::fixtures::{
    hardness_adversary_check, instability_experiment, selftest, HardnessParams, InstabilityParams, Report,
};
use nucnz::game::{brute_nz_min_excess, enum_cap, excess};
use nucnz::io::{
    bmatch_instance_json, error_json, labelled_graph_json, parse_allocation, parse_game_file, parse_int_vec,
    parse_reduction_input, parse_subspace, GameFile, GameSpec, ReductionInput, ReductionKind,
};
use nucnz::matroid::{arboricity_nz_min_excess, network_strength_nz_min_excess};
use nucnz::mps::{least_core, mps_nucleolus, IterationRecord, MpsMode};
use nucnz::nz_reductions::{lsa_approx, ExactMinExcess, LSAInstance};
use nucnz::{Allocation, Coalition, Error, ExcessReport, GameOracle, IntVec, LinearSubspace, Rat, Result};

#[derive(Parser)]
#[command(name = "nucnz", version, about = "Exact nucleolus and non-zero min-excess tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nucleolus by the MPS scheme.
    Solve {
        game: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Write the per-level trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Least-core value and an allocation attaining it.
    LeastCore {
        game: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Minimum excess, optionally over a(S) != 0 or outside a subspace.
    MinExcess {
        game: PathBuf,
        /// Allocation file, inline {"y": [...]} or comma-separated rationals.
        #[arg(long)]
        y: String,
        /// Integer vector a, inline or as a file.
        #[arg(long, conflicts_with = "subspace")]
        a: Option<String>,
        /// Subspace file {"basis": [[...], ...]}.
        #[arg(long)]
        subspace: Option<PathBuf>,
        /// b-matching strategy: auto, few2, randomized or brute.
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply one of the gadget reductions.
    Reduce {
        /// a2m, m2c or c2b.
        kind: String,
        file: PathBuf,
    },
    /// Approximate LSA min-excess with the exact min-excess oracle.
    Approx {
        game: PathBuf,
        #[arg(long)]
        eps: Rat,
        #[arg(long)]
        y: String,
        #[arg(long)]
        subspace: Option<PathBuf>,
    },
    /// Reproduce one of the explicit game families.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
    /// Seeded brute-force cross-checks of every solver.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Two close packing games with far-apart nucleoli.
    Instability {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: Rat,
        #[arg(long = "K")]
        k: Rat,
    },
    /// Adversarial NZ min-excess family.
    Hardness {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Enumerate,
    Oracle,
}

/// A run that completed but whose checks failed.
struct ChecksFailed(usize, usize);

enum Failure {
    Error(Error),
    Checks(ChecksFailed),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<GameFile> {
    parse_game_file(&read(path)?)
}

/// File path, inline JSON object, or comma-separated rationals.
fn load_allocation(arg: &str, n: usize) -> Result<Allocation> {
    let p = Path::new(arg);
    let text = if p.is_file() { read(p)? } else { arg.to_owned() };
    if text.trim_start().starts_with('{') {
        return parse_allocation(&text, Some(n));
    }
    let y = text.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<Rat>>>()?;
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    Ok(Allocation(y))
}

fn load_int_vec(arg: &str, n: usize) -> Result<IntVec> {
    let p = Path::new(arg);
    let a = if p.is_file() { parse_int_vec(&read(p)?)? } else { parse_int_vec(arg)? };
    if a.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.len() });
    }
    Ok(a)
}

fn members(s: Coalition) -> Vec<usize> {
    s.members().collect()
}

fn rats(y: &Allocation) -> Vec<String> {
    y.0.iter().map(Rat::to_string).collect()
}

fn report_json(r: &Report) -> Value {
    json!({"experiment": r.experiment, "pass": r.pass(), "checks": r.checks})
}

fn gate(reports: &[&Report]) -> std::result::Result<(), Failure> {
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failed: usize = reports.iter().map(|r| r.failures().len()).sum();
    if failed > 0 {
        return Err(Failure::Checks(ChecksFailed(failed, total)));
    }
    Ok(())
}

fn trace_json(trace: &[IterationRecord]) -> Value {
    let levels: Vec<Value> = trace
        .iter()
        .map(|t| {
            json!({
                "xi": t.xi,
                "fixed": t.fixed.iter().map(|&c| members(c)).collect::<Vec<_>>(),
                "duals": t.duals.iter().map(|d| json!({"coalition": members(d.coalition), "value": d.value})).collect::<Vec<_>>(),
                "cuts": t.cuts,
            })
        })
        .collect();
    json!({ "levels": levels })
}

fn resolve_mode(file: &GameFile, mode: Option<Mode>) -> Mode {
    mode.unwrap_or(if file.player_count() <= enum_cap() { Mode::Enumerate } else { Mode::Oracle })
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Enumerate => "enumerate",
        Mode::Oracle => "oracle",
    }
}

fn cmd_solve(path: &Path, mode: Option<Mode>, trace: Option<&Path>) -> Result<Value> {
    let file = load_game(path)?;
    let mode = resolve_mode(&file, mode);
    let cfg = BMatchConfig::default();
    let solver = file.lsa_solver(&cfg);
    let res = match mode {
        Mode::Enumerate => mps_nucleolus(&file, MpsMode::Enumerate)?,
        Mode::Oracle => mps_nucleolus(&file, MpsMode::Oracle(solver.as_ref()))?,
    };
    if let Some(out) = trace {
        let text = serde_json::to_string_pretty(&trace_json(&res.trace)).expect("plain json");
        std::fs::write(out, text).map_err(|e| Error::Invalid(format!("{}: {e}", out.display())))?;
    }
    Ok(json!({
        "allocation": rats(&res.allocation),
        "players": file.players,
        "kind": file.kind(),
        "mode": mode_name(mode),
        "levels": res.trace.iter().map(|t| t.xi.to_string()).collect::<Vec<_>>(),
    }))
}

fn cmd_least_core(path: &Path, mode: Option<Mode>) -> Result<Value> {
    let file = load_game(path)?;
    let mode = resolve_mode(&file, mode);
    let cfg = BMatchConfig::default();
    let solver = file.lsa_solver(&cfg);
    let (xi, y) = match mode {
        Mode::Enumerate => least_core(&file, MpsMode::Enumerate)?,
        Mode::Oracle => least_core(&file, MpsMode::Oracle(solver.as_ref()))?,
    };
    Ok(json!({"xi": xi, "allocation": rats(&y), "players": file.players, "mode": mode_name(mode)}))
}

fn bmatch_cfg(seed: u64) -> BMatchConfig {
    BMatchConfig { seed, ..BMatchConfig::default() }
}

struct MinExcessArgs<'a> {
    y: &'a str,
    a: Option<&'a str>,
    subspace: Option<&'a Path>,
    strategy: Option<&'a str>,
    seed: u64,
}

fn cmd_min_excess(path: &Path, args: MinExcessArgs<'_>) -> Result<Value> {
    let file = load_game(path)?;
    let n = file.player_count();
    let y = load_allocation(args.y, n)?;
    let strategy = match (args.strategy, &file.game) {
        (None, _) => Strategy::Auto,
        (Some(s), GameSpec::BMatching(_)) => s.parse()?,
        (Some(_), _) => return Err(Error::Invalid("--strategy applies to bmatching games only".into())),
    };
    let cfg = bmatch_cfg(args.seed);
    let (problem, rep) = if let Some(a) = args.a {
        let a = load_int_vec(a, n)?;
        let rep = match &file.game {
            GameSpec::BMatching(g) => bmatch_nz_min_excess(&BMatchInstance::new(g.clone(), a, y.clone())?, strategy, &cfg)?,
            GameSpec::Arboricity(g) => arboricity_nz_min_excess(g, &y, &a)?,
            GameSpec::NetworkStrength(g) => network_strength_nz_min_excess(g, &y, &a)?,
            GameSpec::Table(_) | GameSpec::Packing(_) => brute_nz_min_excess(&file, &y, &a)?,
        };
        ("nz", rep)
    } else {
        let (problem, l) = match args.subspace {
            Some(p) => ("lsa", parse_subspace(&read(p)?, n)?),
            None => ("plain", LinearSubspace::span_of(Vec::new(), n)?),
        };
        let rep = match &file.game {
            GameSpec::BMatching(g) => bmatch_lsa_min_excess(g, &y, &l, strategy, &cfg)?,
            _ => file.lsa_solver(&cfg).min_excess_avoiding(&y, &l)?,
        };
        let rep = if problem == "plain" && !rep.excess.is_negative() {
            ExcessReport { coalition: Coalition::EMPTY, excess: excess(&file, &y, Coalition::EMPTY) }
        } else {
            rep
        };
        (problem, rep)
    };
    Ok(json!({
        "problem": problem,
        "coalition": members(rep.coalition),
        "members": rep.coalition.members().map(|i| file.players[i].clone()).collect::<Vec<_>>(),
        "excess": rep.excess,
    }))
}

fn cmd_reduce(kind: &str, path: &Path) -> Result<Value> {
    let kind: ReductionKind = kind.parse()?;
    let out = match parse_reduction_input(kind, &read(path)?)? {
        ReductionInput::BMatch(inst) => {
            let (nzm, map) = reduce_bmatch_to_nzmatching(&inst)?;
            json!({"reduction": "a2m", "instance": labelled_graph_json(&nzm.graph), "gadget_map": map})
        }
        ReductionInput::Matching(inst) => match reduce_nzmatching_to_nzcycle(&inst)? {
            CycleReduction::Direct(m) => json!({"reduction": "m2c", "direct": {"matching": m.edges, "weight": m.weight(&inst.graph)}}),
            CycleReduction::Cycle(ci, map) => {
                json!({"reduction": "m2c", "instance": labelled_graph_json(&ci.graph), "gadget_map": map})
            }
        },
        ReductionInput::Cycle(inst) => {
            let (bm, map) = reduce_nzcycle_to_bmatch(&inst)?;
            json!({"reduction": "c2b", "instance": bmatch_instance_json(&bm)?, "gadget_map": map})
        }
    };
    Ok(out)
}

fn cmd_approx(path: &Path, eps: &Rat, y: &str, subspace: Option<&Path>) -> Result<Value> {
    let file = load_game(path)?;
    let n = file.player_count();
    let y = load_allocation(y, n)?;
    let l = match subspace {
        Some(p) => parse_subspace(&read(p)?, n)?,
        None => LinearSubspace::span_of(Vec::new(), n)?,
    };
    let inst = LSAInstance::new(&file, y.clone(), l)?;
    let s = lsa_approx(&ExactMinExcess, eps, &inst)?;
    Ok(json!({
        "coalition": members(s.coalition),
        "lower_value_bound": s.lower_value_bound,
        "cost": s.cost(&y),
        "excess": excess(&file, &y, s.coalition),
        "eps": eps,
    }))
}

fn cmd_instability(n: usize, eps: Rat, k: Rat) -> std::result::Result<Value, (Value, Failure)> {
    let run = || -> Result<(Value, Report)> {
        let p = InstabilityParams::new(n, eps, k)?;
        let exp = instability_experiment(&p)?;
        let (y, yt) = exp.nucleoli.as_ref().unwrap_or(&exp.closed);
        let diffs: Vec<String> = y.0.iter().zip(&yt.0).map(|(a, b)| (a - b).to_string()).collect();
        let top = p.p(p.levels(), 1);
        let out = json!({
            "params": p,
            "players": p.player_count(),
            "mps": if exp.nucleoli.is_some() { "enumerate" } else { "skipped: players above the enumeration cap" },
            "nucleolus": exp.nucleoli.as_ref().map(|(a, _)| rats(a)),
            "nucleolus_tilde": exp.nucleoli.as_ref().map(|(_, b)| rats(b)),
            "closed_form": rats(&exp.closed.0),
            "closed_form_tilde": rats(&exp.closed.1),
            "differences": diffs,
            "top_level_difference": (y.get(top) - yt.get(top)).abs(),
            "pass": exp.report.pass(),
            "checks": exp.report.checks,
        });
        Ok((out, exp.report))
    };
    match run() {
        Ok((out, rep)) => match gate(&[&rep]) {
            Ok(()) => Ok(out),
            Err(f) => Err((out, f)),
        },
        Err(e) => Err((Value::Null, Failure::Error(e))),
    }
}

fn with_report(r: Result<Report>) -> std::result::Result<Value, (Value, Failure)> {
    match r {
        Ok(rep) => {
            let out = report_json(&rep);
            gate(&[&rep]).map(|_| out.clone()).map_err(|f| (out, f))
        }
        Err(e) => Err((Value::Null, Failure::Error(e))),
    }
}

fn cmd_selftest(seed: u64) -> std::result::Result<Value, (Value, Failure)> {
    let reports = selftest(seed).map_err(|e| (Value::Null, Failure::Error(e)))?;
    let refs: Vec<&Report> = reports.iter().collect();
    let out = json!({
        "seed": seed,
        "pass": reports.iter().all(Report::pass),
        "suites": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    gate(&refs).map(|_| out.clone()).map_err(|f| (out, f))
}

fn run(cli: Cli) -> std::result::Result<Value, (Value, Failure)> {
    let plain = |r: Result<Value>| r.map_err(|e| (Value::Null, Failure::Error(e)));
    match cli.command {
        Command::Solve { game, mode, trace } => plain(cmd_solve(&game, mode, trace.as_deref())),
        Command::LeastCore { game, mode } => plain(cmd_least_core(&game, mode)),
        Command::MinExcess { game, y, a, subspace, strategy, seed } => plain(cmd_min_excess(
            &game,
            MinExcessArgs { y: &y, a: a.as_deref(), subspace: subspace.as_deref(), strategy: strategy.as_deref(), seed },
        )),
        Command::Reduce { kind, file } => plain(cmd_reduce(&kind, &file)),
        Command::Approx { game, eps, y, subspace } => plain(cmd_approx(&game, &eps, &y, subspace.as_deref())),
        Command::Experiment { which: Experiment::Instability { n, eps, k } } => cmd_instability(n, eps, k),
        Command::Experiment { which: Experiment::Hardness { k } } => {
            with_report(HardnessParams::standard(k).and_then(|h| hardness_adversary_check(&h)))
        }
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn print(v: &Value) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("plain json"));
}

fn main() -> ExitCode {
    use std::io::Write;
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err((partial, failure)) => {
            if !partial.is_null() {
                print(&partial);
            }
            let err = match failure {
                Failure::Error(e) => error_json(&e),
                Failure::Checks(ChecksFailed(failed, total)) => {
                    json!({"error": "checks_failed", "message": format!("{failed} of {total} checks failed")})
                }
            };
            let _ = writeln!(std::io::stderr(), "{err}");
            ExitCode::from(1)
        }
    }
}
