//! The nine acceptance criteria, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use nucnz::fixtures::{
    few2_suite, hardness_adversary_check, instability_experiment, lsa_approx_suite, matroid_suite, mps_suite,
    nz_equivalence_suite, randomized_suite, reduction_chain_suite, verify_instability_balance, HardnessParams,
    InstabilityParams, Report,
};
use nucnz::{Rat, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_reports(reports: &[Report]) -> Outcome {
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failures().into_iter().map(move |c| format!("{}: {} ({} vs {})", r.experiment, c.name, c.lhs, c.rhs)))
        .collect();
    let summary: Vec<String> = reports
        .iter()
        .map(|r| {
            if r.checks.len() > 6 {
                return format!("{}: {} checks", r.experiment, r.checks.len());
            }
            let counts: Vec<String> = r.checks.iter().map(|c| format!("{} {}/{}", c.name, c.lhs, c.rhs)).collect();
            format!("{}: {}", r.experiment, counts.join(", "))
        })
        .collect();
    if failures.is_empty() {
        Outcome { pass: true, detail: summary.join("; ") }
    } else {
        Outcome { pass: false, detail: failures.join("; ") }
    }
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let out = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
    let took = start.elapsed();
    let in_time = took <= limit;
    let pass = out.pass && in_time;
    let timing = if in_time { String::new() } else { format!(" over the {}s limit", limit.as_secs()) };
    println!(
        "criterion {id} [{}] {name}: {:.1}s{timing}; {}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        out.detail
    );
    pass
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn criterion_1() -> Result<Outcome> {
    let p = InstabilityParams::new(0, Rat::new(1, 16), Rat::from_int(64))?;
    let exp = instability_experiment(&p)?;
    let mps_ran = exp.nucleoli.is_some();
    let mut out = from_reports(&[exp.report]);
    if !mps_ran {
        return Ok(Outcome { pass: false, detail: "full MPS skipped: 17 players exceed the enumeration cap".into() });
    }
    let start = Instant::now();
    let mut balance = Vec::new();
    for n in 0..=10 {
        balance.push(verify_instability_balance(&InstabilityParams::new(n, Rat::new(1, 16), Rat::from_int(64 << n))?)?);
    }
    let took = start.elapsed();
    let ledger = from_reports(&balance);
    out.pass &= ledger.pass && took < Duration::from_secs(1);
    out.detail = format!("{}; balance n=0..10 in {:.3}s, {}", out.detail, took.as_secs_f64(), if ledger.pass { "all exact" } else { &ledger.detail });
    Ok(out)
}

fn criterion_2() -> Result<Outcome> {
    let mut reports = Vec::new();
    for k in [2, 3] {
        reports.push(hardness_adversary_check(&HardnessParams::standard(k)?)?);
    }
    Ok(from_reports(&reports))
}

#[test]
fn acceptance() {
    let results = [
        run(1, "instability reproduction", minutes(10), criterion_1),
        run(2, "hardness family", minutes(1), criterion_2),
        run(3, "LSA/NZ equivalence", minutes(2), || Ok(from_reports(&[nz_equivalence_suite(3, 200)?]))),
        run(4, "MPS correctness", minutes(5), || Ok(from_reports(&[mps_suite(4, 100)?]))),
        run(5, "reduction chain", minutes(10), || Ok(from_reports(&[reduction_chain_suite(5, 100, 20)?]))),
        run(6, "few b=2 vertices", minutes(5), || Ok(from_reports(&[few2_suite(6, 100)?]))),
        run(7, "randomized NZ matching", minutes(10), || Ok(from_reports(&[randomized_suite(7, 100)?]))),
        run(8, "matroid solvers", minutes(10), || Ok(from_reports(&[matroid_suite(8, 200, 500, 40)?]))),
        run(9, "LSA approximation", minutes(5), || {
            Ok(from_reports(&[lsa_approx_suite(9, 200, &[Rat::new(1, 2), Rat::new(1, 4)])?]))
        }),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len());
}
