//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so every line is printed. A criterion
//! prints FAIL when any of its checks fails. Checks listed in `KNOWN_RED`
//! are expected to fail and do not change the exit status; any other
//! failure, or a known-red check that starts passing, exits non-zero.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use dynindex::frame::Frame;
use dynindex::harness::matrix::trial_seed;
use dynindex::harness::{
    check, closed_form_suite, generate_scenario, ChurnSetting, Outcome, ScenarioParams, TestId,
};
use dynindex::indices::{
    classical_indices, evaluate, evaluate_frame, EngineSpec, ImputationPolicy, RqConfig, WeightScheme,
};
use dynindex::io::{synth, SynthConfig};
use dynindex::model::{value_ratio, ComparisonSpec, Dataset, ItemId, Observation, Period, PeriodData, ReferencePolicy};
use dynindex::reference::{deflated_price, tpd_price, FixedPointConfig, ReferencePriceScheme, ReferenceQuantityScheme};

/// (criterion, check) pairs that fail for a documented reason.
const KNOWN_RED: &[(u32, &str)] = &[
    (2, "MGK on rental data = sqrt(V)"),
    (5, "GK and TPD converge within 1000 sweeps on every desk-scale dataset"),
];

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check_line(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail: detail.into(),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dynindex"))
}

fn criterion_1() -> Vec<Check> {
    let start = Instant::now();
    let out = bin()
        .args(["matrix", "--trials", "200", "--expect-table1"])
        .env_remove("DYNINDEX_SEED")
        .output()
        .expect("run matrix");
    let elapsed = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rendered = [
        "Yes if R_B / No if R_M",
        "No in setting of t3 or t4",
        "No if (U0,U1)",
    ]
    .iter()
    .all(|cell| stdout.contains(cell));
    vec![
        check_line(
            "matrix --trials 200 --expect-table1 exits 0",
            out.status.code() == Some(0),
            format!("exit {:?}; {}", out.status.code(), String::from_utf8_lossy(&out.stderr).trim()),
        ),
        check_line("qualified cells rendered", rendered, ""),
        check_line("runtime under 60 s", elapsed < 60.0, format!("{elapsed:.1} s")),
    ]
}

fn criterion_2() -> Vec<Check> {
    closed_form_suite()
        .into_iter()
        .map(|c| {
            let detail = format!(
                "engine {:.12} expected {:.12} |error| {:.2e} on {}",
                c.engine_value, c.expected, c.abs_error, c.dataset
            );
            check_line(&c.name, c.pass, detail)
        })
        .collect()
}

fn criterion_3() -> Vec<Check> {
    let out = bin()
        .args(["counterexample", "--engine", "geks", "--test", "transitivity", "--budget", "100"])
        .env_remove("DYNINDEX_SEED")
        .output()
        .expect("run counterexample");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let discrepancy = stdout
        .split("|log discrepancy|=")
        .nth(1)
        .and_then(|s| s.trim().parse::<f64>().ok());
    vec![check_line(
        "GEKS chain discrepancy above 1e-6 within 100 datasets (t = 2, 5 items, 20% churn)",
        out.status.success() && discrepancy.is_some_and(|d| d > 1e-6),
        stdout.trim().to_string(),
    )]
}

/// Random fixed-universe datasets with varying quantities.
fn fixed_universe(seed: u64) -> Dataset {
    let config = SynthConfig {
        periods: 2 + (seed % 5) as usize,
        initial_items: 2 + (seed % 19) as usize,
        churn_rate: 0.0,
        drift_dispersion: 0.3,
        quantity_noise: 0.5,
        seed,
        ..Default::default()
    };
    synth(&config).expect("valid config").0
}

fn criterion_4() -> Vec<Check> {
    let rq = EngineSpec::rq(ReferenceQuantityScheme::ArithmeticMean, ImputationPolicy::default());
    let bilateral = ScenarioParams::default();
    let multilateral = ScenarioParams {
        reference: ReferencePolicy::FullHistory,
        ..Default::default()
    };
    let setting = |setting| ScenarioParams {
        setting,
        ..Default::default()
    };
    let batches = [
        (TestId::Identity, "R_B", bilateral),
        (TestId::Identity, "R_M", multilateral),
        (TestId::FixedBasket, "R_B", bilateral),
        (TestId::UpperBound, "R_B", bilateral),
        (TestId::LowerBound, "R_B", bilateral),
        (TestId::SharpUpper, "R_B", bilateral),
        (TestId::SharpLower, "R_B", bilateral),
        (TestId::SharpResponsiveness, "t3 setting", setting(ChurnSetting::Expanding)),
        (TestId::SharpResponsiveness, "t4 setting", setting(ChurnSetting::Shrinking)),
        (TestId::SharpResponsiveness, "births and deaths", setting(ChurnSetting::Mixed)),
    ];
    let mut checks: Vec<Check> = batches
        .iter()
        .enumerate()
        .map(|(family, (test, label, params))| {
            let mut failures = Vec::new();
            for trial in 0..200 {
                let seed = trial_seed(4, *test, family, trial);
                let scenario = generate_scenario(*test, seed, params).expect("feasible");
                let v = check(*test, &rq, &scenario, 1e-9);
                if v.outcome != Outcome::Pass {
                    failures.push(format!("seed {seed}: {} {}", v.outcome, v.witness.detail));
                }
            }
            check_line(
                &format!("RQ(1.05) passes {test} ({label}) on 200 scenarios"),
                failures.is_empty(),
                failures.first().cloned().unwrap_or_default(),
            )
        })
        .collect();

    let rqp = EngineSpec::rqp(
        0.5,
        RqConfig {
            quantity: ReferenceQuantityScheme::BaseQuantity,
            ..Default::default()
        },
        ReferencePriceScheme::FixedBase,
    );
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let d = fixed_universe(seed);
        let t = d.last_period();
        let value = evaluate(&d, &ComparisonSpec::bilateral(0, t), &rqp).expect("rqp").value;
        let fisher = classical_indices(&d, 0, t).expect("classical").fisher;
        worst = worst.max((value - fisher).abs());
    }
    checks.push(check_line(
        "RQP(0.5, base quantities, base prices) = Fisher within 1e-12 on 100 datasets",
        worst <= 1e-12,
        format!("max |error| {worst:.2e}"),
    ));
    checks
}

/// Desk-scale synthetic markets: up to 50 items and 12 periods.
fn desk_scale(seed: u64) -> Dataset {
    let config = SynthConfig {
        periods: 2 + (seed % 11) as usize,
        initial_items: 2 + (seed * 7 % 49) as usize,
        churn_rate: (seed % 5) as f64 * 0.1,
        drift_mean: ((seed % 3) as f64 - 1.0) * 0.02,
        drift_dispersion: 0.05 + (seed % 4) as f64 * 0.1,
        lifecycle_decline: seed.is_multiple_of(2).then_some(0.03),
        quantity_noise: 0.4,
        seed,
        ..Default::default()
    };
    synth(&config).expect("valid config").0
}

fn relabel(d: &Dataset) -> Dataset {
    d.map_observations(|_, id, o| Some((ItemId::new(format!("x-{}", id.as_str().chars().rev().collect::<String>())), o)))
        .expect("valid")
}

fn scale(d: &Dataset, price: f64, quantity: f64) -> Dataset {
    d.map_observations(|_, id, o| Some((id.clone(), Observation::new(o.price * price, o.quantity * quantity))))
        .expect("valid")
}

fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_5() -> Vec<Check> {
    let reversible = [
        EngineSpec::mgk(),
        EngineSpec::guv(ReferencePriceScheme::LehrUnitValue),
        EngineSpec::wgm(WeightScheme::ExpenditureShare, ReferencePriceScheme::LehrUnitValue),
    ];
    let invariant = [
        EngineSpec::gk(),
        EngineSpec::mgk(),
        EngineSpec::wgm(WeightScheme::ExpenditureShare, ReferencePriceScheme::LehrUnitValue),
        EngineSpec::tpd(),
        EngineSpec::geks(EngineSpec::mgk()),
        EngineSpec::rq(ReferenceQuantityScheme::ArithmeticMean, ImputationPolicy::default()),
        EngineSpec::rqp(0.5, RqConfig::default(), ReferencePriceScheme::LehrUnitValue),
    ];
    let (mut reversal, mut decomposition, mut scaling, mut relabeling): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let (mut solves, mut converged, mut worst_residual, mut idempotence) = (0, 0, 0.0f64, 0.0f64);
    let mut stalled = Vec::new();
    let mut scaling_failures = Vec::new();

    for seed in 0..500 {
        let d = desk_scale(seed);
        let t = d.last_period();
        let (first, last) = (d.period(0).unwrap(), d.period(t).unwrap());
        let (fwd, back) = (Frame::bilateral(first, last).unwrap(), Frame::bilateral(last, first).unwrap());
        for e in &reversible {
            let p = evaluate_frame(&fwd, e).unwrap().value * evaluate_frame(&back, e).unwrap().value;
            reversal = reversal.max((p - 1.0).abs());
        }

        let full = ComparisonSpec::full_history(0, t);
        for e in [EngineSpec::gk(), EngineSpec::mgk()] {
            let r = evaluate(&d, &full, &e).unwrap();
            let dec = r.decomposition.unwrap();
            let v = value_ratio(&d, 0, t).unwrap();
            decomposition = decomposition.max(rel_err(r.value * dec.quantity_index, v));
        }

        for spec in [full, ComparisonSpec::bilateral(0, t)] {
            for e in [EngineSpec::gk(), EngineSpec::tpd()] {
                let r = evaluate(&d, &spec, &e).unwrap();
                let report = r.diagnostics.unwrap();
                solves += 1;
                if !report.converged {
                    let patient = e.clone().with_fixed_point(FixedPointConfig {
                        max_iterations: 20_000,
                        ..Default::default()
                    });
                    let retry = evaluate(&d, &spec, &patient).unwrap().diagnostics.unwrap();
                    stalled.push((seed, e.to_string(), spec.reference, report.final_residual, retry));
                    continue;
                }
                converged += 1;
                worst_residual = worst_residual.max(report.final_residual);
                if spec.reference == ReferencePolicy::Bilateral {
                    idempotence = idempotence.max(reapply_bilateral(&d, t, &e, &r));
                }
            }
        }

        if seed % 5 == 0 {
            let (ps, qs, rl) = (scale(&d, 3.7, 1.0), scale(&d, 1.0, 0.23), relabel(&d));
            for e in &invariant {
                let base = evaluate(&d, &full, e).unwrap().value;
                let sp = evaluate(&ps, &full, e).unwrap().value;
                let sq = evaluate(&qs, &full, e).unwrap().value;
                let err = rel_err(sp, base).max(rel_err(sq, base));
                if err > 1e-8 {
                    scaling_failures.push(format!("{e} seed {seed}: {err:.2e}"));
                }
                scaling = scaling.max(err);
                relabeling = relabeling.max(rel_err(evaluate(&rl, &full, e).unwrap().value, base));
            }
        }
    }
    vec![
        check_line(
            "time reversal (MGK, GUV-Lehr, WGM) within 1e-10 on 500 datasets",
            reversal <= 1e-10,
            format!("max |P(0,t)P(t,0) - 1| {reversal:.2e}"),
        ),
        check_line(
            "value-ratio decomposition within 1e-12",
            decomposition <= 1e-12,
            format!("max relative error {decomposition:.2e}"),
        ),
        check_line(
            "scale equivariance in prices and quantities",
            scaling <= 1e-8,
            format!(
                "max relative change {scaling:.2e} (coupled engines within solver tolerance) {}",
                scaling_failures.join("; ")
            ),
        ),
        check_line(
            "relabeling invariance",
            relabeling <= 1e-9,
            format!("max relative change {relabeling:.2e}"),
        ),
        check_line(
            "GK and TPD converge within 1000 sweeps on every desk-scale dataset",
            converged == solves,
            format!("{converged}/{solves} solves over 500 datasets"),
        ),
        check_line(
            "GK and TPD converged solves have residual <= 1e-10",
            worst_residual <= 1e-10,
            format!("{converged}/{solves} solves converged within 1000 sweeps, worst residual {worst_residual:.2e}"),
        ),
        check_line(
            "GK and TPD solves that stop at 1000 sweeps are slow, not divergent",
            stalled.iter().all(|s| s.4.converged),
            stalled
                .iter()
                .map(|(seed, e, reference, residual, retry)| {
                    format!(
                        "seed {seed} {e} {reference:?}: residual {residual:.1e} at 1000, converged after {}",
                        retry.iterations
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
        ),
        check_line(
            "converged GK and TPD solutions are fixed points of their equations within 1e-10",
            idempotence <= 1e-10,
            format!("max log change on re-application {idempotence:.2e}"),
        ),
    ]
}

/// Log change of a bilateral GK or TPD value when its equations are applied
/// once more to the returned solution.
fn reapply_bilateral(d: &Dataset, t: Period, e: &EngineSpec, r: &dynindex::indices::IndexResult) -> f64 {
    let gk = matches!(e.family, dynindex::indices::Family::Gk);
    let (first, last) = (d.period(0).unwrap(), d.period(t).unwrap());
    let series: BTreeMap<Period, f64> = [(0, 1.0), (t, r.value)].into();
    let prices: BTreeMap<ItemId, f64> = r
        .reference_prices
        .keys()
        .map(|id| {
            let p = if gk {
                deflated_price(d, id, &[0, t], &series)
            } else {
                tpd_price(d, id, &[0, t], &series)
            };
            (id.clone(), p.unwrap())
        })
        .collect();
    let reapplied = if gk {
        let q = |pd: &PeriodData| pd.items.iter().map(|(id, o)| o.quantity * prices[id]).sum::<f64>();
        value_ratio(d, 0, t).unwrap() / (q(last) / q(first))
    } else {
        let m = |pd: &PeriodData| {
            let total = pd.expenditure();
            pd.items.iter().map(|(id, o)| o.expenditure() / total * (o.price / prices[id]).ln()).sum::<f64>()
        };
        (m(last) - m(first)).exp()
    };
    (reapplied.ln() - r.value.ln()).abs()
}

fn criterion_6() -> Vec<Check> {
    let (mut tornqvist, mut laspeyres, mut paasche): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let wgm = EngineSpec::wgm(WeightScheme::TornqvistSymmetric, ReferencePriceScheme::LehrUnitValue);
    let rq_base = EngineSpec::rq(ReferenceQuantityScheme::BaseQuantity, ImputationPolicy::default());
    let guv_base = EngineSpec::guv(ReferencePriceScheme::FixedBase);
    for seed in 0..100 {
        let d = fixed_universe(1000 + seed);
        let t = d.last_period();
        let spec = ComparisonSpec::bilateral(0, t);
        let (p0, pt) = (d.period(0).unwrap(), d.period(t).unwrap());
        let share = |pd: &PeriodData, id: &ItemId| pd.items[id].expenditure() / pd.expenditure();
        let direct = p0
            .items
            .keys()
            .map(|id| 0.5 * (share(p0, id) + share(pt, id)) * (pt.items[id].price / p0.items[id].price).ln())
            .sum::<f64>()
            .exp();
        tornqvist = tornqvist.max((evaluate(&d, &spec, &wgm).unwrap().value - direct).abs());
        let classical = classical_indices(&d, 0, t).unwrap();
        laspeyres = laspeyres.max(rel_err(evaluate(&d, &spec, &rq_base).unwrap().value, classical.laspeyres));
        paasche = paasche.max(rel_err(evaluate(&d, &spec, &guv_base).unwrap().value, classical.paasche));
    }
    vec![
        check_line(
            "WGM with Tornqvist weights = direct Tornqvist within 1e-12",
            tornqvist <= 1e-12,
            format!("max |error| {tornqvist:.2e}"),
        ),
        check_line(
            "RQ with base quantities = Laspeyres",
            laspeyres <= 1e-12,
            format!("max relative error {laspeyres:.2e}"),
        ),
        check_line(
            "GUV with base prices = Paasche",
            paasche <= 1e-12,
            format!("max relative error {paasche:.2e}"),
        ),
    ]
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    type Criterion = (u32, &'static str, fn() -> Vec<Check>);
    let criteria: [Criterion; 6] = [
        (1, "summary table reproduction", criterion_1),
        (2, "closed-form oracles", criterion_2),
        (3, "GEKS intransitivity", criterion_3),
        (4, "RQ and RQP properties", criterion_4),
        (5, "property suites", criterion_5),
        (6, "fixed-universe reductions", criterion_6),
    ];
    let mut unexpected = Vec::new();
    let mut lines = Vec::new();
    for (n, title, run) in criteria {
        let checks = run();
        let pass = checks.iter().all(|c| c.pass);
        lines.push(format!("criterion {n} {}: {title}", if pass { "PASS" } else { "FAIL" }));
        for c in &checks {
            let known = KNOWN_RED.contains(&(n, c.name.as_str()));
            let mark = match (c.pass, known) {
                (true, false) => "ok",
                (false, true) => "known red",
                (false, false) => "FAILED",
                (true, true) => "UNEXPECTED PASS",
            };
            println!("  [{n}] {mark}: {} ({})", c.name, c.detail.trim());
            if c.pass == known {
                unexpected.push(format!("criterion {n}: {}", c.name));
            }
        }
    }
    println!();
    for line in &lines {
        println!("{line}");
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance results: {unexpected:#?}");
        std::process::exit(1);
    }
}
