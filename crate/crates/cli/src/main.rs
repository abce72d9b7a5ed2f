use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dynindex::harness::matrix::reference_quantity_engines;
use dynindex::harness::search::default_search_params;
use dynindex::harness::{
    closed_form_suite, compare, find_counterexample, probe_transitivity, run_matrix, table1_engines,
    table1_expectations, CellVerdict, Column, ScenarioParams, TestId, TransitivityProbe, DEFAULT_TOLERANCE,
};
use dynindex::indices::{classical_indices, evaluate};
use dynindex::io::{emit_csv, format_index, ingest_csv, synth, Report, Series, SynthConfig};
use dynindex::model::{ComparisonSpec, Dataset, Period};
use serde_json::json;

mod engine;

use engine::{parse_reference, Classical, Engine, EngineArgs};

const EXIT_MISMATCH: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Engine(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Engine(_) => EXIT_SOFTWARE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Data(m) => write!(f, "data: {m}"),
            CliError::Engine(m) => write!(f, "engine: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

/// Price indices for dynamic item universes.
#[derive(Debug, Parser)]
#[command(name = "dynindex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute an index from a CSV dataset
    Compute {
        /// CSV file; `-` reads standard input
        #[arg(long, short, default_value = "-")]
        input: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        base: Period,
        #[arg(long)]
        current: Period,
        /// bilateral, full or rolling:W
        #[arg(long, default_value = "bilateral")]
        reference: String,
        /// Print the value for every period from base+1 to current
        #[arg(long)]
        series: bool,
        /// Write a JSON report to this file
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the axiomatic test matrix
    Matrix {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, env = "DYNINDEX_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Add RQ and RQP rows
        #[arg(long)]
        with_rq: bool,
        /// Exit with status 2 unless the published summary table is reproduced
        #[arg(long)]
        expect_table1: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check engines against closed forms on hand-solvable data
    ClosedForms {
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a synthetic churn dataset as CSV
    Synth {
        #[arg(long, default_value_t = 5)]
        periods: usize,
        #[arg(long, default_value_t = 20)]
        items: usize,
        #[arg(long, default_value_t = 0.2)]
        churn: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        drift: f64,
        #[arg(long, default_value_t = 0.05)]
        dispersion: f64,
        /// Per-period log-price decline over each item's life
        #[arg(long)]
        decline: Option<f64>,
        #[arg(long, env = "DYNINDEX_SEED", default_value_t = 0)]
        seed: u64,
        /// Output file; standard output by default
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Search random scenarios for a failing verdict
    Counterexample {
        #[command(flatten)]
        engine: EngineArgs,
        /// T1, T2, T3, T4, t3, t4, T5, t5 or transitivity
        #[arg(long)]
        test: String,
        #[arg(long, default_value_t = 500)]
        budget: usize,
        #[arg(long, env = "DYNINDEX_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Scenario reference window; GEKS defaults to full, others to bilateral
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        items: Option<usize>,
        #[arg(long)]
        periods: Option<usize>,
        #[arg(long)]
        churn: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let ingested = if path.as_os_str() == "-" {
        ingest_csv(io::stdin().lock())
    } else {
        let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        ingest_csv(BufReader::new(file))
    };
    let ingested = ingested.map_err(|e| match e {
        dynindex::io::CsvError::Io(e) => CliError::Io(e.to_string()),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })?;
    if ingested.dropped_zero_quantity > 0 {
        eprintln!("warning: dropped {} zero-quantity rows", ingested.dropped_zero_quantity);
    }
    Ok(ingested.dataset)
}

fn write_report(path: &Option<PathBuf>, report: &Report) -> Result<(), CliError> {
    if let Some(path) = path {
        std::fs::write(path, report.to_json() + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn evaluate_engine(engine: &Engine, data: &Dataset, spec: &ComparisonSpec) -> Result<dynindex::indices::IndexResult, CliError> {
    match engine {
        Engine::Spec(e) => {
            let r = evaluate(data, spec, e).map_err(|err| CliError::Engine(err.to_string()))?;
            if !r.converged() {
                return Err(CliError::Engine(format!(
                    "fixed point did not converge at period {}: {:?}",
                    spec.current, r.diagnostics
                )));
            }
            Ok(r)
        }
        Engine::Classical(which) => {
            if !spec.reference.is_bilateral() {
                return Err(CliError::Usage("classical indices are bilateral".into()));
            }
            let c = classical_indices(data, spec.base, spec.current).map_err(|e| CliError::Engine(e.to_string()))?;
            Ok(dynindex::indices::IndexResult::plain(match which {
                Classical::Laspeyres => c.laspeyres,
                Classical::Paasche => c.paasche,
                Classical::Fisher => c.fisher,
            }))
        }
    }
}

fn compute(
    input: &Path,
    args: &EngineArgs,
    base: Period,
    current: Period,
    reference: &str,
    series: bool,
    report: &Option<PathBuf>,
) -> Result<u8, CliError> {
    let engine = args.build()?;
    let policy = parse_reference(reference)?;
    let data = read_dataset(input)?;
    let spec = ComparisonSpec::new(base, current, policy);
    spec.check(&data).map_err(|e| CliError::Usage(e.to_string()))?;
    let currents: Vec<Period> = if series { (base + 1..=current).collect() } else { vec![current] };
    let mut out = Series {
        engine: engine.label(),
        base,
        reference: reference.to_string(),
        points: Vec::new(),
    };
    for t in currents {
        let r = evaluate_engine(&engine, &data, &ComparisonSpec { current: t, ..spec })?;
        if series {
            println!("{t}\t{}", format_index(r.value));
        } else {
            println!("{}", format_index(r.value));
        }
        out.push(t, &r);
    }
    let mut config = args.describe();
    config["command"] = json!("compute");
    config["input"] = json!(input.display().to_string());
    config["base"] = json!(base);
    config["current"] = json!(current);
    config["reference"] = json!(reference);
    let mut rep = Report::new(config);
    rep.series.push(out);
    write_report(report, &rep)?;
    Ok(0)
}

fn matrix(
    trials: usize,
    seed: u64,
    tolerance: f64,
    with_rq: bool,
    expect: bool,
    report: &Option<PathBuf>,
) -> Result<u8, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let mut engines = table1_engines();
    if with_rq {
        engines.extend(reference_quantity_engines());
    }
    let m = run_matrix(&engines, &Column::ALL, trials, seed, tolerance);
    print!("{}", m.render());
    println!();
    for row in &m.rows {
        for cell in &row.cells {
            for sub in &cell.subcells {
                let qual = sub.plan.qualifier.as_deref().map(|q| format!(" [{q}]")).unwrap_or_default();
                if let Some(w) = &sub.witness {
                    println!(
                        "{} {} {}{}: fail {}/{} seed={} value={} ({})",
                        row.engine,
                        cell.column.title(),
                        sub.plan.test,
                        qual,
                        sub.failed,
                        m.trials,
                        w.witness.seed,
                        w.witness.value.map_or("-".into(), format_index),
                        w.witness.detail
                    );
                } else if sub.verdict() == CellVerdict::Error {
                    let detail = sub.first_error.as_ref().map_or("", |v| v.witness.detail.as_str());
                    println!("{} {} {}{}: error {} ({detail})", row.engine, cell.column.title(), sub.plan.test, qual, sub.errors);
                }
            }
        }
    }
    let mut rep = Report::new(json!({
        "command": "matrix", "trials": trials, "seed": seed, "tolerance": tolerance, "with_rq": with_rq,
    }));
    rep.matrix = Some(m);
    write_report(report, &rep)?;
    if expect {
        let mismatches = compare(rep.matrix.as_ref().expect("set above"), &table1_expectations());
        if !mismatches.is_empty() {
            for mm in &mismatches {
                eprintln!("mismatch: {mm}");
            }
            return Ok(EXIT_MISMATCH);
        }
        println!("summary table reproduced");
    }
    Ok(0)
}

fn closed_forms(report: &Option<PathBuf>) -> Result<u8, CliError> {
    let checks = closed_form_suite();
    for c in &checks {
        println!(
            "{} {}: engine {} expected {} |error| {:.3e} (worst on {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            format_index(c.engine_value),
            format_index(c.expected),
            c.abs_error,
            c.dataset
        );
    }
    let mut rep = Report::new(json!({"command": "closed-forms"}));
    rep.closed_forms = checks;
    write_report(report, &rep)?;
    Ok(if rep.closed_forms.iter().all(|c| c.pass) { 0 } else { EXIT_MISMATCH })
}

#[allow(clippy::too_many_arguments)]
fn synth_command(
    periods: usize,
    items: usize,
    churn: f64,
    drift: f64,
    dispersion: f64,
    decline: Option<f64>,
    seed: u64,
    output: &Option<PathBuf>,
) -> Result<u8, CliError> {
    let config = SynthConfig {
        periods,
        initial_items: items,
        churn_rate: churn,
        drift_mean: drift,
        drift_dispersion: dispersion,
        lifecycle_decline: decline,
        seed,
        ..Default::default()
    };
    let (data, summary) = synth(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            emit_csv(&data, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit_csv(&data, &mut w).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
    }
    eprintln!(
        "realized churn {} (mean {}), mean log price change {}",
        summary
            .realized_churn
            .iter()
            .map(|c| format_index(*c))
            .collect::<Vec<_>>()
            .join(" "),
        format_index(summary.mean_churn),
        format_index(summary.mean_log_price_change)
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn counterexample(
    args: &EngineArgs,
    test: &str,
    budget: usize,
    seed: u64,
    tolerance: f64,
    reference: &Option<String>,
    items: Option<usize>,
    periods: Option<usize>,
    churn: Option<f64>,
    report: &Option<PathBuf>,
) -> Result<u8, CliError> {
    let Engine::Spec(engine) = args.build()? else {
        return Err(CliError::Usage("counterexample search needs an index engine, not a classical index".into()));
    };
    if budget == 0 {
        return Err(CliError::Usage("budget must be at least 1".into()));
    }
    let mut config = args.describe();
    config["command"] = json!("counterexample");
    config["test"] = json!(test);
    config["budget"] = json!(budget);
    config["seed"] = json!(seed);
    let mut rep = Report::new(config);

    if test == "transitivity" {
        let defaults = TransitivityProbe::default();
        let probe = TransitivityProbe {
            items: items.unwrap_or(defaults.items),
            churn: churn.unwrap_or(defaults.churn),
            ..defaults
        };
        match probe_transitivity(&engine, budget, seed, &probe) {
            Some(w) => {
                println!(
                    "found: seed={} direct={} chained={} |log discrepancy|={:.3e}",
                    w.seed,
                    format_index(w.direct),
                    format_index(w.chained),
                    w.discrepancy
                );
                rep.counterexample = Some(serde_json::to_value(&w).expect("serializable"));
            }
            None => println!("not found in {budget} datasets"),
        }
    } else {
        let test: TestId = test.parse().map_err(CliError::Usage)?;
        let mut params: ScenarioParams = default_search_params(&engine);
        if let Some(r) = reference {
            params.reference = parse_reference(r)?;
        }
        params.items = items.unwrap_or(params.items);
        params.periods = periods.unwrap_or(params.periods);
        params.churn = churn.unwrap_or(params.churn);
        match find_counterexample(&engine, test, budget, seed, &params, tolerance) {
            Some(v) => {
                println!(
                    "found: {} {} seed={} value={} ({})",
                    v.engine,
                    v.test,
                    v.witness.seed,
                    v.witness.value.map_or("-".into(), format_index),
                    v.witness.detail
                );
                rep.counterexample = Some(serde_json::to_value(&v).expect("serializable"));
            }
            None => println!("not found in {budget} scenarios"),
        }
    }
    write_report(report, &rep)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Compute {
            input,
            engine,
            base,
            current,
            reference,
            series,
            report,
        } => compute(&input, &engine, base, current, &reference, series, &report),
        Command::Matrix {
            trials,
            seed,
            tolerance,
            with_rq,
            expect_table1,
            report,
        } => matrix(trials, seed, tolerance, with_rq, expect_table1, &report),
        Command::ClosedForms { report } => closed_forms(&report),
        Command::Synth {
            periods,
            items,
            churn,
            drift,
            dispersion,
            decline,
            seed,
            output,
        } => synth_command(periods, items, churn, drift, dispersion, decline, seed, &output),
        Command::Counterexample {
            engine,
            test,
            budget,
            seed,
            tolerance,
            reference,
            items,
            periods,
            churn,
            report,
        } => counterexample(&engine, &test, budget, seed, tolerance, &reference, items, periods, churn, &report),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dynindex: {e}");
            ExitCode::from(e.code())
        }
    }
}
