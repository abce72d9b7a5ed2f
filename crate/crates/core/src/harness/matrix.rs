//! The engines-by-columns summary table.
//!
//! Each cell is made of one or more sub-cells, each a (test, scenario family)
//! pair run for `trials` seeds. The Identity column of a bilateral-capable
//! engine is split into an R_B and an R_M sub-cell; the Upper- and
//! Lower-bound columns run the plain and sharp variants; Responsiveness runs
//! t5 in the expanding and shrinking settings.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::axioms::{ChurnSetting, Column, TestId};
use super::check::{check, Outcome, Verdict};
use super::scenario::{generate_scenario, ScenarioParams};
use crate::indices::{EngineSpec, Family, ImputationPolicy, RqConfig, WeightScheme};
use crate::model::ReferencePolicy;
use crate::reference::{ReferencePriceScheme, ReferenceQuantityScheme};

/// Aggregated verdict of a cell or sub-cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellVerdict {
    /// Every trial passed.
    Yes,
    /// At least one failure was witnessed.
    No,
    /// No failure witnessed, but some trial could not be evaluated.
    Error,
}

impl fmt::Display for CellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellVerdict::Yes => "Yes",
            CellVerdict::No => "No",
            CellVerdict::Error => "Error",
        })
    }
}

/// One scenario family inside a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCellPlan {
    pub test: TestId,
    /// Printed qualifier, such as "R_B" or "t3"; `None` for sub-cells that
    /// only sharpen the column.
    pub qualifier: Option<String>,
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCell {
    pub plan: SubCellPlan,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    /// First failing verdict in seed order.
    pub witness: Option<Verdict>,
    /// First engine error or inapplicable scenario, kept for diagnosis.
    pub first_error: Option<Verdict>,
}

impl SubCell {
    pub fn verdict(&self) -> CellVerdict {
        if self.failed > 0 {
            CellVerdict::No
        } else if self.errors > 0 {
            CellVerdict::Error
        } else {
            CellVerdict::Yes
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub column: Column,
    pub subcells: Vec<SubCell>,
}

impl Cell {
    /// The unqualified verdict: No if any sub-cell witnessed a failure.
    pub fn verdict(&self) -> CellVerdict {
        let all: Vec<_> = self.subcells.iter().map(SubCell::verdict).collect();
        if all.contains(&CellVerdict::No) {
            CellVerdict::No
        } else if all.contains(&CellVerdict::Error) {
            CellVerdict::Error
        } else {
            CellVerdict::Yes
        }
    }

    /// The verdict of each qualified scenario family; unqualified sub-cells
    /// are folded into the qualified one they sharpen (or into a single entry).
    pub fn qualified(&self) -> Vec<(Option<String>, CellVerdict)> {
        let mut out: Vec<(Option<String>, CellVerdict)> = Vec::new();
        for sub in &self.subcells {
            let v = sub.verdict();
            match (&sub.plan.qualifier, out.last_mut()) {
                (None, Some(last)) => last.1 = worse(last.1, v),
                (q, _) => out.push((q.clone(), v)),
            }
        }
        out
    }

    /// Text as printed in the table, e.g. "Yes if R_B / No if R_M".
    pub fn render(&self) -> String {
        let parts = self.qualified();
        let first = parts[0].1;
        if parts.iter().all(|(_, v)| *v == first) {
            let quals: Vec<&str> = parts.iter().filter_map(|(q, _)| q.as_deref()).collect();
            return if quals.is_empty() || first == CellVerdict::Yes {
                first.to_string()
            } else if quals.iter().all(|q| q.starts_with('t')) {
                format!("{first} in setting of {}", quals.join(" or "))
            } else {
                format!("{first} if {}", quals.join(" or "))
            };
        }
        parts
            .iter()
            .map(|(q, v)| match q {
                Some(q) => format!("{v} if {q}"),
                None => v.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" / ")
    }
}

fn worse(a: CellVerdict, b: CellVerdict) -> CellVerdict {
    use CellVerdict::*;
    match (a, b) {
        (No, _) | (_, No) => No,
        (Error, _) | (_, Error) => Error,
        _ => Yes,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub engine: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictMatrix {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl VerdictMatrix {
    pub fn cell(&self, engine: &str, column: Column) -> Option<&Cell> {
        self.rows
            .iter()
            .find(|r| r.engine == engine)?
            .cells
            .iter()
            .find(|c| c.column == column)
    }

    /// Plain-text table.
    pub fn render(&self) -> String {
        let mut header = vec!["Engine".to_string()];
        header.extend(self.columns.iter().map(|c| c.title().to_string()));
        let mut lines = vec![header];
        for row in &self.rows {
            let mut line = vec![row.engine.clone()];
            line.extend(row.cells.iter().map(Cell::render));
            lines.push(line);
        }
        let widths: Vec<usize> = (0..lines[0].len())
            .map(|j| lines.iter().map(|l| l[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, line) in lines.iter().enumerate() {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            writeln!(out, "{}", cells.join(" | ").trim_end()).expect("string write");
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                writeln!(out, "{}", rule.join("-+-")).expect("string write");
            }
        }
        out
    }
}

fn params(reference: ReferencePolicy, periods: usize, setting: ChurnSetting) -> ScenarioParams {
    ScenarioParams {
        reference,
        periods,
        setting,
        ..Default::default()
    }
}

fn sub(test: TestId, qualifier: Option<&str>, params: ScenarioParams) -> SubCellPlan {
    SubCellPlan {
        test,
        qualifier: qualifier.map(str::to_string),
        params,
    }
}

/// Scenario families for one cell of `engine`.
pub fn column_plan(engine: &EngineSpec, column: Column) -> Vec<SubCellPlan> {
    use ChurnSetting::*;
    let geks = matches!(engine.family, Family::Geks(_));
    // GEKS is multilateral by construction: every scenario uses the full
    // window over three periods, except responsiveness on (U0, U1).
    let (reference, periods) = if geks {
        (ReferencePolicy::FullHistory, 3)
    } else {
        (ReferencePolicy::Bilateral, 3)
    };
    let plain = params(reference, periods, Mixed);
    match column {
        Column::Identity if geks => vec![sub(TestId::Identity, None, plain)],
        Column::Identity => vec![
            sub(TestId::Identity, Some("R_B"), plain),
            sub(
                TestId::Identity,
                Some("R_M"),
                params(ReferencePolicy::FullHistory, 3, Mixed),
            ),
        ],
        Column::FixedBasket => vec![sub(TestId::FixedBasket, None, plain)],
        Column::UpperBound => vec![
            sub(TestId::UpperBound, None, plain),
            sub(TestId::SharpUpper, None, plain),
        ],
        Column::LowerBound => vec![
            sub(TestId::LowerBound, None, plain),
            sub(TestId::SharpLower, None, plain),
        ],
        Column::Responsiveness if geks => vec![
            sub(TestId::SharpResponsiveness, Some("(U0,U1)"), params(reference, 2, Expanding)),
            sub(TestId::SharpResponsiveness, None, params(reference, 2, Shrinking)),
        ],
        Column::Responsiveness => vec![
            sub(TestId::SharpResponsiveness, Some("t3"), params(reference, periods, Expanding)),
            sub(TestId::SharpResponsiveness, Some("t4"), params(reference, periods, Shrinking)),
        ],
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Scenario seed for a trial. Engines share seeds, so every row of a column
/// sees the same datasets.
pub fn trial_seed(seed: u64, test: TestId, family: usize, trial: usize) -> u64 {
    [test.ordinal(), family as u64, trial as u64]
        .into_iter()
        .fold(splitmix(seed), |acc, x| splitmix(acc ^ x))
}

pub fn run_subcell(engine: &EngineSpec, plan: &SubCellPlan, family: usize, trials: usize, seed: u64, tolerance: f64) -> SubCell {
    let mut cell = SubCell {
        plan: plan.clone(),
        passed: 0,
        failed: 0,
        errors: 0,
        witness: None,
        first_error: None,
    };
    for trial in 0..trials {
        let s = trial_seed(seed, plan.test, family, trial);
        let verdict = match generate_scenario(plan.test, s, &plan.params) {
            Ok(scenario) => check(plan.test, engine, &scenario, tolerance),
            Err(e) => {
                cell.errors += 1;
                if cell.first_error.is_none() {
                    cell.first_error = Some(Verdict {
                        test: plan.test,
                        engine: engine.label(),
                        outcome: Outcome::Inapplicable,
                        witness: super::check::Witness {
                            seed: s,
                            value: None,
                            target: None,
                            detail: e.to_string(),
                        },
                        tolerance,
                    });
                }
                continue;
            }
        };
        match verdict.outcome {
            Outcome::Pass => cell.passed += 1,
            Outcome::Fail => {
                cell.failed += 1;
                cell.witness.get_or_insert(verdict);
            }
            Outcome::EngineError | Outcome::Inapplicable => {
                cell.errors += 1;
                cell.first_error.get_or_insert(verdict);
            }
        }
    }
    cell
}

/// Runs every engine against every column for `trials` seeded scenarios per
/// sub-cell.
pub fn run_matrix(engines: &[EngineSpec], columns: &[Column], trials: usize, seed: u64, tolerance: f64) -> VerdictMatrix {
    let trials = trials.max(1);
    let rows = engines
        .iter()
        .map(|engine| Row {
            engine: engine.label(),
            cells: columns
                .iter()
                .map(|&column| Cell {
                    column,
                    subcells: column_plan(engine, column)
                        .iter()
                        .enumerate()
                        .map(|(family, plan)| run_subcell(engine, plan, family, trials, seed, tolerance))
                        .collect(),
                })
                .collect(),
        })
        .collect();
    VerdictMatrix {
        columns: columns.to_vec(),
        rows,
        trials,
        seed,
        tolerance,
    }
}

/// The three engines of the summary table: MGK, WGM with expenditure-share
/// weights and Lehr reference prices, and GEKS over bilateral MGK.
pub fn table1_engines() -> Vec<EngineSpec> {
    vec![
        EngineSpec::mgk(),
        EngineSpec::wgm(WeightScheme::ExpenditureShare, ReferencePriceScheme::LehrUnitValue),
        EngineSpec::geks(EngineSpec::mgk()),
    ]
}

/// RQ with the default markups and RQP at alpha 0.5, expected to pass everything.
pub fn reference_quantity_engines() -> Vec<EngineSpec> {
    vec![
        EngineSpec::rq(ReferenceQuantityScheme::ArithmeticMean, ImputationPolicy::default()),
        EngineSpec::rqp(0.5, RqConfig::default(), ReferencePriceScheme::LehrUnitValue),
    ]
}

/// Expected qualified verdicts of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub engine: String,
    pub column: Column,
    pub verdicts: Vec<CellVerdict>,
}

/// Published verdicts for the engines of [`table1_engines`].
pub fn table1_expectations() -> Vec<Expectation> {
    use CellVerdict::*;
    let engines = table1_engines();
    let rows: [[&[CellVerdict]; 5]; 3] = [
        [&[Yes, No], &[Yes], &[Yes], &[Yes], &[No, No]],
        [&[Yes, No], &[No], &[Yes], &[Yes], &[No, No]],
        [&[No], &[No], &[No], &[No], &[No]],
    ];
    engines
        .iter()
        .zip(rows)
        .flat_map(|(engine, row)| {
            Column::ALL.into_iter().zip(row).map(move |(column, verdicts)| Expectation {
                engine: engine.label(),
                column,
                verdicts: verdicts.to_vec(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub engine: String,
    pub column: Column,
    pub expected: Vec<CellVerdict>,
    /// `None` when the matrix has no such cell.
    pub found: Option<Vec<CellVerdict>>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}: expected {:?}, found ", self.engine, self.column.title(), self.expected)?;
        match &self.found {
            Some(v) => write!(f, "{v:?}"),
            None => write!(f, "no cell"),
        }
    }
}

/// Cells of `matrix` whose qualified verdicts differ from `expected`.
pub fn compare(matrix: &VerdictMatrix, expected: &[Expectation]) -> Vec<Mismatch> {
    expected
        .iter()
        .filter_map(|e| {
            let found = matrix
                .cell(&e.engine, e.column)
                .map(|c| c.qualified().into_iter().map(|(_, v)| v).collect::<Vec<_>>());
            (found.as_ref() != Some(&e.verdicts)).then(|| Mismatch {
                engine: e.engine.clone(),
                column: e.column,
                expected: e.verdicts.clone(),
                found,
            })
        })
        .collect()
}
