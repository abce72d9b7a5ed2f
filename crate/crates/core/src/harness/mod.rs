//! Axiomatic test harness: scenario generation, verdicts, the summary
//! matrix, counterexample search and closed-form checks.

pub mod axioms;
pub mod check;
pub mod closed_form;
pub mod matrix;
pub mod precondition;
pub mod scenario;
pub mod search;

pub use axioms::{ChurnSetting, Column, TestId};
pub use check::{check, check_with, CheckConfig, Outcome, Verdict, Witness, DEFAULT_PERTURBATIONS, DEFAULT_TOLERANCE};
pub use precondition::precondition_holds;
pub use scenario::{generate_scenario, Scenario, ScenarioError, ScenarioMetadata, ScenarioParams};
pub use matrix::{
    column_plan, compare, run_matrix, table1_engines, table1_expectations, Cell, CellVerdict, Expectation, Mismatch, Row,
    SubCell, SubCellPlan, VerdictMatrix,
};
pub use closed_form::{closed_form_suite, ClosedFormCheck};
pub use search::{find_counterexample, probe_transitivity, TransitivityProbe, TransitivityWitness};
