use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::axioms::TestId;
use super::precondition::precondition_holds;
use super::scenario::Scenario;
use crate::indices::{evaluate, EngineSpec};
use crate::model::{universe_algebra, value_ratio, ComparisonSpec, Dataset, ItemId, Observation};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_PERTURBATIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    EngineError,
    /// The scenario does not meet the test's precondition.
    Inapplicable,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::EngineError => "engine-error",
            Outcome::Inapplicable => "inapplicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    /// Index value on the scenario as generated.
    pub value: Option<f64>,
    /// The value the test compares against (1, or the value ratio for T2).
    pub target: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub test: TestId,
    pub engine: String,
    pub outcome: Outcome,
    pub witness: Witness,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Log-scale tolerance.
    pub tolerance: f64,
    /// Number of birth/death perturbations tried by the responsiveness tests.
    pub perturbations: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            tolerance: DEFAULT_TOLERANCE,
            perturbations: DEFAULT_PERTURBATIONS,
        }
    }
}

fn index_value(dataset: &Dataset, spec: &ComparisonSpec, engine: &EngineSpec) -> Result<f64, String> {
    match evaluate(dataset, spec, engine) {
        Ok(r) if r.converged() => Ok(r.value),
        Ok(r) => Err(format!("fixed point did not converge: {:?}", r.diagnostics)),
        Err(e) => Err(e.to_string()),
    }
}

/// Replaces the birth and death observations at base and current, keeping
/// the persistent data and all other periods as they are.
fn perturb(scenario: &Scenario, churned: &BTreeSet<ItemId>, rng: &mut ChaCha8Rng) -> Dataset {
    let (base, current) = (scenario.spec.base, scenario.spec.current);
    scenario
        .dataset
        .map_observations(|period, id, obs| {
            if (period == base || period == current) && churned.contains(id) {
                let price = obs.price * rng.random_range(-1.0f64..1.0).exp();
                let quantity = obs.quantity * rng.random_range(-1.0f64..1.0).exp();
                Some((id.clone(), Observation::new(price, quantity)))
            } else {
                Some((id.clone(), obs))
            }
        })
        .expect("perturbation keeps observations positive")
}

pub fn check(test: TestId, engine: &EngineSpec, scenario: &Scenario, tolerance: f64) -> Verdict {
    check_with(
        test,
        engine,
        scenario,
        &CheckConfig {
            tolerance,
            ..Default::default()
        },
    )
}

/// Evaluates `engine` on `scenario` and decides `test`.
///
/// Equality tests compare on the log scale. The responsiveness tests can only
/// witness failure: they fail when no perturbation of the birth and death
/// data moves the index (T5) or away from 1 (t5).
pub fn check_with(test: TestId, engine: &EngineSpec, scenario: &Scenario, config: &CheckConfig) -> Verdict {
    let tol = config.tolerance;
    let verdict = |outcome, value, target, detail: String| Verdict {
        test,
        engine: engine.label(),
        outcome,
        witness: Witness {
            seed: scenario.seed,
            value,
            target,
            detail,
        },
        tolerance: tol,
    };
    if let Err(why) = precondition_holds(test, &scenario.dataset, &scenario.spec) {
        return verdict(Outcome::Inapplicable, None, None, why);
    }
    let spec = &scenario.spec;
    let value = match index_value(&scenario.dataset, spec, engine) {
        Ok(v) => v,
        Err(e) => return verdict(Outcome::EngineError, None, None, e),
    };
    let log_p = value.ln();
    let decide = |ok: bool, target: f64, what: &str| {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        verdict(outcome, Some(value), Some(target), format!("{what}: P = {value:.12}"))
    };
    match test {
        TestId::Identity => decide(log_p.abs() <= tol, 1.0, "P = 1 required"),
        TestId::FixedBasket => {
            let v = value_ratio(&scenario.dataset, spec.base, spec.current).expect("periods checked");
            decide((log_p - v.ln()).abs() <= tol, v, &format!("P = V = {v:.12} required"))
        }
        TestId::UpperBound | TestId::SharpUpper => decide(log_p <= tol, 1.0, "P <= 1 required"),
        TestId::LowerBound | TestId::SharpLower => decide(log_p >= -tol, 1.0, "P >= 1 required"),
        TestId::Responsiveness | TestId::SharpResponsiveness => {
            let split = universe_algebra(&scenario.dataset, spec.base, spec.current).expect("periods checked");
            let churned: BTreeSet<ItemId> = split.births.union(&split.deaths).cloned().collect();
            let anchor = if test == TestId::Responsiveness { log_p } else { 0.0 };
            if (log_p - anchor).abs() > tol {
                return verdict(Outcome::Pass, Some(value), Some(1.0), format!("P = {value:.12} differs from 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed ^ 0x7e57_5eed_0000_0005);
            let mut widest: f64 = 0.0;
            for k in 0..config.perturbations {
                let data = perturb(scenario, &churned, &mut rng);
                let moved = match index_value(&data, spec, engine) {
                    Ok(v) => v.ln() - anchor,
                    Err(e) => {
                        return verdict(Outcome::EngineError, Some(value), None, format!("perturbation {k}: {e}"))
                    }
                };
                widest = widest.max(moved.abs());
                if moved.abs() > tol {
                    return verdict(
                        Outcome::Pass,
                        Some(value),
                        None,
                        format!("no reduction detected: perturbation {k} moved log P by {moved:.3e}"),
                    );
                }
            }
            let what = if test == TestId::Responsiveness {
                "index unchanged"
            } else {
                "index pinned at 1"
            };
            verdict(
                Outcome::Fail,
                Some(value),
                Some(if test == TestId::Responsiveness { value } else { 1.0 }),
                format!(
                    "{what} across {} perturbations of birth/death data (max |log change| {widest:.3e})",
                    config.perturbations
                ),
            )
        }
    }
}
