//! Randomized search for witnessed failures.

use serde::{Deserialize, Serialize};

use super::axioms::{ChurnSetting, TestId};
use super::check::{check, Outcome, Verdict};
use super::matrix::trial_seed;
use super::scenario::{generate_scenario, ScenarioParams};
use crate::indices::{evaluate, EngineSpec, Family};
use crate::model::{ComparisonSpec, Dataset, ReferencePolicy};

/// Scenario parameters the search uses by default: GEKS gets a three-period
/// full window, everything else a bilateral comparison.
pub fn default_search_params(engine: &EngineSpec) -> ScenarioParams {
    let reference = if matches!(engine.family, Family::Geks(_)) {
        ReferencePolicy::FullHistory
    } else {
        ReferencePolicy::Bilateral
    };
    ScenarioParams {
        reference,
        ..Default::default()
    }
}

/// First failing verdict over `budget` seeded scenarios, or `None`.
pub fn find_counterexample(
    engine: &EngineSpec,
    test: TestId,
    budget: usize,
    seed: u64,
    params: &ScenarioParams,
    tolerance: f64,
) -> Option<Verdict> {
    (0..budget.max(1)).find_map(|trial| {
        let scenario = generate_scenario(test, trial_seed(seed, test, 0, trial), params).ok()?;
        let verdict = check(test, engine, &scenario, tolerance);
        (verdict.outcome == Outcome::Fail).then_some(verdict)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityProbe {
    pub items: usize,
    pub churn: f64,
    /// Smallest log discrepancy that counts as a witness.
    pub threshold: f64,
}

impl Default for TransitivityProbe {
    fn default() -> Self {
        TransitivityProbe {
            items: 5,
            churn: 0.2,
            threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityWitness {
    pub seed: u64,
    /// Disseminated index from 0 to 2.
    pub direct: f64,
    /// Disseminated 0 to 1 times disseminated 1 to 2.
    pub chained: f64,
    /// |ln direct − ln chained|.
    pub discrepancy: f64,
    #[serde(skip)]
    pub dataset: Option<Dataset>,
}

/// Log discrepancy between the direct and chained disseminated indices over
/// periods 0, 1, 2 of `dataset`, each computed on the window ending at its
/// current period.
pub fn chain_discrepancy(engine: &EngineSpec, dataset: &Dataset) -> crate::Result<(f64, f64)> {
    let value = |base, current| -> crate::Result<f64> {
        Ok(evaluate(dataset, &ComparisonSpec::full_history(base, current), engine)?.value)
    };
    let direct = value(0, 2)?;
    let chained = value(0, 1)? * value(1, 2)?;
    Ok((direct, chained))
}

/// Searches three-period datasets with births and deaths for a chain
/// discrepancy above the probe threshold. Not a pass/fail test: it only
/// reports a witness when one is found.
pub fn probe_transitivity(
    engine: &EngineSpec,
    budget: usize,
    seed: u64,
    probe: &TransitivityProbe,
) -> Option<TransitivityWitness> {
    let params = ScenarioParams {
        items: probe.items,
        periods: 3,
        churn: probe.churn,
        reference: ReferencePolicy::FullHistory,
        setting: ChurnSetting::Mixed,
        ..Default::default()
    };
    (0..budget.max(1)).find_map(|trial| {
        let s = trial_seed(seed, TestId::Responsiveness, 7, trial);
        let scenario = generate_scenario(TestId::Responsiveness, s, &params).ok()?;
        let (direct, chained) = chain_discrepancy(engine, &scenario.dataset).ok()?;
        let discrepancy = (direct.ln() - chained.ln()).abs();
        (discrepancy > probe.threshold).then_some(TransitivityWitness {
            seed: s,
            direct,
            chained,
            discrepancy,
            dataset: Some(scenario.dataset),
        })
    })
}
