//! Random datasets constructed to meet the precondition of one test.
//!
//! Base period 0 and current period `periods - 1` satisfy the precondition;
//! periods in between vary freely (random membership, prices and quantities),
//! which is what exposes multilateral engines.

use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::axioms::{ChurnSetting, TestId};
use crate::model::{ComparisonSpec, Dataset, DatasetBuilder, ItemId, Observation, Period, ReferencePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Size of the base-period universe.
    pub items: usize,
    /// Number of periods; the current period is the last.
    pub periods: usize,
    /// Births and deaths as a fraction of the base universe.
    pub churn: f64,
    pub price_range: (f64, f64),
    pub reference: ReferencePolicy,
    /// Direction of universe change for T5/t5 scenarios.
    pub setting: ChurnSetting,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            items: 6,
            periods: 3,
            churn: 0.3,
            price_range: (0.5, 5.0),
            reference: ReferencePolicy::Bilateral,
            setting: ChurnSetting::Mixed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetadata {
    pub births: usize,
    pub deaths: usize,
    pub churn: f64,
    /// Range of the persistent price relatives drawn for the current period.
    pub price_trend: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dataset: Dataset,
    pub spec: ComparisonSpec,
    pub test: TestId,
    pub seed: u64,
    pub params: ScenarioParams,
    pub metadata: ScenarioMetadata,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("infeasible scenario parameters: {0}")]
    Infeasible(String),
}

/// (births, deaths) for a test given the base universe size.
fn churn_counts(test: TestId, params: &ScenarioParams) -> Result<(usize, usize), ScenarioError> {
    let n = params.items;
    let k = (params.churn * n as f64).round() as usize;
    let strict = k.max(1);
    let need_two = |what: &str| {
        if n < 2 {
            Err(ScenarioError::Infeasible(format!("{what} needs at least 2 base items")))
        } else {
            Ok(())
        }
    };
    let setting = params.setting;
    Ok(match test {
        TestId::Identity | TestId::FixedBasket => (0, 0),
        TestId::UpperBound => (k, 0),
        TestId::SharpUpper => (strict, 0),
        TestId::LowerBound => (0, k.min(n - 1)),
        TestId::SharpLower => {
            need_two("a strictly shrinking universe")?;
            (0, strict.min(n - 1))
        }
        TestId::Responsiveness | TestId::SharpResponsiveness => match setting {
            ChurnSetting::Expanding => (strict, 0),
            ChurnSetting::Shrinking => {
                need_two("a strictly shrinking universe")?;
                (0, strict.min(n - 1))
            }
            ChurnSetting::Mixed => {
                need_two("births and deaths with a persistent item")?;
                (strict, strict.min(n - 1))
            }
        },
    })
}

/// Builds a scenario for `test`, deterministic in `seed`.
pub fn generate_scenario(test: TestId, seed: u64, params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    if params.items < 1 {
        return Err(ScenarioError::Infeasible("at least one base item".into()));
    }
    if params.periods < 2 {
        return Err(ScenarioError::Infeasible("at least two periods".into()));
    }
    if !(0.0..1.0).contains(&params.churn) {
        return Err(ScenarioError::Infeasible(format!("churn {} outside [0, 1)", params.churn)));
    }
    let (lo, hi) = params.price_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(ScenarioError::Infeasible(format!("price range ({lo}, {hi})")));
    }
    let (n_births, n_deaths) = churn_counts(test, params)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let current = (params.periods - 1) as Period;
    let mut builder = DatasetBuilder::default();

    let base: Vec<(ItemId, Observation)> = (0..params.items)
        .map(|i| {
            let obs = Observation::new(rng.random_range(lo..hi), rng.random_range(0.5..10.0));
            (ItemId::new(format!("i{i}")), obs)
        })
        .collect();
    for (id, obs) in &base {
        builder.insert(0, id.clone(), *obs);
    }

    let mut order: Vec<usize> = (0..base.len()).collect();
    order.shuffle(&mut rng);
    let dead: Vec<usize> = order[..n_deaths].to_vec();
    let births: Vec<(ItemId, f64)> = (0..n_births)
        .map(|j| (ItemId::new(format!("b{j}")), rng.random_range(lo..hi)))
        .collect();

    let trend = match test {
        TestId::UpperBound => (0.5, 1.0),
        TestId::LowerBound => (1.0, 2.0),
        TestId::FixedBasket | TestId::Responsiveness => ((-0.7f64).exp(), 0.7f64.exp()),
        _ => (1.0, 1.0),
    };
    let mut forced_strict = false;
    for (i, (id, o0)) in base.iter().enumerate() {
        if dead.contains(&i) {
            continue;
        }
        let factor = match test {
            TestId::UpperBound if !forced_strict => rng.random_range(0.5..0.95),
            TestId::LowerBound if !forced_strict => rng.random_range(1.05..2.0),
            _ if trend.0 < trend.1 => rng.random_range(trend.0..=trend.1),
            _ => 1.0,
        };
        forced_strict = true;
        let quantity = if test == TestId::FixedBasket {
            o0.quantity
        } else {
            rng.random_range(0.5..10.0)
        };
        builder.insert(current, id.clone(), Observation::new(o0.price * factor, quantity));
    }
    for (id, price) in &births {
        builder.insert(current, id.clone(), Observation::new(*price, rng.random_range(0.5..10.0)));
    }

    for r in 1..current {
        let mut any = false;
        let free = |builder: &mut DatasetBuilder, id: &ItemId, anchor: f64, rng: &mut ChaCha8Rng| {
            let price = anchor * rng.random_range(-1.0f64..1.0).exp();
            builder.insert(r, id.clone(), Observation::new(price, rng.random_range(0.1..20.0)));
        };
        for (id, o0) in &base {
            if rng.random_bool(0.7) {
                free(&mut builder, id, o0.price, &mut rng);
                any = true;
            }
        }
        for (id, price) in &births {
            if rng.random_bool(0.6) {
                free(&mut builder, id, *price, &mut rng);
                any = true;
            }
        }
        for j in 0..rng.random_range(0..3) {
            let anchor = rng.random_range(lo..hi);
            free(&mut builder, &ItemId::new(format!("m{r}_{j}")), anchor, &mut rng);
            any = true;
        }
        if !any {
            let (id, o0) = &base[0];
            free(&mut builder, id, o0.price, &mut rng);
        }
    }

    let dataset = builder
        .build()
        .map_err(|v| ScenarioError::Infeasible(format!("generated invalid data: {v:?}")))?;
    Ok(Scenario {
        dataset,
        spec: ComparisonSpec::new(0, current, params.reference),
        test,
        seed,
        params: *params,
        metadata: ScenarioMetadata {
            births: n_births,
            deaths: n_deaths,
            churn: params.churn,
            price_trend: trend,
        },
    })
}
