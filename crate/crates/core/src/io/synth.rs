//! Synthetic scanner data with item churn.
//!
//! Each item's log price follows a random walk with drift, optionally minus
//! a fixed per-period decline over its life. Every period a fixed number of
//! items die and the same number are born, priced around the mean log price
//! of the items alive.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::model::{Dataset, DatasetBuilder, ItemId, Observation, Period};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub periods: usize,
    pub initial_items: usize,
    /// Fraction of the items alive that are replaced each period.
    pub churn_rate: f64,
    /// Mean per-period change of log price.
    pub drift_mean: f64,
    /// Standard deviation of the per-period change of log price.
    pub drift_dispersion: f64,
    /// Extra per-period fall of log price over an item's life.
    pub lifecycle_decline: Option<f64>,
    pub initial_price: f64,
    /// Median quantity at birth.
    pub quantity_median: f64,
    /// Log-scale spread of quantities across items.
    pub quantity_dispersion: f64,
    /// Log-scale period-to-period noise in an item's quantity.
    pub quantity_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            periods: 5,
            initial_items: 20,
            churn_rate: 0.2,
            drift_mean: 0.0,
            drift_dispersion: 0.05,
            lifecycle_decline: None,
            initial_price: 10.0,
            quantity_median: 10.0,
            quantity_dispersion: 0.5,
            quantity_noise: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("infeasible synthetic configuration: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    /// Deaths over items alive, for each transition.
    pub realized_churn: Vec<f64>,
    pub mean_churn: f64,
    /// Mean change of log price over items present in consecutive periods.
    pub mean_log_price_change: f64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Infeasible(m));
        if self.periods < 1 || self.initial_items < 1 {
            return bad("periods and initial_items must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.churn_rate) {
            return bad(format!("churn rate {} outside [0, 1)", self.churn_rate));
        }
        if self.deaths_per_period() >= self.initial_items && self.periods > 1 {
            return bad(format!(
                "churn rate {} replaces all {} items each period",
                self.churn_rate, self.initial_items
            ));
        }
        let dispersions = [self.drift_dispersion, self.quantity_dispersion, self.quantity_noise];
        if dispersions.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return bad("dispersions must be finite and non-negative".into());
        }
        if !(self.initial_price > 0.0 && self.quantity_median > 0.0) {
            return bad("initial price and quantity median must be positive".into());
        }
        if !self.drift_mean.is_finite() || !self.lifecycle_decline.unwrap_or(0.0).is_finite() {
            return bad("drift and decline must be finite".into());
        }
        Ok(())
    }

    fn deaths_per_period(&self) -> usize {
        (self.churn_rate * self.initial_items as f64).round() as usize
    }
}

struct Alive {
    id: ItemId,
    log_price: f64,
    log_quantity: f64,
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("validated dispersion")
}

/// Generates a dataset; deterministic in `config.seed`.
pub fn synth(config: &SynthConfig) -> Result<(Dataset, SynthSummary), SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let drift = normal(config.drift_dispersion);
    let spread = normal(config.quantity_dispersion);
    let noise = normal(config.quantity_noise);
    let decline = config.lifecycle_decline.unwrap_or(0.0);
    let mut next_id = 0usize;
    let mut fresh = |rng: &mut ChaCha8Rng, log_price: f64| {
        next_id += 1;
        Alive {
            id: ItemId::new(format!("item{next_id:05}")),
            log_price,
            log_quantity: config.quantity_median.ln() + spread.sample(rng),
        }
    };

    let p0 = config.initial_price.ln();
    let mut alive: Vec<Alive> = (0..config.initial_items)
        .map(|_| {
            let lp = p0 + drift.sample(&mut rng);
            fresh(&mut rng, lp)
        })
        .collect();
    let mut builder = DatasetBuilder::default();
    let record = |builder: &mut DatasetBuilder, t: Period, alive: &[Alive], rng: &mut ChaCha8Rng| {
        for a in alive {
            let q = (a.log_quantity + noise.sample(rng)).exp();
            builder.insert(t, a.id.clone(), Observation::new(a.log_price.exp(), q));
        }
    };
    record(&mut builder, 0, &alive, &mut rng);

    let deaths = config.deaths_per_period();
    let mut realized = Vec::new();
    let (mut change_sum, mut change_n) = (0.0, 0usize);
    for t in 1..config.periods as Period {
        let before = alive.len();
        let mut dead: Vec<usize> = sample(&mut rng, before, deaths).into_vec();
        dead.sort_unstable_by(|a, b| b.cmp(a));
        for i in dead {
            alive.swap_remove(i);
        }
        for a in &mut alive {
            let step = config.drift_mean + drift.sample(&mut rng) - decline;
            a.log_price += step;
            change_sum += step;
            change_n += 1;
        }
        let mean_log = if alive.is_empty() {
            p0
        } else {
            alive.iter().map(|a| a.log_price).sum::<f64>() / alive.len() as f64
        };
        for _ in 0..deaths {
            let lp = mean_log + drift.sample(&mut rng);
            let born = fresh(&mut rng, lp);
            alive.push(born);
        }
        // keep insertion order independent of the swap_remove shuffle
        alive.sort_by(|a, b| a.id.cmp(&b.id));
        realized.push(deaths as f64 / before as f64);
        record(&mut builder, t, &alive, &mut rng);
    }

    let dataset = builder
        .build()
        .map_err(|v| SynthError::Infeasible(format!("generated invalid data: {v:?}")))?;
    let mean_churn = if realized.is_empty() {
        0.0
    } else {
        realized.iter().sum::<f64>() / realized.len() as f64
    };
    Ok((
        dataset,
        SynthSummary {
            realized_churn: realized,
            mean_churn,
            mean_log_price_change: if change_n == 0 { 0.0 } else { change_sum / change_n as f64 },
        },
    ))
}
