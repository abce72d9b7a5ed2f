//! Fixed-universe bilateral indices over the persistent items.

use serde::{Deserialize, Serialize};

use super::IndexResult;
use crate::error::{IndexError, Result};
use crate::model::{Dataset, Observation, Period};
use crate::reference::{solve_fixed_point, CoupledSystem, FixedPointConfig, ReferencePrices};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalIndices {
    pub laspeyres: f64,
    pub paasche: f64,
    pub fisher: f64,
}

fn matched(dataset: &Dataset, base: Period, current: Period) -> Result<Vec<(Observation, Observation)>> {
    let b = dataset.period(base)?;
    let c = dataset.period(current)?;
    let pairs: Vec<_> = b
        .items
        .iter()
        .filter_map(|(id, o0)| c.get(id).map(|ot| (*o0, *ot)))
        .collect();
    if pairs.is_empty() {
        return Err(IndexError::EmptyPersistentUniverse);
    }
    Ok(pairs)
}

/// Laspeyres, Paasche and Fisher indices over the persistent universe.
pub fn classical_indices(dataset: &Dataset, base: Period, current: Period) -> Result<ClassicalIndices> {
    let pairs = matched(dataset, base, current)?;
    let sum = |f: &dyn Fn(&(Observation, Observation)) -> f64| pairs.iter().map(f).sum::<f64>();
    let laspeyres = sum(&|(o0, ot)| o0.quantity * ot.price) / sum(&|(o0, _)| o0.quantity * o0.price);
    let paasche = sum(&|(_, ot)| ot.quantity * ot.price) / sum(&|(o0, ot)| ot.quantity * o0.price);
    Ok(ClassicalIndices {
        laspeyres,
        paasche,
        fisher: (laspeyres * paasche).sqrt(),
    })
}

/// Laspeyres with current prices deflated by the index itself:
/// `P = sum(q0 * pt / P) / sum(q0 * p0)`.
struct AdjustedLaspeyres {
    pairs: Vec<(Observation, Observation)>,
}

impl CoupledSystem for AdjustedLaspeyres {
    fn len(&self) -> usize {
        2
    }

    fn base(&self) -> usize {
        0
    }

    fn reference_prices(&self, series: &[f64]) -> Result<ReferencePrices> {
        Ok(ReferencePrices(
            self.pairs.iter().map(|(_, ot)| Some(ot.price / series[1])).collect(),
        ))
    }

    fn index_series(&self, prices: &ReferencePrices) -> Result<Vec<f64>> {
        let num: f64 = self
            .pairs
            .iter()
            .enumerate()
            .map(|(k, (o0, _))| o0.quantity * prices.get(k).expect("one price per pair"))
            .sum();
        let den: f64 = self.pairs.iter().map(|(o0, _)| o0.quantity * o0.price).sum();
        Ok(vec![1.0, num / den])
    }
}

/// Constant-value adjusted Laspeyres index, solved as a fixed point.
///
/// The undamped recursion oscillates between 1 and the Laspeyres value; use a
/// damping below 1 (0.5 lands on the fixed point in one step).
pub fn adjusted_laspeyres(
    dataset: &Dataset,
    base: Period,
    current: Period,
    config: &FixedPointConfig,
) -> Result<IndexResult> {
    let system = AdjustedLaspeyres {
        pairs: matched(dataset, base, current)?,
    };
    let fp = solve_fixed_point(&system, config)?;
    IndexResult {
        diagnostics: Some(fp.report),
        ..IndexResult::plain(fp.series[1])
    }
    .checked()
}
