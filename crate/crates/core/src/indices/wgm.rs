//! Weighted geometric mean indices: the Törnqvist index on a fixed universe
//! and the TPD index, whose reference prices are solved with the series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IndexResult;
use crate::error::{IndexError, Result};
use crate::frame::Frame;
use crate::model::{ComparisonSpec, Dataset, ItemId};
use crate::reference::{
    frame_prices, solve_fixed_point, CoupledSystem, FixedPointConfig, ReferencePriceScheme, ReferencePrices,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightScheme {
    /// Expenditure share of the item within its own period.
    ExpenditureShare,
    /// Mean of base and current shares; fixed universe only.
    TornqvistSymmetric,
    /// Explicit base-period and current-period weights, each summing to 1.
    Custom {
        base: BTreeMap<ItemId, f64>,
        current: BTreeMap<ItemId, f64>,
    },
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExpenditureShare => "share",
            Self::TornqvistSymmetric => "tornqvist",
            Self::Custom { .. } => "custom",
        }
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// (item, weight) pairs over the universe at `pos`.
fn weights(frame: &Frame<'_>, scheme: &WeightScheme, pos: usize) -> Result<Vec<(usize, f64)>> {
    let share = |pos: usize| -> Vec<(usize, f64)> {
        let total = frame.total(pos);
        frame
            .members(pos)
            .iter()
            .map(|&(k, o)| (k, o.expenditure() / total))
            .collect()
    };
    match scheme {
        WeightScheme::ExpenditureShare => Ok(share(pos)),
        WeightScheme::TornqvistSymmetric => {
            let (b, c) = (frame.base(), frame.current());
            if pos != b && pos != c {
                return Err(IndexError::Unsupported(
                    "Tornqvist weights exist only at the base and current periods".into(),
                ));
            }
            let base = share(b);
            let current = share(c);
            let same = base.len() == current.len() && base.iter().zip(&current).all(|(x, y)| x.0 == y.0);
            if !same {
                return Err(IndexError::Unsupported(
                    "Tornqvist weights need a fixed universe".into(),
                ));
            }
            Ok(base
                .iter()
                .zip(&current)
                .map(|(&(k, s0), &(_, st))| (k, 0.5 * (s0 + st)))
                .collect())
        }
        WeightScheme::Custom { base, current } => {
            let map = if pos == frame.base() {
                base
            } else if pos == frame.current() {
                current
            } else {
                return Err(IndexError::Unsupported(
                    "custom weights exist only at the base and current periods".into(),
                ));
            };
            let out = frame
                .members(pos)
                .iter()
                .map(|&(k, _)| match map.get(frame.item(k)) {
                    Some(&w) if w >= 0.0 => Ok((k, w)),
                    _ => Err(IndexError::InvalidWeights(format!("no weight for item {}", frame.item(k)))),
                })
                .collect::<Result<Vec<_>>>()?;
            let sum: f64 = out.iter().map(|(_, w)| w).sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(IndexError::InvalidWeights(format!("weights sum to {sum}, not 1")));
            }
            Ok(out)
        }
    }
}

/// Log of the weighted geometric mean of price relatives at `pos`.
fn log_mean_relative(
    frame: &Frame<'_>,
    scheme: &WeightScheme,
    prices: &ReferencePrices,
    pos: usize,
) -> Result<f64> {
    weights(frame, scheme, pos)?
        .into_iter()
        .map(|(k, w)| {
            let o = frame.observation(k, pos).expect("member of period");
            Ok(w * (o.price / prices.require(frame, k)?).ln())
        })
        .sum()
}

fn log_wgm(frame: &Frame<'_>, scheme: &WeightScheme, prices: &ReferencePrices, from: usize, to: usize) -> Result<f64> {
    Ok(log_mean_relative(frame, scheme, prices, to)? - log_mean_relative(frame, scheme, prices, from)?)
}

struct WgmSystem<'f, 'a> {
    frame: &'f Frame<'a>,
    scheme: &'f ReferencePriceScheme,
    items: Vec<usize>,
}

impl CoupledSystem for WgmSystem<'_, '_> {
    fn len(&self) -> usize {
        self.frame.len()
    }

    fn base(&self) -> usize {
        self.frame.base()
    }

    fn reference_prices(&self, series: &[f64]) -> Result<ReferencePrices> {
        frame_prices(self.frame, self.scheme, &self.items, series)
    }

    fn index_series(&self, prices: &ReferencePrices) -> Result<Vec<f64>> {
        let shares = WeightScheme::ExpenditureShare;
        let anchor = log_mean_relative(self.frame, &shares, prices, self.frame.base())?;
        (0..self.frame.len())
            .map(|pos| Ok((log_mean_relative(self.frame, &shares, prices, pos)? - anchor).exp()))
            .collect()
    }
}

pub(crate) fn wgm_frame(
    frame: &Frame<'_>,
    weights: &WeightScheme,
    scheme: &ReferencePriceScheme,
    config: &FixedPointConfig,
) -> Result<IndexResult> {
    let (prices, diagnostics) = if scheme.is_index_coupled() {
        if *weights != WeightScheme::ExpenditureShare {
            return Err(IndexError::Unsupported(format!(
                "index-coupled reference prices need expenditure-share weights, not {}",
                weights.name()
            )));
        }
        let system = WgmSystem {
            frame,
            scheme,
            items: (0..frame.item_count()).collect(),
        };
        let fp = solve_fixed_point(&system, config)?;
        (fp.prices, Some(fp.report))
    } else {
        let unit = vec![1.0; frame.len()];
        (frame_prices(frame, scheme, &frame.comparison_items(), &unit)?, None)
    };
    let value = log_wgm(frame, weights, &prices, frame.base(), frame.current())?.exp();
    Ok(IndexResult {
        diagnostics,
        reference_prices: prices.by_item(frame),
        ..IndexResult::plain(value)
    })
}

/// WGM index; index-coupled reference prices are solved jointly.
pub fn wgm_index(
    dataset: &Dataset,
    spec: &ComparisonSpec,
    weights: &WeightScheme,
    scheme: &ReferencePriceScheme,
) -> Result<IndexResult> {
    wgm_frame(&Frame::from_spec(dataset, spec)?, weights, scheme, &FixedPointConfig::default())?.checked()
}

/// Time product dummy index.
pub fn tpd_index(dataset: &Dataset, spec: &ComparisonSpec) -> Result<IndexResult> {
    wgm_index(
        dataset,
        spec,
        &WeightScheme::ExpenditureShare,
        &ReferencePriceScheme::TpdGeometric,
    )
}
