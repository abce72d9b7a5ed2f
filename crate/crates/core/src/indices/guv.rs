//! Generalised unit value indices: the value ratio deflated by a
//! reference-price quantity index. GK and MGK are the members with deflated
//! and plain unit-value reference prices.

use super::{Decomposition, IndexResult};
use crate::error::Result;
use crate::frame::Frame;
use crate::model::{ComparisonSpec, Dataset};
use crate::reference::{
    frame_prices, solve_fixed_point, CoupledSystem, FixedPointConfig, ReferencePriceScheme, ReferencePrices,
};

/// Reference-price quantity index between two frame positions.
fn quantity_index(frame: &Frame<'_>, prices: &ReferencePrices, from: usize, to: usize) -> Result<f64> {
    let volume = |pos: usize| -> Result<f64> {
        frame
            .members(pos)
            .iter()
            .map(|&(k, o)| Ok(prices.require(frame, k)? * o.quantity))
            .sum()
    };
    Ok(volume(to)? / volume(from)?)
}

fn decompose(frame: &Frame<'_>, prices: &ReferencePrices) -> Result<Decomposition> {
    Ok(Decomposition {
        value_ratio: frame.value_ratio(),
        quantity_index: quantity_index(frame, prices, frame.base(), frame.current())?,
    })
}

struct GuvSystem<'f, 'a> {
    frame: &'f Frame<'a>,
    scheme: &'f ReferencePriceScheme,
    items: Vec<usize>,
}

impl CoupledSystem for GuvSystem<'_, '_> {
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
        let base = self.frame.base();
        (0..self.frame.len())
            .map(|pos| {
                let value = self.frame.total(pos) / self.frame.total(base);
                Ok(value / quantity_index(self.frame, prices, base, pos)?)
            })
            .collect()
    }
}

pub(crate) fn guv_frame(
    frame: &Frame<'_>,
    scheme: &ReferencePriceScheme,
    config: &FixedPointConfig,
) -> Result<IndexResult> {
    let (prices, diagnostics) = if scheme.is_index_coupled() {
        let system = GuvSystem {
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
    let decomposition = decompose(frame, &prices)?;
    Ok(IndexResult {
        value: decomposition.value_ratio / decomposition.quantity_index,
        diagnostics,
        decomposition: Some(decomposition),
        reference_prices: prices.by_item(frame),
        ..IndexResult::plain(f64::NAN)
    })
}

/// GUV index with the given reference-price scheme; index-coupled schemes are
/// solved jointly with the index series using the default solver settings.
pub fn guv_index(dataset: &Dataset, spec: &ComparisonSpec, scheme: &ReferencePriceScheme) -> Result<IndexResult> {
    guv_frame(&Frame::from_spec(dataset, spec)?, scheme, &FixedPointConfig::default())?.checked()
}

/// Geary-Khamis: GUV with index-deflated unit-value reference prices.
pub fn gk_index(dataset: &Dataset, spec: &ComparisonSpec) -> Result<IndexResult> {
    guv_index(dataset, spec, &ReferencePriceScheme::DeflatedUnitValue)
}

/// Modified GK: GUV with Lehr (undeflated unit-value) reference prices.
pub fn mgk_index(dataset: &Dataset, spec: &ComparisonSpec) -> Result<IndexResult> {
    guv_index(dataset, spec, &ReferencePriceScheme::LehrUnitValue)
}
