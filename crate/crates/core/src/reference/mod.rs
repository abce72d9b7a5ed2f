//! Reference prices and reference quantities.
//!
//! Reference prices make the quantities of different items commensurable in
//! the GK, GUV and WGM families. Two schemes ([`ReferencePriceScheme::DeflatedUnitValue`]
//! and [`ReferencePriceScheme::TpdGeometric`]) depend on the index series
//! itself; engines using them are solved with [`solve_fixed_point`].

mod fixed_point;
pub(crate) mod quantity;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use fixed_point::{solve_fixed_point, CoupledSystem, FixedPoint, FixedPointConfig, FixedPointReport};
pub use quantity::{reference_quantity, ReferenceQuantityScheme};

use crate::error::{IndexError, Result};
use crate::frame::Frame;
use crate::model::{Dataset, ItemId, Period};

/// How the per-item reference price is formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReferencePriceScheme {
    /// Quantity-weighted unit value over the reference periods.
    LehrUnitValue,
    /// Quantity-weighted unit value of index-deflated prices.
    DeflatedUnitValue,
    /// Expenditure-share weighted geometric mean of index-deflated prices.
    TpdGeometric,
    /// Base-period price for items present at base, current price otherwise.
    FixedBase,
    Custom(BTreeMap<ItemId, f64>),
}

impl ReferencePriceScheme {
    /// True when the price depends on the index series being computed.
    pub fn is_index_coupled(&self) -> bool {
        matches!(self, Self::DeflatedUnitValue | Self::TpdGeometric)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::LehrUnitValue => "lehr",
            Self::DeflatedUnitValue => "deflated",
            Self::TpdGeometric => "tpd",
            Self::FixedBase => "fixed-base",
            Self::Custom(_) => "custom",
        }
    }
}

/// Reference prices over the items of a [`Frame`]; `None` where not computed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePrices(pub(crate) Vec<Option<f64>>);

impl ReferencePrices {
    pub fn get(&self, k: usize) -> Option<f64> {
        self.0.get(k).copied().flatten()
    }

    pub fn by_item(&self, frame: &Frame<'_>) -> BTreeMap<ItemId, f64> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.map(|p| (frame.item(k).clone(), p)))
            .collect()
    }

    pub(crate) fn require(&self, frame: &Frame<'_>, k: usize) -> Result<f64> {
        self.get(k)
            .ok_or_else(|| IndexError::ItemNotInReference(frame.item(k).clone()))
    }
}

fn unit_value(terms: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let (num, den) = terms.fold((0.0, 0.0), |(n, d), (p, q)| (n + p * q, d + q));
    (den > 0.0).then(|| num / den)
}

fn geometric(terms: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let (num, den) = terms.fold((0.0, 0.0), |(n, d), (p, w)| (n + w * p.ln(), d + w));
    (den > 0.0).then(|| (num / den).exp())
}

/// Reference price of item `k` within `frame`, given an index series aligned
/// with the frame's period positions.
pub(crate) fn frame_price(
    frame: &Frame<'_>,
    scheme: &ReferencePriceScheme,
    k: usize,
    series: &[f64],
) -> Result<f64> {
    let track = frame.track(k);
    let missing = || IndexError::ItemNotInReference(frame.item(k).clone());
    let price = match scheme {
        ReferencePriceScheme::LehrUnitValue => {
            unit_value(track.iter().map(|(_, o)| (o.price, o.quantity))).ok_or_else(missing)?
        }
        ReferencePriceScheme::DeflatedUnitValue => {
            unit_value(track.iter().map(|(pos, o)| (o.price / series[*pos], o.quantity))).ok_or_else(missing)?
        }
        ReferencePriceScheme::TpdGeometric => geometric(
            track
                .iter()
                .map(|(pos, o)| (o.price / series[*pos], o.expenditure() / frame.total(*pos))),
        )
        .ok_or_else(missing)?,
        ReferencePriceScheme::FixedBase => frame
            .observation(k, frame.base())
            .or_else(|| frame.observation(k, frame.current()))
            .map(|o| o.price)
            .ok_or(IndexError::InapplicableScheme {
                scheme: "fixed-base",
                item: frame.item(k).clone(),
            })?,
        ReferencePriceScheme::Custom(map) => match map.get(frame.item(k)) {
            Some(&p) if p > 0.0 && p.is_finite() => p,
            _ => return Err(IndexError::CustomMissing(frame.item(k).clone())),
        },
    };
    if price > 0.0 && price.is_finite() {
        Ok(price)
    } else {
        Err(IndexError::Degenerate(format!("reference price {price} for {}", frame.item(k))))
    }
}

/// Reference prices for the listed frame items.
pub(crate) fn frame_prices(
    frame: &Frame<'_>,
    scheme: &ReferencePriceScheme,
    items: &[usize],
    series: &[f64],
) -> Result<ReferencePrices> {
    let mut out = vec![None; frame.item_count()];
    for &k in items {
        out[k] = Some(frame_price(frame, scheme, k, series)?);
    }
    Ok(ReferencePrices(out))
}

/// Observations of `item` over `reference_periods`, with each period's total expenditure.
fn observations(
    dataset: &Dataset,
    item: &ItemId,
    reference_periods: &[Period],
) -> Result<Vec<(Period, f64, f64, f64)>> {
    let mut out = Vec::new();
    for &r in reference_periods {
        let pd = dataset.period(r)?;
        if let Some(o) = pd.get(item) {
            out.push((r, o.price, o.quantity, pd.expenditure()));
        }
    }
    if out.is_empty() {
        return Err(IndexError::ItemNotInReference(item.clone()));
    }
    Ok(out)
}

fn deflator(index_series: &BTreeMap<Period, f64>, r: Period) -> Result<f64> {
    match index_series.get(&r) {
        Some(&p) if p > 0.0 && p.is_finite() => Ok(p),
        _ => Err(IndexError::MissingIndexValue(r)),
    }
}

/// Quantity-weighted unit value of `item` over the periods where it is present.
pub fn lehr_price(dataset: &Dataset, item: &ItemId, reference_periods: &[Period]) -> Result<f64> {
    let obs = observations(dataset, item, reference_periods)?;
    Ok(unit_value(obs.iter().map(|&(_, p, q, _)| (p, q))).expect("non-empty"))
}

/// Quantity-weighted unit value of index-deflated prices.
pub fn deflated_price(
    dataset: &Dataset,
    item: &ItemId,
    reference_periods: &[Period],
    index_series: &BTreeMap<Period, f64>,
) -> Result<f64> {
    let obs = observations(dataset, item, reference_periods)?;
    let terms = obs
        .iter()
        .map(|&(r, p, q, _)| Ok((p / deflator(index_series, r)?, q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(unit_value(terms.into_iter()).expect("non-empty"))
}

/// Geometric mean of deflated prices with normalized expenditure-share exponents.
pub fn tpd_price(
    dataset: &Dataset,
    item: &ItemId,
    reference_periods: &[Period],
    index_series: &BTreeMap<Period, f64>,
) -> Result<f64> {
    let obs = observations(dataset, item, reference_periods)?;
    let terms = obs
        .iter()
        .map(|&(r, p, q, total)| Ok((p / deflator(index_series, r)?, p * q / total)))
        .collect::<Result<Vec<_>>>()?;
    Ok(geometric(terms.into_iter()).expect("non-empty"))
}
