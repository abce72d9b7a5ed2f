use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ReferencePrices;
use crate::error::{IndexError, Result};
use crate::frame::Frame;
use crate::model::{ComparisonSpec, Dataset, ItemId};

/// How the per-item basket quantity of the RQ family is formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReferenceQuantityScheme {
    BaseQuantity,
    CurrentQuantity,
    /// Mean quantity over the reference periods where the item is present.
    ArithmeticMean,
    /// Mean expenditure over the reference periods divided by the reference price.
    ExpenditureOverReferencePrice,
    Custom(BTreeMap<ItemId, f64>),
}

impl ReferenceQuantityScheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::BaseQuantity => "base",
            Self::CurrentQuantity => "current",
            Self::ArithmeticMean => "mean",
            Self::ExpenditureOverReferencePrice => "expenditure",
            Self::Custom(_) => "custom",
        }
    }

    pub fn needs_reference_prices(&self) -> bool {
        matches!(self, Self::ExpenditureOverReferencePrice)
    }
}

pub(crate) fn frame_quantity(
    frame: &Frame<'_>,
    scheme: &ReferenceQuantityScheme,
    k: usize,
    prices: Option<&ReferencePrices>,
) -> Result<f64> {
    let inapplicable = || IndexError::InapplicableScheme {
        scheme: scheme.name(),
        item: frame.item(k).clone(),
    };
    let track = frame.track(k);
    let mean = |f: fn(&crate::model::Observation) -> f64| {
        if track.is_empty() {
            None
        } else {
            Some(track.iter().map(|(_, o)| f(o)).sum::<f64>() / track.len() as f64)
        }
    };
    let q = match scheme {
        ReferenceQuantityScheme::BaseQuantity => frame
            .observation(k, frame.base())
            .map(|o| o.quantity)
            .ok_or_else(inapplicable)?,
        ReferenceQuantityScheme::CurrentQuantity => frame
            .observation(k, frame.current())
            .map(|o| o.quantity)
            .ok_or_else(inapplicable)?,
        ReferenceQuantityScheme::ArithmeticMean => mean(|o| o.quantity).ok_or_else(inapplicable)?,
        ReferenceQuantityScheme::ExpenditureOverReferencePrice => {
            let price = prices.and_then(|p| p.get(k)).ok_or_else(inapplicable)?;
            mean(|o| o.expenditure()).ok_or_else(inapplicable)? / price
        }
        ReferenceQuantityScheme::Custom(map) => match map.get(frame.item(k)) {
            Some(&q) => q,
            None => return Err(IndexError::CustomMissing(frame.item(k).clone())),
        },
    };
    if q > 0.0 && q.is_finite() {
        Ok(q)
    } else {
        Err(IndexError::Degenerate(format!("reference quantity {q} for {}", frame.item(k))))
    }
}

/// Reference quantity of `item` for the comparison `spec`.
///
/// `reference_prices` is consulted only by
/// [`ReferenceQuantityScheme::ExpenditureOverReferencePrice`].
pub fn reference_quantity(
    dataset: &Dataset,
    scheme: &ReferenceQuantityScheme,
    item: &ItemId,
    spec: &ComparisonSpec,
    reference_prices: &BTreeMap<ItemId, f64>,
) -> Result<f64> {
    let frame = Frame::from_spec(dataset, spec)?;
    let k = frame
        .item_index(item)
        .ok_or_else(|| IndexError::ItemNotInReference(item.clone()))?;
    let mut prices = vec![None; frame.item_count()];
    if let Some(&p) = reference_prices.get(item) {
        prices[k] = Some(p);
    }
    frame_quantity(&frame, scheme, k, Some(&ReferencePrices(prices)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn quantity_examples() {
        let none = BTreeMap::new();
        let bilateral = ComparisonSpec::bilateral(0, 1);
        let a = ItemId::from("A");
        assert_eq!(
            reference_quantity(&small_fixed(), &ReferenceQuantityScheme::BaseQuantity, &a, &bilateral, &none),
            Ok(1.0)
        );
        assert_eq!(
            reference_quantity(&small_dyn(), &ReferenceQuantityScheme::ArithmeticMean, &a, &bilateral, &none),
            Ok(1.0)
        );
        let lehr = [(a.clone(), 1.5)].into();
        let q = reference_quantity(
            &small_fixed(),
            &ReferenceQuantityScheme::ExpenditureOverReferencePrice,
            &a,
            &bilateral,
            &lehr,
        )
        .unwrap();
        assert!((q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn base_quantity_rejects_births() {
        let err = reference_quantity(
            &small_dyn(),
            &ReferenceQuantityScheme::BaseQuantity,
            &"C".into(),
            &ComparisonSpec::bilateral(0, 1),
            &BTreeMap::new(),
        )
        .unwrap_err();
        assert!(matches!(err, IndexError::InapplicableScheme { scheme: "base", .. }));
    }
}
