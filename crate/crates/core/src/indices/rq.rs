//! Reference-quantity (RQ) indices over the union universe with imputed
//! prices for births and deaths, and their geometric blend with GUV (RQP).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{guv, IndexResult, RqpComponents};
use crate::error::{IndexError, Result};
use crate::frame::Frame;
use crate::model::{ComparisonSpec, Dataset, ItemId};
use crate::reference::quantity::frame_quantity;
use crate::reference::{FixedPointConfig, ReferencePriceScheme, ReferencePrices, ReferenceQuantityScheme};

/// Prices supplied for items missing from one side of the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ImputationPolicy {
    /// A birth item gets base price `birth * current price`; a death item gets
    /// current price `death * base price`. Both markups must be at least 1.
    Markup { birth: f64, death: f64 },
    Custom {
        base: BTreeMap<ItemId, f64>,
        current: BTreeMap<ItemId, f64>,
    },
}

impl Default for ImputationPolicy {
    fn default() -> Self {
        ImputationPolicy::Markup {
            birth: 1.05,
            death: 1.05,
        }
    }
}

impl fmt::Display for ImputationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Markup { birth, death } => write!(f, "markup({birth},{death})"),
            Self::Custom { .. } => write!(f, "custom"),
        }
    }
}

impl ImputationPolicy {
    pub fn validate(&self) -> Result<()> {
        if let Self::Markup { birth, death } = self {
            if !(*birth >= 1.0 && *death >= 1.0 && birth.is_finite() && death.is_finite()) {
                return Err(IndexError::InvalidConfig(format!(
                    "imputation markups must be at least 1, got birth={birth} death={death}"
                )));
            }
        }
        Ok(())
    }

    fn base_price(&self, item: &ItemId, current_price: f64) -> Result<f64> {
        match self {
            Self::Markup { birth, .. } => Ok(birth * current_price),
            Self::Custom { base, .. } => positive(base.get(item), "base", item),
        }
    }

    fn current_price(&self, item: &ItemId, base_price: f64) -> Result<f64> {
        match self {
            Self::Markup { death, .. } => Ok(death * base_price),
            Self::Custom { current, .. } => positive(current.get(item), "current", item),
        }
    }
}

fn positive(v: Option<&f64>, side: &'static str, item: &ItemId) -> Result<f64> {
    match v {
        Some(&p) if p > 0.0 && p.is_finite() => Ok(p),
        _ => Err(IndexError::MissingImputation {
            side,
            item: item.clone(),
        }),
    }
}

/// Settings for the RQ side of an index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqConfig {
    pub quantity: ReferenceQuantityScheme,
    pub imputation: ImputationPolicy,
    /// Reference prices used by [`ReferenceQuantityScheme::ExpenditureOverReferencePrice`].
    pub reference_price: ReferencePriceScheme,
}

impl Default for RqConfig {
    fn default() -> Self {
        RqConfig {
            quantity: ReferenceQuantityScheme::ArithmeticMean,
            imputation: ImputationPolicy::default(),
            reference_price: ReferencePriceScheme::LehrUnitValue,
        }
    }
}

pub(crate) fn rq_frame(frame: &Frame<'_>, config: &RqConfig, fp: &FixedPointConfig) -> Result<IndexResult> {
    config.imputation.validate()?;
    let prices = if config.quantity.needs_reference_prices() {
        let guv = guv::guv_frame(frame, &config.reference_price, fp)?;
        let mut v = vec![None; frame.item_count()];
        for (id, p) in &guv.reference_prices {
            if let Some(k) = frame.item_index(id) {
                v[k] = Some(*p);
            }
        }
        Some(ReferencePrices(v))
    } else {
        None
    };

    let (mut at_current, mut at_base) = (0.0, 0.0);
    for k in frame.comparison_items() {
        let item = frame.item(k);
        let q = frame_quantity(frame, &config.quantity, k, prices.as_ref())?;
        let (p0, pt) = match (frame.observation(k, frame.base()), frame.observation(k, frame.current())) {
            (Some(o0), Some(ot)) => (o0.price, ot.price),
            (None, Some(ot)) => (config.imputation.base_price(item, ot.price)?, ot.price),
            (Some(o0), None) => (o0.price, config.imputation.current_price(item, o0.price)?),
            (None, None) => unreachable!("comparison items are present at base or current"),
        };
        at_current += q * pt;
        at_base += q * p0;
    }
    Ok(IndexResult::plain(at_current / at_base))
}

pub(crate) fn rqp_frame(
    frame: &Frame<'_>,
    alpha: f64,
    rq: &RqConfig,
    guv_price: &ReferencePriceScheme,
    fp: &FixedPointConfig,
) -> Result<IndexResult> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(IndexError::InvalidConfig(format!("alpha {alpha} outside [0, 1]")));
    }
    let rq_value = if alpha < 1.0 {
        Some(rq_frame(frame, rq, fp)?.value)
    } else {
        None
    };
    let guv_result = if alpha > 0.0 {
        Some(guv::guv_frame(frame, guv_price, fp)?)
    } else {
        None
    };
    let guv_value = guv_result.as_ref().map(|r| r.value);
    let value = match (rq_value, guv_value) {
        (Some(rq), Some(guv)) => rq.powf(1.0 - alpha) * guv.powf(alpha),
        (Some(rq), None) => rq,
        (None, Some(guv)) => guv,
        (None, None) => unreachable!("alpha lies in [0, 1]"),
    };
    let mut result = match guv_result {
        // alpha = 1 reproduces the GUV result exactly, decomposition included
        Some(r) if alpha == 1.0 => r,
        Some(r) => IndexResult {
            diagnostics: r.diagnostics,
            reference_prices: r.reference_prices,
            ..IndexResult::plain(value)
        },
        None => IndexResult::plain(value),
    };
    result.components = Some(RqpComponents {
        alpha,
        rq: rq_value,
        guv: guv_value,
    });
    Ok(result)
}

/// RQ index with the given basket quantities and imputation.
pub fn rq_index(
    dataset: &Dataset,
    spec: &ComparisonSpec,
    quantity: &ReferenceQuantityScheme,
    imputation: &ImputationPolicy,
) -> Result<IndexResult> {
    let config = RqConfig {
        quantity: quantity.clone(),
        imputation: imputation.clone(),
        ..RqConfig::default()
    };
    rq_frame(&Frame::from_spec(dataset, spec)?, &config, &FixedPointConfig::default())?.checked()
}

/// RQ^(1 - alpha) * GUV^alpha.
pub fn rqp_index(
    dataset: &Dataset,
    spec: &ComparisonSpec,
    alpha: f64,
    rq: &RqConfig,
    guv_price: &ReferencePriceScheme,
) -> Result<IndexResult> {
    rqp_frame(
        &Frame::from_spec(dataset, spec)?,
        alpha,
        rq,
        guv_price,
        &FixedPointConfig::default(),
    )?
    .checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::{classical_indices, guv_index};
    use crate::model::fixtures::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn birth_markup_pushes_index_below_one() {
        let d = Dataset::builder()
            .observe(0, "A", 1.0, 1.0)
            .observe(1, "A", 1.0, 1.0)
            .observe(1, "B", 2.0, 1.0)
            .build()
            .unwrap();
        let r = rq_index(
            &d,
            &ComparisonSpec::bilateral(0, 1),
            &ReferenceQuantityScheme::CurrentQuantity,
            &ImputationPolicy::default(),
        )
        .unwrap();
        close(r.value, 3.0 / 3.1, 1e-15);
        assert!(r.value < 1.0);
    }

    #[test]
    fn base_quantity_is_laspeyres() {
        let rb = ComparisonSpec::bilateral(0, 1);
        let r = rq_index(&small_fixed(), &rb, &ReferenceQuantityScheme::BaseQuantity, &ImputationPolicy::default());
        close(r.unwrap().value, 1.5, 1e-15);
        let d = Dataset::builder()
            .observe(0, "A", 1.0, 3.0)
            .observe(0, "B", 2.0, 1.0)
            .observe(1, "A", 1.5, 2.0)
            .observe(1, "B", 1.8, 4.0)
            .build()
            .unwrap();
        let r = rq_index(&d, &rb, &ReferenceQuantityScheme::BaseQuantity, &ImputationPolicy::default()).unwrap();
        close(r.value, classical_indices(&d, 0, 1).unwrap().laspeyres, 1e-15);
    }

    #[test]
    fn rqp_endpoints_and_fisher() {
        let rb = ComparisonSpec::bilateral(0, 1);
        let d = small_dyn();
        let rq = RqConfig::default();
        let lehr = ReferencePriceScheme::LehrUnitValue;
        let one = rqp_index(&d, &rb, 1.0, &rq, &lehr).unwrap();
        let guv = guv_index(&d, &rb, &lehr).unwrap();
        assert_eq!(one.value, guv.value);
        assert_eq!(one.decomposition, guv.decomposition);

        let zero = rqp_index(&d, &rb, 0.0, &rq, &lehr).unwrap();
        let plain = rq_index(&d, &rb, &rq.quantity, &rq.imputation).unwrap();
        assert_eq!(zero.value, plain.value);

        let laspeyres_rq = RqConfig {
            quantity: ReferenceQuantityScheme::BaseQuantity,
            ..RqConfig::default()
        };
        let fisher = rqp_index(&small_fixed(), &rb, 0.5, &laspeyres_rq, &ReferencePriceScheme::FixedBase).unwrap();
        close(fisher.value, 1.5, 1e-15);
        let c = fisher.components.unwrap();
        assert_eq!(c.alpha, 0.5);
        assert!(c.rq.is_some() && c.guv.is_some());
    }

    #[test]
    fn invalid_inputs() {
        let rb = ComparisonSpec::bilateral(0, 1);
        let low = ImputationPolicy::Markup { birth: 0.9, death: 1.0 };
        assert!(matches!(
            rq_index(&small_dyn(), &rb, &ReferenceQuantityScheme::ArithmeticMean, &low),
            Err(IndexError::InvalidConfig(_))
        ));
        assert!(matches!(
            rqp_index(&small_dyn(), &rb, 1.5, &RqConfig::default(), &ReferencePriceScheme::LehrUnitValue),
            Err(IndexError::InvalidConfig(_))
        ));
        let custom = ImputationPolicy::Custom {
            base: BTreeMap::new(),
            current: BTreeMap::new(),
        };
        assert!(matches!(
            rq_index(&small_dyn(), &rb, &ReferenceQuantityScheme::ArithmeticMean, &custom),
            Err(IndexError::MissingImputation { .. })
        ));
    }

    #[test]
    fn expenditure_over_reference_price_quantities() {
        let rb = ComparisonSpec::bilateral(0, 1);
        // fixed universe with q0 = qt: quantities recover the common basket, so RQ = V
        let d = Dataset::builder()
            .observe(0, "A", 1.0, 3.0)
            .observe(0, "B", 2.0, 1.0)
            .observe(1, "A", 1.5, 3.0)
            .observe(1, "B", 1.8, 1.0)
            .build()
            .unwrap();
        let r = rq_index(
            &d,
            &rb,
            &ReferenceQuantityScheme::ExpenditureOverReferencePrice,
            &ImputationPolicy::default(),
        )
        .unwrap();
        close(r.value, crate::model::value_ratio(&d, 0, 1).unwrap(), 1e-14);
    }
}
