//! Index engines.
//!
//! Every engine works on a [`Frame`]: the base and current periods plus the
//! reference periods chosen by a [`ComparisonSpec`]. [`EngineSpec`] bundles a
//! family with its scheme choices so engines can be passed around as values
//! (the GEKS inner engine, the rows of a verdict matrix, CLI arguments).

mod classical;
mod geks;
mod guv;
mod rq;
mod wgm;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use classical::{adjusted_laspeyres, classical_indices, ClassicalIndices};
pub use geks::geks_index;
pub use guv::{gk_index, guv_index, mgk_index};
pub use rq::{rq_index, rqp_index, ImputationPolicy, RqConfig};
pub use wgm::{tpd_index, wgm_index, WeightScheme};

use crate::error::{IndexError, Result};
use crate::frame::Frame;
use crate::model::{ComparisonSpec, Dataset, ItemId, Period};
use crate::reference::{FixedPointConfig, FixedPointReport, ReferencePriceScheme, ReferenceQuantityScheme};

/// Value ratio and the quantity index that deflates it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub value_ratio: f64,
    pub quantity_index: f64,
}

/// The two sub-indices blended by RQP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RqpComponents {
    pub alpha: f64,
    pub rq: Option<f64>,
    pub guv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub value: f64,
    pub diagnostics: Option<FixedPointReport>,
    pub decomposition: Option<Decomposition>,
    pub components: Option<RqpComponents>,
    /// GEKS only: the disseminated value for each period, as computed at that period.
    pub series: Option<Vec<(Period, f64)>>,
    pub reference_prices: BTreeMap<ItemId, f64>,
}

impl IndexResult {
    pub fn plain(value: f64) -> Self {
        IndexResult {
            value,
            diagnostics: None,
            decomposition: None,
            components: None,
            series: None,
            reference_prices: BTreeMap::new(),
        }
    }

    /// False only when a fixed-point solve ran out of iterations.
    pub fn converged(&self) -> bool {
        self.diagnostics.is_none_or(|d| d.converged)
    }

    pub(crate) fn checked(self) -> Result<Self> {
        if self.value > 0.0 && self.value.is_finite() {
            Ok(self)
        } else {
            Err(IndexError::Degenerate(format!("index value {}", self.value)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// GUV with deflated unit-value reference prices, solved jointly.
    Gk,
    /// GUV with Lehr reference prices.
    Mgk,
    Guv,
    Wgm,
    Tornqvist,
    /// WGM with TPD reference prices and expenditure-share weights, solved jointly.
    Tpd,
    Geks(Box<EngineSpec>),
    Rq,
    Rqp,
}

/// An index family with all of its scheme choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    pub family: Family,
    pub reference_price: ReferencePriceScheme,
    pub reference_quantity: ReferenceQuantityScheme,
    pub alpha: f64,
    pub imputation: ImputationPolicy,
    pub weights: WeightScheme,
    pub fixed_point: FixedPointConfig,
}

impl EngineSpec {
    fn with_family(family: Family) -> Self {
        EngineSpec {
            family,
            reference_price: ReferencePriceScheme::LehrUnitValue,
            reference_quantity: ReferenceQuantityScheme::ArithmeticMean,
            alpha: 0.5,
            imputation: ImputationPolicy::default(),
            weights: WeightScheme::ExpenditureShare,
            fixed_point: FixedPointConfig::default(),
        }
    }

    pub fn gk() -> Self {
        Self {
            reference_price: ReferencePriceScheme::DeflatedUnitValue,
            ..Self::with_family(Family::Gk)
        }
    }

    pub fn mgk() -> Self {
        Self::with_family(Family::Mgk)
    }

    pub fn guv(reference_price: ReferencePriceScheme) -> Self {
        Self {
            reference_price,
            ..Self::with_family(Family::Guv)
        }
    }

    pub fn wgm(weights: WeightScheme, reference_price: ReferencePriceScheme) -> Self {
        Self {
            weights,
            reference_price,
            ..Self::with_family(Family::Wgm)
        }
    }

    pub fn tornqvist() -> Self {
        Self {
            weights: WeightScheme::TornqvistSymmetric,
            ..Self::with_family(Family::Tornqvist)
        }
    }

    pub fn tpd() -> Self {
        Self {
            reference_price: ReferencePriceScheme::TpdGeometric,
            ..Self::with_family(Family::Tpd)
        }
    }

    pub fn geks(inner: EngineSpec) -> Self {
        Self::with_family(Family::Geks(Box::new(inner)))
    }

    pub fn rq(quantity: ReferenceQuantityScheme, imputation: ImputationPolicy) -> Self {
        Self {
            reference_quantity: quantity,
            imputation,
            ..Self::with_family(Family::Rq)
        }
    }

    pub fn rqp(alpha: f64, rq: RqConfig, guv_price: ReferencePriceScheme) -> Self {
        Self {
            alpha,
            reference_price: guv_price,
            reference_quantity: rq.quantity,
            imputation: rq.imputation,
            ..Self::with_family(Family::Rqp)
        }
    }

    pub fn with_fixed_point(mut self, config: FixedPointConfig) -> Self {
        self.fixed_point = config;
        self
    }

    pub(crate) fn rq_config(&self) -> RqConfig {
        RqConfig {
            quantity: self.reference_quantity.clone(),
            imputation: self.imputation.clone(),
            reference_price: self.reference_price.clone(),
        }
    }

    /// Whether the engine may serve as a GEKS inner index.
    pub fn is_time_reversible(&self) -> bool {
        matches!(
            self.family,
            Family::Gk | Family::Mgk | Family::Guv | Family::Wgm | Family::Tornqvist | Family::Tpd
        )
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EngineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Gk => write!(f, "GK"),
            Family::Mgk => write!(f, "MGK"),
            Family::Guv => write!(f, "GUV({})", self.reference_price.name()),
            Family::Wgm => write!(f, "WGM({},{})", self.weights.name(), self.reference_price.name()),
            Family::Tornqvist => write!(f, "Tornqvist"),
            Family::Tpd => write!(f, "TPD"),
            Family::Geks(inner) => write!(f, "GEKS[{inner}]"),
            Family::Rq => write!(f, "RQ({},{})", self.reference_quantity.name(), self.imputation),
            Family::Rqp => write!(
                f,
                "RQP(alpha={},{},{},{})",
                self.alpha,
                self.reference_quantity.name(),
                self.imputation,
                self.reference_price.name()
            ),
        }
    }
}

/// Evaluates `engine` for the comparison `spec`.
pub fn evaluate(dataset: &Dataset, spec: &ComparisonSpec, engine: &EngineSpec) -> Result<IndexResult> {
    match &engine.family {
        Family::Geks(inner) => geks_index(dataset, spec, inner),
        _ => evaluate_frame(&Frame::from_spec(dataset, spec)?, engine),
    }
}

/// Evaluates a non-GEKS engine on an explicit frame.
pub fn evaluate_frame(frame: &Frame<'_>, engine: &EngineSpec) -> Result<IndexResult> {
    let fp = &engine.fixed_point;
    let result = match &engine.family {
        Family::Gk => guv::guv_frame(frame, &ReferencePriceScheme::DeflatedUnitValue, fp),
        Family::Mgk => guv::guv_frame(frame, &ReferencePriceScheme::LehrUnitValue, fp),
        Family::Guv => guv::guv_frame(frame, &engine.reference_price, fp),
        Family::Wgm => wgm::wgm_frame(frame, &engine.weights, &engine.reference_price, fp),
        Family::Tornqvist => wgm::wgm_frame(frame, &WeightScheme::TornqvistSymmetric, &engine.reference_price, fp),
        Family::Tpd => wgm::wgm_frame(
            frame,
            &WeightScheme::ExpenditureShare,
            &ReferencePriceScheme::TpdGeometric,
            fp,
        ),
        Family::Rq => rq::rq_frame(frame, &engine.rq_config(), fp),
        Family::Rqp => rq::rqp_frame(frame, engine.alpha, &engine.rq_config(), &engine.reference_price, fp),
        Family::Geks(_) => Err(IndexError::Unsupported(
            "GEKS needs the dataset, not a single frame".into(),
        )),
    }?;
    result.checked()
}
