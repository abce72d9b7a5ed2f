//! Turning command-line options into engine specifications.

use clap::Args;
use dynindex::indices::{EngineSpec, ImputationPolicy, RqConfig, WeightScheme};
use dynindex::model::ReferencePolicy;
use dynindex::reference::{FixedPointConfig, ReferencePriceScheme, ReferenceQuantityScheme};
use serde_json::json;

use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// gk, mgk, guv, wgm, tornqvist, tpd, geks, rq, rqp, laspeyres, paasche or fisher
    #[arg(long, short)]
    pub engine: String,
    /// Reference prices: lehr, deflated, tpd or base
    #[arg(long)]
    pub ref_price: Option<String>,
    /// Reference quantities for rq/rqp: base, current, mean or expenditure
    #[arg(long)]
    pub ref_quantity: Option<String>,
    /// WGM weights: share or tornqvist
    #[arg(long)]
    pub weights: Option<String>,
    /// RQP mixing weight on the GUV component
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Markup applied to a birth's current price to impute its base price
    #[arg(long, default_value_t = 1.05)]
    pub birth_markup: f64,
    /// Markup applied to a death's base price to impute its current price
    #[arg(long, default_value_t = 1.05)]
    pub death_markup: f64,
    /// Inner engine for geks
    #[arg(long, default_value = "mgk")]
    pub inner: String,
    /// Fixed-point damping in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
    /// Fixed-point convergence tolerance on log values
    #[arg(long, default_value_t = 1e-10)]
    pub fp_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classical {
    Laspeyres,
    Paasche,
    Fisher,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Engine {
    Spec(EngineSpec),
    Classical(Classical),
}

impl Engine {
    pub fn label(&self) -> String {
        match self {
            Engine::Spec(s) => s.label(),
            Engine::Classical(c) => format!("{c:?}"),
        }
    }
}

pub fn parse_price_scheme(s: &str) -> Result<ReferencePriceScheme, CliError> {
    Ok(match s {
        "lehr" => ReferencePriceScheme::LehrUnitValue,
        "deflated" => ReferencePriceScheme::DeflatedUnitValue,
        "tpd" => ReferencePriceScheme::TpdGeometric,
        "base" | "fixed-base" => ReferencePriceScheme::FixedBase,
        _ => return Err(CliError::Usage(format!("unknown reference price scheme {s:?}"))),
    })
}

fn parse_quantity_scheme(s: &str) -> Result<ReferenceQuantityScheme, CliError> {
    Ok(match s {
        "base" => ReferenceQuantityScheme::BaseQuantity,
        "current" => ReferenceQuantityScheme::CurrentQuantity,
        "mean" => ReferenceQuantityScheme::ArithmeticMean,
        "expenditure" => ReferenceQuantityScheme::ExpenditureOverReferencePrice,
        _ => return Err(CliError::Usage(format!("unknown reference quantity scheme {s:?}"))),
    })
}

fn parse_weights(s: &str) -> Result<WeightScheme, CliError> {
    Ok(match s {
        "share" => WeightScheme::ExpenditureShare,
        "tornqvist" => WeightScheme::TornqvistSymmetric,
        _ => return Err(CliError::Usage(format!("unknown weight scheme {s:?}"))),
    })
}

/// `bilateral`, `full` or `rolling:W`.
pub fn parse_reference(s: &str) -> Result<ReferencePolicy, CliError> {
    match s {
        "bilateral" => Ok(ReferencePolicy::Bilateral),
        "full" => Ok(ReferencePolicy::FullHistory),
        _ => s
            .strip_prefix("rolling:")
            .and_then(|w| w.parse().ok())
            .map(ReferencePolicy::RollingWindow)
            .ok_or_else(|| CliError::Usage(format!("reference {s:?}: expected bilateral, full or rolling:W"))),
    }
}

impl EngineArgs {
    pub fn build(&self) -> Result<Engine, CliError> {
        self.build_named(&self.engine, true)
    }

    fn build_named(&self, name: &str, outer: bool) -> Result<Engine, CliError> {
        let price = |default| self.ref_price.as_deref().map_or(Ok(default), parse_price_scheme);
        let fp = FixedPointConfig {
            tolerance: self.fp_tolerance,
            max_iterations: self.max_iterations,
            damping: self.damping,
        };
        fp.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let imputation = ImputationPolicy::Markup {
            birth: self.birth_markup,
            death: self.death_markup,
        };
        let quantity = || {
            self.ref_quantity
                .as_deref()
                .map_or(Ok(ReferenceQuantityScheme::ArithmeticMean), parse_quantity_scheme)
        };
        let spec = match name {
            "gk" => EngineSpec::gk(),
            "mgk" => EngineSpec::mgk(),
            "guv" => EngineSpec::guv(price(ReferencePriceScheme::LehrUnitValue)?),
            "wgm" => EngineSpec::wgm(
                self.weights.as_deref().map_or(Ok(WeightScheme::ExpenditureShare), parse_weights)?,
                price(ReferencePriceScheme::LehrUnitValue)?,
            ),
            "tornqvist" => EngineSpec::tornqvist(),
            "tpd" => EngineSpec::tpd(),
            "geks" if outer => match self.build_named(&self.inner, false)? {
                Engine::Spec(inner) => EngineSpec::geks(inner),
                Engine::Classical(_) => return Err(CliError::Usage("GEKS needs a GUV or WGM inner engine".into())),
            },
            "rq" => EngineSpec::rq(quantity()?, imputation),
            "rqp" => EngineSpec::rqp(
                self.alpha,
                RqConfig {
                    quantity: quantity()?,
                    imputation,
                    reference_price: ReferencePriceScheme::LehrUnitValue,
                },
                price(ReferencePriceScheme::LehrUnitValue)?,
            ),
            "laspeyres" if outer => return Ok(Engine::Classical(Classical::Laspeyres)),
            "paasche" if outer => return Ok(Engine::Classical(Classical::Paasche)),
            "fisher" if outer => return Ok(Engine::Classical(Classical::Fisher)),
            _ => return Err(CliError::Usage(format!("unknown engine {name:?}"))),
        };
        Ok(Engine::Spec(spec.with_fixed_point(fp)))
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "engine": self.engine,
            "ref_price": self.ref_price,
            "ref_quantity": self.ref_quantity,
            "weights": self.weights,
            "alpha": self.alpha,
            "birth_markup": self.birth_markup,
            "death_markup": self.death_markup,
            "inner": self.inner,
            "damping": self.damping,
            "max_iterations": self.max_iterations,
            "fp_tolerance": self.fp_tolerance,
        })
    }
}
