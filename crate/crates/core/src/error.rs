use thiserror::Error;

use crate::model::{ItemId, Period};

/// Errors raised while evaluating reference prices, quantities or indices.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("period {0} is not in the dataset")]
    UnknownPeriod(Period),

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("item {0} is not observed in any reference period")]
    ItemNotInReference(ItemId),

    #[error("no index value supplied for period {0}")]
    MissingIndexValue(Period),

    #[error("custom map has no usable value for item {0}")]
    CustomMissing(ItemId),

    #[error("reference scheme {scheme} cannot be applied to item {item}")]
    InapplicableScheme { scheme: &'static str, item: ItemId },

    #[error("no imputed {side} price for item {item}")]
    MissingImputation { side: &'static str, item: ItemId },

    #[error("persistent universe is empty")]
    EmptyPersistentUniverse,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported engine combination: {0}")]
    Unsupported(String),

    #[error("index value left (0, inf) at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("non-finite or non-positive intermediate value: {0}")]
    Degenerate(String),
}

pub type Result<T, E = IndexError> = std::result::Result<T, E>;
