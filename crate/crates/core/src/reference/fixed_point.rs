use serde::{Deserialize, Serialize};

use super::ReferencePrices;
use crate::error::{IndexError, Result};

/// Stopping rule and damping for [`solve_fixed_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    /// Largest absolute log-change of any index value accepted as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Log-space step length in (0, 1]; 1 is undamped.
    pub damping: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            tolerance: 1e-10,
            max_iterations: 1000,
            damping: 1.0,
        }
    }
}

impl FixedPointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(IndexError::InvalidConfig(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(IndexError::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(IndexError::InvalidConfig(format!("damping {} outside (0, 1]", self.damping)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
}

/// A pair of maps whose joint fixed point defines an index.
pub trait CoupledSystem {
    /// Number of index values (one per reference period).
    fn len(&self) -> usize;

    /// Position of the base period, normalized to 1.
    fn base(&self) -> usize;

    fn reference_prices(&self, series: &[f64]) -> Result<ReferencePrices>;

    fn index_series(&self, prices: &ReferencePrices) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub series: Vec<f64>,
    pub prices: ReferencePrices,
    pub report: FixedPointReport,
}

/// Alternates the two maps of `system` from the unit series.
///
/// Each sweep maps the series to reference prices and back, rescales so the
/// base value is 1, and takes a damped step in log space. Stops when no index
/// value moves by more than the tolerance in log terms. Running out of
/// iterations is reported through [`FixedPointReport::converged`], not as an
/// error; an index value leaving (0, inf) is an error.
pub fn solve_fixed_point<S: CoupledSystem + ?Sized>(system: &S, config: &FixedPointConfig) -> Result<FixedPoint> {
    config.validate()?;
    let n = system.len();
    let base = system.base();
    let mut log_series = vec![0.0; n];
    let mut series = vec![1.0; n];
    let mut report = FixedPointReport {
        converged: false,
        iterations: 0,
        final_residual: f64::INFINITY,
    };

    for iteration in 1..=config.max_iterations {
        let prices = system.reference_prices(&series)?;
        let mapped = system.index_series(&prices)?;
        if mapped.len() != n || mapped.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(IndexError::Diverged { iteration });
        }
        let anchor = mapped[base].ln();
        let mut residual: f64 = 0.0;
        for (log_old, value) in log_series.iter_mut().zip(&mapped) {
            let target = value.ln() - anchor;
            let step = config.damping * (target - *log_old);
            *log_old += step;
            residual = residual.max(step.abs());
        }
        for (s, l) in series.iter_mut().zip(&log_series) {
            *s = l.exp();
        }
        if series.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(IndexError::Diverged { iteration });
        }
        report.iterations = iteration;
        report.final_residual = residual;
        if residual <= config.tolerance {
            report.converged = true;
            break;
        }
    }

    let prices = system.reference_prices(&series)?;
    Ok(FixedPoint { series, prices, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// P = L / P, the constant-value adjusted Laspeyres recursion.
    struct Reciprocal(f64);

    impl CoupledSystem for Reciprocal {
        fn len(&self) -> usize {
            2
        }
        fn base(&self) -> usize {
            0
        }
        fn reference_prices(&self, series: &[f64]) -> Result<ReferencePrices> {
            Ok(ReferencePrices(vec![Some(1.0 / series[1])]))
        }
        fn index_series(&self, prices: &ReferencePrices) -> Result<Vec<f64>> {
            Ok(vec![1.0, self.0 * prices.get(0).unwrap()])
        }
    }

    struct Identity;

    impl CoupledSystem for Identity {
        fn len(&self) -> usize {
            3
        }
        fn base(&self) -> usize {
            0
        }
        fn reference_prices(&self, series: &[f64]) -> Result<ReferencePrices> {
            Ok(ReferencePrices(series.iter().map(|s| Some(1.0 / s)).collect()))
        }
        fn index_series(&self, _: &ReferencePrices) -> Result<Vec<f64>> {
            Ok(vec![1.0; 3])
        }
    }

    struct Collapse;

    impl CoupledSystem for Collapse {
        fn len(&self) -> usize {
            2
        }
        fn base(&self) -> usize {
            0
        }
        fn reference_prices(&self, _: &[f64]) -> Result<ReferencePrices> {
            Ok(ReferencePrices(vec![]))
        }
        fn index_series(&self, _: &ReferencePrices) -> Result<Vec<f64>> {
            Ok(vec![1.0, 0.0])
        }
    }

    #[test]
    fn identity_converges_immediately() {
        let fp = solve_fixed_point(&Identity, &FixedPointConfig::default()).unwrap();
        assert!(fp.report.converged);
        assert!(fp.report.iterations <= 2);
        assert_eq!(fp.series, vec![1.0; 3]);
    }

    #[test]
    fn undamped_oscillation_is_reported_not_raised() {
        let config = FixedPointConfig {
            max_iterations: 50,
            ..Default::default()
        };
        let fp = solve_fixed_point(&Reciprocal(1.5), &config).unwrap();
        assert!(!fp.report.converged);
        assert_eq!(fp.report.iterations, 50);
        assert!(fp.report.final_residual > config.tolerance);
    }

    #[test]
    fn half_damping_finds_square_root() {
        let config = FixedPointConfig {
            damping: 0.5,
            ..Default::default()
        };
        let fp = solve_fixed_point(&Reciprocal(1.5), &config).unwrap();
        assert!(fp.report.converged);
        assert!((fp.series[1] - 1.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn collapse_to_zero_is_an_error() {
        let err = solve_fixed_point(&Collapse, &FixedPointConfig::default()).unwrap_err();
        assert_eq!(err, IndexError::Diverged { iteration: 1 });
    }

    #[test]
    fn invalid_configs_rejected() {
        for config in [
            FixedPointConfig { tolerance: 0.0, ..Default::default() },
            FixedPointConfig { max_iterations: 0, ..Default::default() },
            FixedPointConfig { damping: 0.0, ..Default::default() },
            FixedPointConfig { damping: 1.5, ..Default::default() },
        ] {
            assert!(matches!(
                solve_fixed_point(&Identity, &config),
                Err(IndexError::InvalidConfig(_))
            ));
        }
    }
}
