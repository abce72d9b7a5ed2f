//! GEKS over a time-reversible bilateral engine.
//!
//! The disseminated value for period `r` uses the window that ends at `r`, so
//! the returned series is what would have been published period by period.

use std::collections::BTreeMap;

use super::{evaluate_frame, EngineSpec, IndexResult};
use crate::error::{IndexError, Result};
use crate::frame::Frame;
use crate::model::{ComparisonSpec, Dataset, Period};
use crate::reference::FixedPointReport;

struct Bilaterals<'d> {
    dataset: &'d Dataset,
    inner: &'d EngineSpec,
    cache: BTreeMap<(Period, Period), f64>,
    worst: Option<FixedPointReport>,
}

impl Bilaterals<'_> {
    fn log_index(&mut self, from: Period, to: Period) -> Result<f64> {
        if from == to {
            return Ok(0.0);
        }
        if let Some(v) = self.cache.get(&(from, to)) {
            return Ok(*v);
        }
        let frame = Frame::bilateral(self.dataset.period(from)?, self.dataset.period(to)?)?;
        let r = evaluate_frame(&frame, self.inner)?;
        if let Some(d) = r.diagnostics {
            if !d.converged && self.worst.is_none_or(|w| w.converged) {
                self.worst = Some(d);
            }
        }
        let v = r.value.ln();
        self.cache.insert((from, to), v);
        Ok(v)
    }

    fn disseminated(&mut self, spec: &ComparisonSpec) -> Result<f64> {
        let window = spec.reference_periods(self.dataset)?;
        let mut acc = 0.0;
        for &s in &window {
            acc += self.log_index(spec.base, s)? + self.log_index(s, spec.current)?;
        }
        Ok((acc / window.len() as f64).exp())
    }
}

/// Disseminated GEKS index from `spec.base` to `spec.current`.
///
/// `series` holds the disseminated value for every period after the base,
/// each computed with the window ending at that period.
pub fn geks_index(dataset: &Dataset, spec: &ComparisonSpec, inner: &EngineSpec) -> Result<IndexResult> {
    if !inner.is_time_reversible() {
        return Err(IndexError::Unsupported(format!(
            "GEKS inner engine {inner} is not a time-reversible bilateral index"
        )));
    }
    spec.check(dataset)?;
    let mut bilaterals = Bilaterals {
        dataset,
        inner,
        cache: BTreeMap::new(),
        worst: None,
    };
    let mut series = Vec::new();
    for r in spec.base + 1..=spec.current {
        let at_r = ComparisonSpec { current: r, ..*spec };
        series.push((r, bilaterals.disseminated(&at_r)?));
    }
    let value = series.last().expect("current follows base").1;
    let diagnostics = bilaterals.worst.or_else(|| {
        // all inner solves converged; report the solver as trivially done
        inner_is_coupled(inner).then_some(FixedPointReport {
            converged: true,
            iterations: 0,
            final_residual: 0.0,
        })
    });
    IndexResult {
        diagnostics,
        series: Some(series),
        ..IndexResult::plain(value)
    }
    .checked()
}

fn inner_is_coupled(inner: &EngineSpec) -> bool {
    use super::Family;
    match inner.family {
        Family::Gk | Family::Tpd => true,
        Family::Guv | Family::Wgm => inner.reference_price.is_index_coupled(),
        _ => false,
    }
}
