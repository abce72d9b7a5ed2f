//! Comparison frames: the reference periods of one comparison, with every
//! item's observations gathered across them.

use std::collections::BTreeMap;

use crate::error::{IndexError, Result};
use crate::model::{ComparisonSpec, Dataset, ItemId, Observation, Period, PeriodData};

/// The reference universe of a single comparison.
///
/// Period positions index into [`Frame::periods`]; `base` and `current` are
/// positions, not period labels. Any two positions may serve as base and
/// current, which lets bilateral engines run backwards in time.
#[derive(Debug, Clone)]
pub struct Frame<'a> {
    periods: Vec<&'a PeriodData>,
    base: usize,
    current: usize,
    items: Vec<&'a ItemId>,
    index: BTreeMap<&'a ItemId, usize>,
    /// Per item: (period position, observation).
    tracks: Vec<Vec<(usize, Observation)>>,
    /// Per period position: (item index, observation).
    members: Vec<Vec<(usize, Observation)>>,
    totals: Vec<f64>,
}

impl<'a> Frame<'a> {
    pub fn new(periods: Vec<&'a PeriodData>, base: usize, current: usize) -> Result<Self> {
        if base >= periods.len() || current >= periods.len() || base == current {
            return Err(IndexError::InvalidComparison(format!(
                "frame positions base={base} current={current} over {} periods",
                periods.len()
            )));
        }
        let mut index: BTreeMap<&'a ItemId, usize> = BTreeMap::new();
        for pd in &periods {
            for id in pd.items.keys() {
                let next = index.len();
                index.entry(id).or_insert(next);
            }
        }
        // Renumber in sorted order so iteration order never depends on period order.
        let items: Vec<&'a ItemId> = index.keys().copied().collect();
        for (k, id) in items.iter().enumerate() {
            index.insert(id, k);
        }
        let mut tracks = vec![Vec::new(); items.len()];
        let mut members = Vec::with_capacity(periods.len());
        let mut totals = Vec::with_capacity(periods.len());
        for (pos, pd) in periods.iter().enumerate() {
            let mut row = Vec::with_capacity(pd.items.len());
            for (id, obs) in &pd.items {
                let k = index[id];
                tracks[k].push((pos, *obs));
                row.push((k, *obs));
            }
            members.push(row);
            totals.push(pd.expenditure());
        }
        Ok(Frame {
            periods,
            base,
            current,
            items,
            index,
            tracks,
            members,
            totals,
        })
    }

    /// Frame for `spec` over its reference periods.
    pub fn from_spec(dataset: &'a Dataset, spec: &ComparisonSpec) -> Result<Self> {
        let labels = spec.reference_periods(dataset)?;
        Self::from_labels(dataset, &labels, spec.base, spec.current)
    }

    pub fn from_labels(dataset: &'a Dataset, labels: &[Period], base: Period, current: Period) -> Result<Self> {
        let periods = labels
            .iter()
            .map(|&t| dataset.period(t))
            .collect::<Result<Vec<_>>>()?;
        let pos = |t: Period| {
            labels
                .iter()
                .position(|&l| l == t)
                .ok_or_else(|| IndexError::InvalidComparison(format!("period {t} not in reference set")))
        };
        Self::new(periods, pos(base)?, pos(current)?)
    }

    /// Two-period frame comparing `base` to `current`, in that direction.
    pub fn bilateral(base: &'a PeriodData, current: &'a PeriodData) -> Result<Self> {
        Self::new(vec![base, current], 0, 1)
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn period_label(&self, pos: usize) -> Period {
        self.periods[pos].period
    }

    pub fn period_data(&self, pos: usize) -> &'a PeriodData {
        self.periods[pos]
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn item(&self, k: usize) -> &'a ItemId {
        self.items[k]
    }

    pub fn item_index(&self, id: &ItemId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn track(&self, k: usize) -> &[(usize, Observation)] {
        &self.tracks[k]
    }

    pub fn members(&self, pos: usize) -> &[(usize, Observation)] {
        &self.members[pos]
    }

    /// Total expenditure at a period position.
    pub fn total(&self, pos: usize) -> f64 {
        self.totals[pos]
    }

    pub fn observation(&self, k: usize, pos: usize) -> Option<Observation> {
        self.tracks[k].iter().find(|(p, _)| *p == pos).map(|(_, o)| *o)
    }

    /// Items present in the base or current period.
    pub fn comparison_items(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.members[self.base]
            .iter()
            .chain(self.members[self.current].iter())
            .map(|(k, _)| *k)
            .collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    pub fn value_ratio(&self) -> f64 {
        self.totals[self.current] / self.totals[self.base]
    }
}
