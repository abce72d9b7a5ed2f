//! Periods, items, observations and the set algebra of item universes.
//!
//! A [`Dataset`] holds one [`PeriodData`] per period, keyed by contiguous
//! integer period indices. Each period maps the items transacted in it to
//! their unit-value price and quantity; the key set of a period is its item
//! universe. Datasets are validated on construction and immutable afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{IndexError, Result};

pub type Period = u32;

/// Opaque item identifier, typically a (GTIN, outlet) pair flattened to text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId(String);

impl ItemId {
    pub fn new(id: impl Into<String>) -> Self {
        ItemId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ItemId {
    fn from(s: &str) -> Self {
        ItemId(s.to_owned())
    }
}

impl From<String> for ItemId {
    fn from(s: String) -> Self {
        ItemId(s)
    }
}

/// Unit-value price and transaction quantity of one item in one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub price: f64,
    pub quantity: f64,
}

impl Observation {
    pub fn new(price: f64, quantity: f64) -> Self {
        Observation { price, quantity }
    }

    /// Builds the unit-value price from total expenditure and quantity.
    pub fn from_expenditure(expenditure: f64, quantity: f64) -> Self {
        Observation {
            price: expenditure / quantity,
            quantity,
        }
    }

    pub fn expenditure(&self) -> f64 {
        self.price * self.quantity
    }
}

/// All observations of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodData {
    pub period: Period,
    pub items: BTreeMap<ItemId, Observation>,
}

impl PeriodData {
    pub fn new(period: Period) -> Self {
        PeriodData {
            period,
            items: BTreeMap::new(),
        }
    }

    pub fn get(&self, item: &ItemId) -> Option<&Observation> {
        self.items.get(item)
    }

    pub fn contains(&self, item: &ItemId) -> bool {
        self.items.contains_key(item)
    }

    pub fn expenditure(&self) -> f64 {
        self.items.values().map(Observation::expenditure).sum()
    }

    pub fn universe(&self) -> BTreeSet<ItemId> {
        self.items.keys().cloned().collect()
    }
}

/// A problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("dataset has no periods")]
    NoPeriods,
    #[error("period {period}: empty period")]
    EmptyPeriod { period: Period },
    #[error("period {period}, item {item}: non-positive price")]
    NonPositivePrice { period: Period, item: ItemId },
    #[error("period {period}, item {item}: non-positive quantity")]
    NonPositiveQuantity { period: Period, item: ItemId },
    #[error("period {period}, item {item}: non-finite expenditure")]
    NonFinite { period: Period, item: ItemId },
    #[error("period gap between {previous} and {next}")]
    PeriodGap { previous: Period, next: Period },
    #[error("period {next} does not follow {previous}")]
    NotIncreasing { previous: Period, next: Period },
}

/// Checks a sequence of periods against the dataset invariants.
///
/// Zero quantities are reported like any other non-positive quantity; use
/// [`Dataset::new`] to have them normalized out first.
pub fn validate(periods: &[PeriodData]) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if periods.is_empty() {
        violations.push(Violation::NoPeriods);
    }
    for pair in periods.windows(2) {
        let (previous, next) = (pair[0].period, pair[1].period);
        if next <= previous {
            violations.push(Violation::NotIncreasing { previous, next });
        } else if next != previous + 1 {
            violations.push(Violation::PeriodGap { previous, next });
        }
    }
    for pd in periods {
        if pd.items.is_empty() {
            violations.push(Violation::EmptyPeriod { period: pd.period });
        }
        for (item, obs) in &pd.items {
            let period = pd.period;
            if !(obs.price > 0.0) {
                violations.push(Violation::NonPositivePrice {
                    period,
                    item: item.clone(),
                });
            }
            if !(obs.quantity > 0.0) {
                violations.push(Violation::NonPositiveQuantity {
                    period,
                    item: item.clone(),
                });
            }
            if !obs.expenditure().is_finite() {
                violations.push(Violation::NonFinite {
                    period,
                    item: item.clone(),
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Validated, immutable panel of period data with contiguous period indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    periods: Vec<PeriodData>,
}

impl Dataset {
    /// Drops zero-quantity observations, then validates.
    pub fn new(mut periods: Vec<PeriodData>) -> std::result::Result<Self, Vec<Violation>> {
        for pd in &mut periods {
            pd.items.retain(|_, obs| obs.quantity != 0.0);
        }
        validate(&periods)?;
        Ok(Dataset { periods })
    }

    pub fn builder() -> DatasetBuilder {
        DatasetBuilder::default()
    }

    pub fn periods(&self) -> &[PeriodData] {
        &self.periods
    }

    pub fn first_period(&self) -> Period {
        self.periods[0].period
    }

    pub fn last_period(&self) -> Period {
        self.periods[self.periods.len() - 1].period
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn period(&self, t: Period) -> Result<&PeriodData> {
        t.checked_sub(self.first_period())
            .and_then(|offset| self.periods.get(offset as usize))
            .ok_or(IndexError::UnknownPeriod(t))
    }

    /// Item universe of period `t`.
    pub fn universe(&self, t: Period) -> Result<BTreeSet<ItemId>> {
        Ok(self.period(t)?.universe())
    }

    /// Rebuilds the dataset with every observation passed through `f`.
    ///
    /// Returning `None` removes the observation.
    pub fn map_observations<F>(&self, mut f: F) -> std::result::Result<Dataset, Vec<Violation>>
    where
        F: FnMut(Period, &ItemId, Observation) -> Option<(ItemId, Observation)>,
    {
        let periods = self
            .periods
            .iter()
            .map(|pd| PeriodData {
                period: pd.period,
                items: pd
                    .items
                    .iter()
                    .filter_map(|(id, obs)| f(pd.period, id, *obs))
                    .collect(),
            })
            .collect();
        Dataset::new(periods)
    }
}

/// Convenience builder; later observations of the same (period, item) win.
#[derive(Debug, Default, Clone)]
pub struct DatasetBuilder {
    periods: BTreeMap<Period, BTreeMap<ItemId, Observation>>,
}

impl DatasetBuilder {
    pub fn observe(mut self, period: Period, item: impl Into<ItemId>, price: f64, quantity: f64) -> Self {
        self.insert(period, item.into(), Observation::new(price, quantity));
        self
    }

    pub fn insert(&mut self, period: Period, item: ItemId, obs: Observation) {
        self.periods.entry(period).or_default().insert(item, obs);
    }

    pub fn build(self) -> std::result::Result<Dataset, Vec<Violation>> {
        Dataset::new(
            self.periods
                .into_iter()
                .map(|(period, items)| PeriodData { period, items })
                .collect(),
        )
    }
}

/// Which periods enter the reference universe of a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferencePolicy {
    /// The base and current periods only.
    Bilateral,
    /// Every period from base to current.
    FullHistory,
    /// The last `W` periods ending at the current period, plus the base period.
    RollingWindow(u32),
}

impl ReferencePolicy {
    pub fn is_bilateral(&self) -> bool {
        matches!(self, ReferencePolicy::Bilateral)
    }
}

/// A comparison from `base` to `current` over a reference set of periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonSpec {
    pub base: Period,
    pub current: Period,
    pub reference: ReferencePolicy,
}

impl ComparisonSpec {
    pub fn new(base: Period, current: Period, reference: ReferencePolicy) -> Self {
        ComparisonSpec {
            base,
            current,
            reference,
        }
    }

    pub fn bilateral(base: Period, current: Period) -> Self {
        Self::new(base, current, ReferencePolicy::Bilateral)
    }

    pub fn full_history(base: Period, current: Period) -> Self {
        Self::new(base, current, ReferencePolicy::FullHistory)
    }

    pub fn check(&self, dataset: &Dataset) -> Result<()> {
        dataset.period(self.base)?;
        dataset.period(self.current)?;
        if self.base >= self.current {
            return Err(IndexError::InvalidComparison(format!(
                "base {} must precede current {}",
                self.base, self.current
            )));
        }
        if let ReferencePolicy::RollingWindow(w) = self.reference {
            if w < 2 {
                return Err(IndexError::InvalidComparison(format!(
                    "rolling window length {w} is below 2"
                )));
            }
        }
        Ok(())
    }

    /// Sorted reference periods; always contains base and current.
    pub fn reference_periods(&self, dataset: &Dataset) -> Result<Vec<Period>> {
        self.check(dataset)?;
        Ok(match self.reference {
            ReferencePolicy::Bilateral => vec![self.base, self.current],
            ReferencePolicy::FullHistory => (self.base..=self.current).collect(),
            ReferencePolicy::RollingWindow(w) => {
                let start = (self.current + 1).saturating_sub(w).max(dataset.first_period());
                let mut periods: Vec<Period> = (start..=self.current).collect();
                if self.base < start {
                    periods.insert(0, self.base);
                }
                periods
            }
        })
    }
}

/// Persistent, birth and death items between two periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniverseSplit {
    pub persistent: BTreeSet<ItemId>,
    pub births: BTreeSet<ItemId>,
    pub deaths: BTreeSet<ItemId>,
}

pub fn universe(dataset: &Dataset, t: Period) -> Result<BTreeSet<ItemId>> {
    dataset.universe(t)
}

pub fn universe_algebra(dataset: &Dataset, base: Period, current: Period) -> Result<UniverseSplit> {
    let u0 = dataset.universe(base)?;
    let ut = dataset.universe(current)?;
    Ok(UniverseSplit {
        persistent: u0.intersection(&ut).cloned().collect(),
        births: ut.difference(&u0).cloned().collect(),
        deaths: u0.difference(&ut).cloned().collect(),
    })
}

/// Ratio of total expenditure in `current` to total expenditure in `base`.
pub fn value_ratio(dataset: &Dataset, base: Period, current: Period) -> Result<f64> {
    Ok(dataset.period(current)?.expenditure() / dataset.period(base)?.expenditure())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn small_fixed() -> Dataset {
        Dataset::builder()
            .observe(0, "A", 1.0, 1.0)
            .observe(0, "B", 1.0, 1.0)
            .observe(1, "A", 2.0, 1.0)
            .observe(1, "B", 1.0, 1.0)
            .build()
            .unwrap()
    }

    pub fn small_dyn() -> Dataset {
        Dataset::builder()
            .observe(0, "A", 1.0, 1.0)
            .observe(0, "B", 2.0, 1.0)
            .observe(1, "A", 1.2, 1.0)
            .observe(1, "C", 3.0, 1.0)
            .build()
            .unwrap()
    }

    pub fn set(ids: &[&str]) -> BTreeSet<ItemId> {
        ids.iter().map(|s| ItemId::from(*s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn universes_are_key_sets() {
        assert_eq!(universe(&small_dyn(), 0).unwrap(), set(&["A", "B"]));
        assert_eq!(universe(&small_dyn(), 1).unwrap(), set(&["A", "C"]));
        assert_eq!(universe(&small_fixed(), 1).unwrap(), set(&["A", "B"]));
        assert_eq!(universe(&small_fixed(), 5), Err(IndexError::UnknownPeriod(5)));
    }

    #[test]
    fn universe_algebra_splits() {
        let s = universe_algebra(&small_dyn(), 0, 1).unwrap();
        assert_eq!(s.persistent, set(&["A"]));
        assert_eq!(s.births, set(&["C"]));
        assert_eq!(s.deaths, set(&["B"]));

        let s = universe_algebra(&small_fixed(), 0, 1).unwrap();
        assert_eq!(s.persistent, set(&["A", "B"]));
        assert!(s.births.is_empty() && s.deaths.is_empty());

        let disjoint = Dataset::builder()
            .observe(0, "A", 1.0, 1.0)
            .observe(1, "B", 1.0, 1.0)
            .build()
            .unwrap();
        let s = universe_algebra(&disjoint, 0, 1).unwrap();
        assert!(s.persistent.is_empty());
        assert_eq!(s.births, set(&["B"]));
        assert_eq!(s.deaths, set(&["A"]));
    }

    #[test]
    fn value_ratios() {
        assert!((value_ratio(&small_fixed(), 0, 1).unwrap() - 1.5).abs() < 1e-15);
        assert!((value_ratio(&small_dyn(), 0, 1).unwrap() - 1.4).abs() < 1e-15);
        let same = Dataset::builder()
            .observe(0, "A", 3.0, 2.0)
            .observe(1, "A", 3.0, 2.0)
            .build()
            .unwrap();
        assert_eq!(value_ratio(&same, 0, 1).unwrap(), 1.0);
    }

    #[test]
    fn validation_reports_violations() {
        assert!(validate(small_fixed().periods()).is_ok());

        let mut zero_price = PeriodData::new(0);
        zero_price.items.insert("A".into(), Observation::new(0.0, 1.0));
        let errs = validate(&[zero_price]).unwrap_err();
        assert!(errs.iter().any(|v| v.to_string().contains("non-positive price")));

        let mut p0 = PeriodData::new(0);
        p0.items.insert("A".into(), Observation::new(1.0, 1.0));
        let mut p2 = PeriodData::new(2);
        p2.items.insert("A".into(), Observation::new(1.0, 1.0));
        let errs = validate(&[p0, p2]).unwrap_err();
        assert!(errs.iter().any(|v| v.to_string().contains("period gap")));

        assert_eq!(validate(&[PeriodData::new(0)]).unwrap_err(), vec![Violation::EmptyPeriod { period: 0 }]);
    }

    #[test]
    fn zero_quantities_leave_the_universe() {
        let d = Dataset::builder()
            .observe(0, "A", 1.0, 1.0)
            .observe(0, "B", 1.0, 0.0)
            .observe(1, "A", 1.0, 1.0)
            .build()
            .unwrap();
        assert_eq!(d.universe(0).unwrap(), set(&["A"]));

        let only_zero = Dataset::builder().observe(0, "A", 1.0, 0.0).build();
        assert!(only_zero.is_err());
    }

    #[test]
    fn reference_periods_per_policy() {
        let d = Dataset::builder()
            .observe(0, "A", 1.0, 1.0)
            .observe(1, "A", 1.0, 1.0)
            .observe(2, "A", 1.0, 1.0)
            .observe(3, "A", 1.0, 1.0)
            .build()
            .unwrap();
        assert_eq!(ComparisonSpec::bilateral(0, 3).reference_periods(&d).unwrap(), vec![0, 3]);
        assert_eq!(ComparisonSpec::full_history(1, 3).reference_periods(&d).unwrap(), vec![1, 2, 3]);
        let rolling = ComparisonSpec::new(0, 3, ReferencePolicy::RollingWindow(2));
        assert_eq!(rolling.reference_periods(&d).unwrap(), vec![0, 2, 3]);
        let rolling = ComparisonSpec::new(2, 3, ReferencePolicy::RollingWindow(13));
        assert_eq!(rolling.reference_periods(&d).unwrap(), vec![0, 1, 2, 3]);
        assert!(ComparisonSpec::bilateral(2, 1).check(&d).is_err());
        assert!(ComparisonSpec::new(0, 1, ReferencePolicy::RollingWindow(1)).check(&d).is_err());
    }
}
