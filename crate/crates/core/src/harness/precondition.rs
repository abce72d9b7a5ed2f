//! Precondition checks, written against the raw period maps and sharing no
//! code with the scenario generator.

use super::axioms::TestId;
use crate::model::{ComparisonSpec, Dataset, PeriodData};

fn subset(a: &PeriodData, b: &PeriodData) -> bool {
    a.items.keys().all(|k| b.items.contains_key(k))
}

fn same_universe(a: &PeriodData, b: &PeriodData) -> bool {
    subset(a, b) && subset(b, a)
}

fn persistent_prices<F: Fn(f64, f64) -> bool>(base: &PeriodData, current: &PeriodData, ok: F) -> bool {
    base.items
        .iter()
        .filter_map(|(k, o0)| current.items.get(k).map(|ot| (o0.price, ot.price)))
        .all(|(p0, pt)| ok(p0, pt))
}

/// `Ok` when the base and current periods of `spec` meet the precondition of `test`.
pub fn precondition_holds(test: TestId, dataset: &Dataset, spec: &ComparisonSpec) -> Result<(), String> {
    let base = dataset.period(spec.base).map_err(|e| e.to_string())?;
    let current = dataset.period(spec.current).map_err(|e| e.to_string())?;
    let fail = |why: &str| Err(format!("{test} precondition: {why}"));
    match test {
        TestId::Identity => {
            if !same_universe(base, current) {
                return fail("universes differ");
            }
            if !persistent_prices(base, current, |a, b| a == b) {
                return fail("prices differ");
            }
        }
        TestId::FixedBasket => {
            if !same_universe(base, current) {
                return fail("universes differ");
            }
            let same_q = base.items.iter().all(|(k, o)| current.items[k].quantity == o.quantity);
            if !same_q {
                return fail("quantities differ");
            }
        }
        TestId::UpperBound => {
            if !subset(base, current) {
                return fail("base universe not contained in current");
            }
            if !persistent_prices(base, current, |p0, pt| pt <= p0) {
                return fail("a persistent price rose");
            }
        }
        TestId::LowerBound => {
            if !subset(current, base) {
                return fail("current universe not contained in base");
            }
            if !persistent_prices(base, current, |p0, pt| pt >= p0) {
                return fail("a persistent price fell");
            }
        }
        TestId::SharpUpper => {
            if !subset(base, current) || same_universe(base, current) {
                return fail("universe does not strictly expand");
            }
            if !persistent_prices(base, current, |a, b| a == b) {
                return fail("persistent prices changed");
            }
        }
        TestId::SharpLower => {
            if !subset(current, base) || same_universe(base, current) {
                return fail("universe does not strictly shrink");
            }
            if !persistent_prices(base, current, |a, b| a == b) {
                return fail("persistent prices changed");
            }
        }
        TestId::Responsiveness => {
            if same_universe(base, current) {
                return fail("universe did not change");
            }
        }
        TestId::SharpResponsiveness => {
            if same_universe(base, current) {
                return fail("universe did not change");
            }
            if !persistent_prices(base, current, |a, b| a == b) {
                return fail("persistent prices changed");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn small_datasets() {
        let rb = ComparisonSpec::bilateral(0, 1);
        assert!(precondition_holds(TestId::Identity, &small_fixed(), &rb).is_err());
        assert!(precondition_holds(TestId::FixedBasket, &small_fixed(), &rb).is_ok());
        assert!(precondition_holds(TestId::LowerBound, &small_fixed(), &rb).is_ok());
        assert!(precondition_holds(TestId::UpperBound, &small_fixed(), &rb).is_err());
        assert!(precondition_holds(TestId::Responsiveness, &small_dyn(), &rb).is_ok());
        assert!(precondition_holds(TestId::SharpResponsiveness, &small_dyn(), &rb).is_err());
        assert!(precondition_holds(TestId::SharpUpper, &small_dyn(), &rb).is_err());
    }
}
