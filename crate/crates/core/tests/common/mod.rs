#![allow(dead_code)]

use dynindex::model::{Dataset, DatasetBuilder, Period};
use proptest::prelude::*;

/// Per item and period: presence, price, quantity.
type Cell = (bool, f64, f64);

fn build(cells: Vec<Vec<Cell>>, fixed: bool) -> Dataset {
    let items = cells.len();
    let mut b = DatasetBuilder::default();
    for (i, row) in cells.iter().enumerate() {
        for (t, &(present, p, q)) in row.iter().enumerate() {
            // item t % items is always present, so no period is empty
            if fixed || present || i == t % items {
                b.insert(t as Period, format!("item{i}").into(), dynindex::model::Observation::new(p, q));
            }
        }
    }
    b.build().expect("strategy builds valid data")
}

fn cells(periods: usize, items: usize) -> impl Strategy<Value = Vec<Vec<Cell>>> {
    prop::collection::vec(
        prop::collection::vec((prop::bool::weighted(0.75), 0.1f64..10.0, 0.1f64..10.0), periods),
        items,
    )
}

/// Datasets with churn: 2..=max_periods periods over 2..=max_items items.
pub fn churn_dataset(max_periods: usize, max_items: usize) -> impl Strategy<Value = Dataset> {
    (2..=max_periods, 2..=max_items).prop_flat_map(|(t, n)| cells(t, n).prop_map(|c| build(c, false)))
}

/// Datasets where every item is present in every period.
pub fn fixed_dataset(max_periods: usize, max_items: usize) -> impl Strategy<Value = Dataset> {
    (2..=max_periods, 1..=max_items).prop_flat_map(|(t, n)| cells(t, n).prop_map(|c| build(c, true)))
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
