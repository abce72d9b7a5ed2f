mod common;

use common::churn_dataset;
use dynindex::harness::{
    check, generate_scenario, precondition_holds, run_matrix, ChurnSetting, Column, Outcome, ScenarioParams, TestId,
};
use dynindex::indices::{EngineSpec, WeightScheme};
use dynindex::io::{emit_csv, ingest_csv, Report};
use dynindex::model::{Observation, ReferencePolicy};
use dynindex::reference::ReferencePriceScheme;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ScenarioParams> {
    (
        2usize..9,
        2usize..5,
        0.0f64..0.9,
        prop_oneof![
            Just(ChurnSetting::Expanding),
            Just(ChurnSetting::Shrinking),
            Just(ChurnSetting::Mixed)
        ],
        prop_oneof![Just(ReferencePolicy::Bilateral), Just(ReferencePolicy::FullHistory)],
    )
        .prop_map(|(items, periods, churn, setting, reference)| ScenarioParams {
            items,
            periods,
            churn,
            setting,
            reference,
            ..Default::default()
        })
}

fn engines() -> Vec<EngineSpec> {
    vec![
        EngineSpec::mgk(),
        EngineSpec::wgm(WeightScheme::ExpenditureShare, ReferencePriceScheme::LehrUnitValue),
        EngineSpec::geks(EngineSpec::mgk()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_scenarios_meet_preconditions(seed in any::<u64>(), p in params()) {
        for test in TestId::ALL {
            let s = generate_scenario(test, seed, &p).unwrap();
            prop_assert!(precondition_holds(test, &s.dataset, &s.spec).is_ok(), "{test}: {:?}", precondition_holds(test, &s.dataset, &s.spec));
            prop_assert_eq!(s.dataset.len(), p.periods);
        }
    }

    #[test]
    fn verdicts_are_deterministic(seed in any::<u64>()) {
        for test in TestId::ALL {
            let s = generate_scenario(test, seed, &ScenarioParams::default()).unwrap();
            for e in engines() {
                prop_assert_eq!(check(test, &e, &s, 1e-9), check(test, &e, &s, 1e-9));
            }
        }
    }

    #[test]
    fn sharp_bound_failures_imply_sharp_failures(seed in any::<u64>(), p in params()) {
        for (plain, sharp) in [(TestId::UpperBound, TestId::SharpUpper), (TestId::LowerBound, TestId::SharpLower)] {
            let s = generate_scenario(sharp, seed, &p).unwrap();
            prop_assert!(precondition_holds(plain, &s.dataset, &s.spec).is_ok());
            for e in engines() {
                if check(plain, &e, &s, 1e-9).outcome == Outcome::Fail {
                    prop_assert_eq!(check(sharp, &e, &s, 1e-9).outcome, Outcome::Fail);
                }
            }
        }
    }

    #[test]
    fn identity_and_fixed_basket_agree_on_repeated_periods(seed in any::<u64>(), full in any::<bool>()) {
        let p = ScenarioParams {
            reference: if full { ReferencePolicy::FullHistory } else { ReferencePolicy::Bilateral },
            ..Default::default()
        };
        let s = generate_scenario(TestId::Identity, seed, &p).unwrap();
        let current = s.spec.current;
        let base = s.dataset.period(0).unwrap().clone();
        let mut both = s.clone();
        both.dataset = s
            .dataset
            .map_observations(|t, id, o| {
                Some((id.clone(), if t == current { Observation::new(o.price, base.items[id].quantity) } else { o }))
            })
            .unwrap();
        prop_assert!(precondition_holds(TestId::FixedBasket, &both.dataset, &both.spec).is_ok());
        for e in engines() {
            prop_assert_eq!(
                check(TestId::Identity, &e, &both, 1e-9).outcome,
                check(TestId::FixedBasket, &e, &both, 1e-9).outcome
            );
        }
    }

    #[test]
    fn csv_round_trip(d in churn_dataset(5, 8)) {
        let mut buf = Vec::new();
        emit_csv(&d, &mut buf).unwrap();
        let back = ingest_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.dataset, d);
        prop_assert_eq!(back.dropped_zero_quantity, 0);
    }
}

#[test]
fn reports_are_byte_identical() {
    let run = || {
        let mut r = Report::new(serde_json::json!({"seed": 11}));
        r.matrix = Some(run_matrix(&engines(), &Column::ALL, 5, 11, 1e-9));
        r.to_json()
    };
    assert_eq!(run(), run());
}
