use devbound_core::bounds::{self, Chain};
use devbound_core::oracle::{self, exact_max_deviation, FuzzConfig, ValueDistribution};
use devbound_core::{Regime, Tolerances, WeightedSample, Window};
use proptest::prelude::*;

fn fuzz_json(config: &FuzzConfig, threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap();
    let report = pool.install(|| oracle::fuzz_tightness(config)).unwrap();
    serde_json::to_string(&report).unwrap()
}

#[test]
fn fuzz_report_independent_of_thread_count() {
    let config = FuzzConfig {
        master_seed: 2024,
        trials: 64,
        regime: Regime::Steffensen,
        value_distribution: ValueDistribution::Clustered,
        r_set: vec![1.0, 2.5],
        ..FuzzConfig::default()
    };
    let single = fuzz_json(&config, 1);
    assert_eq!(single, fuzz_json(&config, 4));
    assert_eq!(single, fuzz_json(&config, 7));
}

#[test]
fn fuzz_seeds_differ() {
    let a = FuzzConfig {
        master_seed: 1,
        trials: 8,
        ..FuzzConfig::default()
    };
    let b = FuzzConfig {
        master_seed: 2,
        ..a.clone()
    };
    assert_ne!(fuzz_json(&a, 2), fuzz_json(&b, 2));
}

#[test]
fn verify_reports_are_byte_identical() {
    let s = WeightedSample::new(
        vec![0.5, 1.5, 1.0, 4.0, 2.5],
        vec![0.3, 0.1, 0.2, 0.25, 0.15],
    )
    .unwrap();
    let tol = Tolerances::default();
    let first = serde_json::to_string(&oracle::verify_dataset(&s, &[1.0, 2.0, 3.5], &tol).unwrap())
        .unwrap();
    for _ in 0..3 {
        let again =
            serde_json::to_string(&oracle::verify_dataset(&s, &[1.0, 2.0, 3.5], &tol).unwrap())
                .unwrap();
        assert_eq!(first, again);
    }
}

#[test]
fn full_window_bound_serializes_infinite_denominator() {
    let s = WeightedSample::equal_weights(vec![1.0, 2.0, 4.0]).unwrap();
    let report = bounds::window_bound(
        &s,
        Window::full(3),
        1.0,
        Chain::RawMoment,
        None,
        &Tolerances::default(),
    )
    .unwrap();
    assert_eq!(report.bound, 0.0);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["denominator"], "+inf");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn max_deviation_within_samuelson(values in prop::collection::vec(-1e3f64..1e3, 2..16)) {
        let s = WeightedSample::equal_weights(values).unwrap();
        let tol = Tolerances::default();
        let (dev, _) = exact_max_deviation(&s);
        let bound = bounds::samuelson_bound(&s, &tol).unwrap().bound;
        prop_assert!(tol.holds(dev, bound), "{dev} > {bound}");
    }
}
