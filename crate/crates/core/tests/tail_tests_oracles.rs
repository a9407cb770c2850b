//! Thin-tail and equal-tail tests against reference values and their
//! structural properties.

use std::sync::OnceLock;

use proptest::prelude::*;

use frontier_tails::evt::sample_normalized;
use frontier_tails::rng::seeded;
use frontier_tails::tail_tests::{
    equal_grid, equal_tail_statistic, thin_tail_statistic, thin_tail_test, verify_size, CalibrationArtifact,
    EqualTailTest, LeastFavorableDistribution, LfdSettings, NullReference, PairWeight, TestKind, ThinTailTest,
    WeightGrid, ARTIFACT_VERSION,
};
use frontier_tails::{NormalizedTail, QuadratureConfig, SortedTail, TailIndex};

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn xi(v: f64) -> TailIndex {
    TailIndex::new(v).unwrap()
}

fn small_null() -> &'static NullReference {
    static NULL: OnceLock<NullReference> = OnceLock::new();
    NULL.get_or_init(|| NullReference::simulate(5, &WeightGrid::uniform(8, 0.9).unwrap(), 2000, 11, &q()).unwrap())
}

#[test]
fn thin_statistic_golden() {
    // mpmath value from oracles/golden.py
    let v = NormalizedTail::new(vec![1.0, 0.5, 0.0]).unwrap();
    let s = thin_tail_statistic(&v, &WeightGrid::default(), &q()).unwrap();
    assert!((s - 0.848_071_821_032_123_7).abs() < 1e-9, "{s}");
}

#[test]
fn critical_value_matches_independent_simulation() {
    // numpy/scipy simulation from oracles/cv_oracle.py (seed 2024, 20000 draws)
    let python_cv = 2.191_572_825_091_1;
    let null = NullReference::simulate(10, &WeightGrid::default(), 20_000, 77, &q()).unwrap();
    let p = null.p_value(python_cv);
    assert!((p - 0.05).abs() < 0.008, "p-value of the reference cv: {p}");
}

#[test]
fn critical_value_decreases_in_alpha() {
    let null = small_null();
    let cvs: Vec<f64> = [0.01, 0.05, 0.1, 0.25, 0.5].iter().map(|&a| null.critical_value(a).unwrap()).collect();
    assert!(cvs.windows(2).all(|w| w[0] >= w[1]), "{cvs:?}");
    assert!(null.critical_value(1e-4).is_err());
}

#[test]
fn p_value_range_and_median() {
    let null = small_null();
    let m = null.draws() as f64;
    assert_eq!(null.p_value(f64::NEG_INFINITY), 1.0);
    assert_eq!(null.p_value(f64::INFINITY), 1.0 / (m + 1.0));
    let median = null.statistics()[null.draws() / 2];
    assert!((null.p_value(median) - 0.5).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decision_matches_p_value(u in 0.0f64..1.0, alpha in 0.002f64..0.5, on_atom in any::<bool>()) {
        let null = small_null();
        let s = null.statistics();
        let stat = if on_atom {
            s[((u * s.len() as f64) as usize).min(s.len() - 1)]
        } else {
            s[0] + u * (s[s.len() - 1] - s[0]) * 1.1
        };
        let cv = null.critical_value(alpha).unwrap();
        prop_assert_eq!(stat > cv, null.p_value(stat) <= alpha);
    }

    #[test]
    fn artifact_json_round_trip(
        k in 3usize..500,
        alpha in 0.001f64..0.999,
        points in 2usize..60,
        cv in 1e-6f64..1e6,
        draws in 1000usize..1_000_000,
        seed in any::<u64>(),
        equal in any::<bool>(),
        raw in prop::collection::vec(0.0f64..1.0, 60),
    ) {
        let grid: Vec<f64> = equal_grid(points, 0.99).unwrap().iter().map(|p| p.value()).collect();
        let lambda_masses = equal.then(|| {
            let m = &raw[..points];
            let total: f64 = m.iter().sum::<f64>() + 1e-3;
            let mut masses: Vec<f64> = m.iter().map(|x| x / total).collect();
            let rest = 1.0 - masses.iter().sum::<f64>();
            masses[0] += rest;
            masses
        });
        let a = CalibrationArtifact {
            version: ARTIFACT_VERSION,
            kind: if equal { TestKind::EqualTail } else { TestKind::ThinTail },
            k,
            alpha,
            grid_points: grid,
            lambda_masses,
            cv,
            mc_draws: draws,
            seed,
        };
        prop_assume!(a.validate().is_ok());
        let back = CalibrationArtifact::from_json(&a.to_json()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn statistics_are_affine_invariant() {
    let test = ThinTailTest::calibrate(8, 0.05, WeightGrid::uniform(10, 0.9).unwrap(), 1000, 3, &q()).unwrap();
    let mut rng = seeded(8);
    for _ in 0..20 {
        let v = sample_normalized(xi(0.4), 8, &mut rng).unwrap();
        let tail = SortedTail::new(v.values().iter().map(|x| 3.0 * x + 1.0).collect()).unwrap();
        let base = thin_tail_test(&tail, &test).unwrap();
        for (a, b) in [(0.01, -5.0), (17.0, 123.0), (1e4, 0.5)] {
            let moved = thin_tail_test(&tail.affine(a, b).unwrap(), &test).unwrap();
            assert!((moved.statistic / base.statistic - 1.0).abs() < 1e-10);
            assert_eq!(moved.reject, base.reject);
        }
    }
}

#[test]
fn equal_tail_statistic_points_towards_heavier_lower_tail() {
    let points = equal_grid(10, 0.9).unwrap();
    let alt = PairWeight::uniform_alternative(points.clone()).unwrap();
    let lfd = LeastFavorableDistribution { grid: WeightGrid::uniform_on(points).unwrap(), scale: 1.0 };
    let mut rng = seeded(31);
    let n = 200;
    let mut agree = 0;
    for _ in 0..n {
        let heavy = sample_normalized(xi(0.8), 30, &mut rng).unwrap();
        let thin = sample_normalized(xi(0.0), 30, &mut rng).unwrap();
        let forward = equal_tail_statistic(&heavy, &thin, &alt, &lfd, &q()).unwrap();
        let backward = equal_tail_statistic(&thin, &heavy, &alt, &lfd, &q()).unwrap();
        agree += usize::from(forward > backward);
    }
    assert!(agree as f64 >= 0.9 * n as f64, "{agree} of {n}");
}

fn small_equal_test() -> EqualTailTest {
    let settings = LfdSettings { draws: 2000, iterations: 100, ..LfdSettings::default() };
    EqualTailTest::calibrate(5, 0.05, equal_grid(10, 0.9).unwrap(), &settings, 4, &q()).unwrap().0
}

#[test]
fn inflated_critical_value_almost_never_rejects() {
    let mut artifact = small_equal_test().artifact().clone();
    artifact.cv *= 10.0;
    let strict = EqualTailTest::from_artifact(artifact, &q()).unwrap();
    let report = verify_size(&strict, &[xi(0.0), xi(0.45), xi(0.9)], 2000, 9).unwrap();
    assert!(report.max_rate() < 0.01, "{:?}", report.rows);
    assert!(!report.any_flagged());
}

#[test]
fn default_calibration_passes_size_verification() {
    let (test, _) =
        EqualTailTest::calibrate(5, 0.05, equal_grid(50, 0.99).unwrap(), &LfdSettings::default(), 5, &q()).unwrap();
    let grid = [0.0, 0.25, 0.5, 0.75, 0.95].map(xi);
    let report = verify_size(&test, &grid, 5000, 6).unwrap();
    assert!(!report.any_flagged(), "{:?}", report.rows);
    assert!(report.max_rate() <= 0.055, "{:?}", report.rows);
}
