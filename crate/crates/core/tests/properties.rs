mod common;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use proptest::prelude::*;

use tvvar_efficiency::inference::classify_segments;
use tvvar_efficiency::series::{
    descriptive_stats, interpolate_missing, log_returns, PriceSeries, ReturnMatrix,
};
use tvvar_efficiency::tvvar::{solve_tvvar_matrix, EfficiencyPath};
use tvvar_efficiency::var::efficiency_degree;

fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 1).unwrap()
}

fn returns(values: &[f64], n: usize) -> ReturnMatrix {
    let t = values.len() / n;
    ReturnMatrix::with_daily_dates(
        start(),
        (0..n).map(|j| format!("s{j}")).collect(),
        DMatrix::from_row_slice(t, n, &values[..t * n]),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_returns_round_trip(r in prop::collection::vec(-0.05f64..0.05, 4..60)) {
        let x = returns(&r, 1);
        let back = log_returns(&x.to_prices(100.0).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(x.values().iter()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_idempotent_and_keeps_observed_cells(
        r in prop::collection::vec(-0.05f64..0.05, 12..60),
        holes in prop::collection::vec(any::<bool>(), 60),
    ) {
        let p = returns(&r, 1).to_prices(50.0).unwrap();
        let t = p.len();
        let mut mask = DMatrix::from_element(t, 1, false);
        for i in 1..t - 1 {
            mask[(i, 0)] = holes[i] && i % 3 != 0;
        }
        let gappy = PriceSeries::new(p.dates().to_vec(), p.labels().to_vec(), p.prices().clone(), mask.clone()).unwrap();
        let once = interpolate_missing(&gappy).unwrap();
        let twice = interpolate_missing(&once).unwrap();
        prop_assert_eq!(once.prices(), twice.prices());
        for i in 0..t {
            if !mask[(i, 0)] {
                prop_assert_eq!(once.prices()[(i, 0)].to_bits(), p.prices()[(i, 0)].to_bits());
            }
        }
    }

    #[test]
    fn stats_ignore_row_and_column_order(
        r in prop::collection::vec(-1.0f64..1.0, 6..60),
        rot in 0usize..30,
    ) {
        let x = returns(&r, 2);
        let s = descriptive_stats(&x).unwrap();
        let t = x.len();
        let k = rot % t;
        let permuted = DMatrix::from_fn(t, 2, |i, j| x.values()[((i + k) % t, 1 - j)]);
        let y = ReturnMatrix::with_daily_dates(start(), vec!["s1".into(), "s0".into()], permuted).unwrap();
        let p = descriptive_stats(&y).unwrap();
        for j in 0..2 {
            let (a, b) = (&s.columns[j], &p.columns[1 - j]);
            prop_assert_eq!(&a.label, &b.label);
            prop_assert!((a.mean - b.mean).abs() < 1e-12);
            prop_assert_eq!(a.max, b.max);
            prop_assert_eq!(a.min, b.min);
            prop_assert!(a.min <= a.mean + 1e-15 && a.mean <= a.max + 1e-15);
        }
    }

    #[test]
    fn zeta_is_nonnegative_and_relabelling_invariant(
        v in prop::collection::vec(-0.3f64..0.3, 4),
    ) {
        let a = DMatrix::from_row_slice(2, 2, &v);
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let z = efficiency_degree(&[a.clone()]).unwrap();
        let zp = efficiency_degree(&[&swap * &a * &swap]).unwrap();
        prop_assert!(z >= 0.0);
        prop_assert!((z - zp).abs() < 1e-12);
        prop_assert!((z - common::zeta_oracle(&[a])).abs() < 1e-10);
    }

    #[test]
    fn tvvar_solution_beats_perturbations(
        r in prop::collection::vec(-1.0f64..1.0, 80..120),
        lambda in 0.2f64..3.0,
        at in 0usize..40,
        delta in -0.1f64..0.1,
    ) {
        let x = DMatrix::from_row_slice(r.len() / 2, 2, &r[..r.len() / 2 * 2]);
        let fit = solve_tvvar_matrix(&x, 1, lambda).unwrap();
        let base = fit.objective();
        let mut other = fit.clone();
        let t = at % other.a_path.len();
        other.a_path[t][0][(0, 1)] += delta;
        // residuals must follow the perturbed coefficient
        other.residuals[(t, 0)] -= delta * x[(t, 1)];
        prop_assert!(other.objective() >= base - 1e-9 * (1.0 + base));
    }

    #[test]
    fn segments_partition_the_path(
        flags in prop::collection::vec(any::<bool>(), 1..120),
        min_run in 1usize..25,
    ) {
        let n = flags.len();
        let path = EfficiencyPath {
            dates: vec![],
            zeta: vec![Some(0.1); n],
            band_lower: Some(vec![0.0; n]),
            band_upper: Some(vec![1.0; n]),
            efficient_flag: Some(flags),
        };
        let segs = classify_segments(&path, min_run).unwrap();
        prop_assert_eq!(segs[0].start, 0);
        prop_assert_eq!(segs.last().unwrap().end, n - 1);
        for w in segs.windows(2) {
            prop_assert_eq!(w[0].end + 1, w[1].start);
            prop_assert!(w[0].label != w[1].label);
        }
        if segs.len() > 1 {
            prop_assert!(segs.iter().all(|s| s.len() >= min_run));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bootstrap_bands_are_ordered_and_reproducible(seed in 0u64..1000) {
        use tvvar_efficiency::inference::{bootstrap_bands, BootstrapSpec};
        use tvvar_efficiency::synth::{gen_returns, ScenarioSpec};

        let (x, _) = gen_returns(&ScenarioSpec { noise_sd: 0.01, ..ScenarioSpec::iid(60, 2, seed) }).unwrap();
        let spec = BootstrapSpec { replications: 200, coverage: 0.9, seed, lambda: 0.5, q: 1 };
        let a = bootstrap_bands(&x, &spec).unwrap();
        let b = bootstrap_bands(&x, &spec).unwrap();
        prop_assert_eq!(&a, &b);
        let (lo, hi) = (a.band_lower.as_ref().unwrap(), a.band_upper.as_ref().unwrap());
        for t in 0..a.len() {
            prop_assert!(lo[t] <= hi[t]);
            prop_assert!(lo[t] >= 0.0);
        }
    }
}
