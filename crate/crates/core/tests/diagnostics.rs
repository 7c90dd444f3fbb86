use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use sarima_core::diagnostics::{
    acf, adf_test, box_pierce, ks_normality, ljung_box, pacf, residual_report, AdfRegression, KsMethod, ReportConfig,
};
use sarima_core::estimation::{fit, FitConfig};
use sarima_core::kernel::{simulate, simulate_arma};
use sarima_core::{ModelOrder, ParamVector};

fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

#[test]
fn white_noise_acf_within_bartlett_bounds() {
    // pooled over 20 series so the 99% threshold has a meaningful denominator
    let bound = 3.0 / 10_000f64.sqrt();
    let (mut acf_inside, mut pacf_inside) = (0, 0);
    for seed in 0..20 {
        let x = normal_draws(10_000, seed);
        acf_inside += acf(&x, 50).unwrap()[1..].iter().filter(|v| v.abs() < bound).count();
        pacf_inside += pacf(&x, 50).unwrap().iter().filter(|v| v.abs() < bound).count();
    }
    assert!(acf_inside as f64 >= 0.99 * 1000.0, "{acf_inside}/1000");
    assert!(pacf_inside as f64 >= 0.99 * 1000.0, "{pacf_inside}/1000");
}

#[test]
fn ar1_pacf_cuts_off() {
    let order = ModelOrder::arima(1, 0, 0);
    let params = ParamVector { ar: vec![0.6], ..ParamVector::zeros(&order, 1.0) };
    let x = simulate_arma(&order, &params, 100_000, 2, 500).unwrap();
    let p = pacf(&x, 10).unwrap();
    assert!((p[0] - 0.6).abs() < 0.01);
    assert!(p[1..].iter().all(|v| v.abs() < 0.015), "{p:?}");
}

#[test]
fn portmanteau_statistics_converge() {
    let x = normal_draws(10_000, 3);
    let q = box_pierce(&x, 24, 0).unwrap().statistic;
    let qs = ljung_box(&x, 24, 0).unwrap().statistic;
    assert!((qs - q) / q < 0.05);
}

#[test]
fn adf_size_and_power_sketch() {
    let mut reject_iid = 0;
    let mut accept_rw = 0;
    for seed in 0..60 {
        let e = normal_draws(500, 1000 + seed);
        if adf_test(&e, AdfRegression::Trend, None).unwrap().p_value <= 0.01 {
            reject_iid += 1;
        }
        let walk: Vec<f64> = e.iter().scan(0.0, |s, v| { *s += v; Some(*s) }).collect();
        if adf_test(&walk, AdfRegression::Trend, None).unwrap().p_value > 0.05 {
            accept_rw += 1;
        }
    }
    assert_eq!(reject_iid, 60);
    assert!(accept_rw >= 50, "{accept_rw}");
}

#[test]
fn ks_detects_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = Exp::new(1.0).unwrap();
    let x: Vec<f64> = (0..500).map(|_| d.sample(&mut rng)).collect();
    assert!(ks_normality(&x, KsMethod::Asymptotic).unwrap().p_value < 0.001);
}

#[test]
fn stephens_scaling_is_more_conservative() {
    let x = normal_draws(200, 5);
    let a = ks_normality(&x, KsMethod::Asymptotic).unwrap();
    let b = ks_normality(&x, KsMethod::Stephens).unwrap();
    assert_eq!(a.statistic, b.statistic);
    assert!(b.p_value <= a.p_value);
}

#[test]
fn misspecified_fit_fails_autocorrelation_check() {
    let ar1 = ModelOrder::arima(1, 0, 0);
    let params = ParamVector { ar: vec![0.6], ..ParamVector::zeros(&ar1, 1.0) };
    let x = simulate(&ar1, &params, 300, 6, 100).unwrap();
    let wn = ModelOrder::arima(0, 0, 0);
    let f = fit(&wn, &x, &FitConfig::default()).unwrap();
    let report = residual_report(&f, &x, &ReportConfig::default()).unwrap();
    assert!(!report.checks.no_autocorrelation);

    let f = fit(&ar1, &x, &FitConfig::default()).unwrap();
    let report = residual_report(&f, &x, &ReportConfig::default()).unwrap();
    assert!(report.checks.no_autocorrelation);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["box_pierce"]["detail"]["fitdf"], 1);
    assert_eq!(json["adf"]["detail"]["regression"], "trend");
}

#[test]
fn well_specified_fits_pass_assumption_checks() {
    let order = ModelOrder::new(0, 1, 1, 0, 1, 1, 12).unwrap();
    let params = ParamVector { ma: vec![-0.4], sma: vec![-0.6], ..ParamVector::zeros(&order, 1.0) };
    let trials = 60;
    let mut passes = 0;
    for seed in 0..trials {
        let x = simulate(&order, &params, 240, 500 + seed, 100).unwrap();
        let f = fit(&order, &x, &FitConfig::default()).unwrap();
        let c = residual_report(&f, &x, &ReportConfig::default()).unwrap().checks;
        if c.zero_mean && c.no_autocorrelation && c.normality {
            passes += 1;
        }
    }
    assert!(passes as f64 >= 0.9 * trials as f64 - 1e-9, "{passes}/{trials}");
}

proptest! {
    #[test]
    fn ljung_box_dominates_box_pierce(x in proptest::collection::vec(-10.0f64..10.0, 30..80), h in 1usize..10) {
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-6));
        let q = box_pierce(&x, h, 0).unwrap().statistic;
        let qs = ljung_box(&x, h, 0).unwrap().statistic;
        prop_assert!(qs >= q);
    }

    #[test]
    fn correlograms_are_affine_invariant(x in proptest::collection::vec(-10.0f64..10.0, 20..60), a in 0.1f64..5.0, neg in any::<bool>(), b in -100.0f64..100.0) {
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-3));
        let a = if neg { -a } else { a };
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        for (u, v) in acf(&x, 5).unwrap().iter().zip(acf(&y, 5).unwrap()) {
            prop_assert!((u - v).abs() < 1e-9);
        }
        for (u, v) in pacf(&x, 5).unwrap().iter().zip(pacf(&y, 5).unwrap()) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn adf_is_scale_invariant(seed in 0u64..1000, c in 0.01f64..100.0) {
        let x: Vec<f64> = normal_draws(80, seed).iter().scan(0.0, |s, v| { *s += v; Some(*s) }).collect();
        let y: Vec<f64> = x.iter().map(|v| v * c).collect();
        let a = adf_test(&x, AdfRegression::Trend, None).unwrap();
        let b = adf_test(&y, AdfRegression::Trend, None).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-8 * a.statistic.abs().max(1.0));
    }
}
