use sarima_core::estimation::{fit, information_criteria, standard_errors, FitConfig};
use sarima_core::kernel::{loglik, psi_weights, simulate, simulate_arma};
use sarima_core::series::difference_values;
use sarima_core::{ModelOrder, ParamVector};

/// Gaussian log-density of `x` under a stationary ARMA, built from a dense
/// Toeplitz covariance of truncated ψ-weight autocovariances.
fn dense_loglik(order: &ModelOrder, params: &ParamVector, x: &[f64]) -> f64 {
    let n = x.len();
    let psi = psi_weights(order, params, 4000).unwrap();
    let mut full = vec![1.0];
    full.extend(psi);
    let gamma: Vec<f64> = (0..n)
        .map(|k| params.sigma2 * (0..full.len() - k).map(|j| full[j] * full[j + k]).sum::<f64>())
        .collect();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = gamma[i - j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = if i == j { s.sqrt() } else { s / l[j * n + j] };
        }
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * z[k]).sum();
        z[i] = (x[i] - s) / l[i * n + i];
    }
    let logdet: f64 = (0..n).map(|i| 2.0 * l[i * n + i].ln()).sum();
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + z.iter().map(|v| v * v).sum::<f64>())
}

#[test]
fn kalman_matches_dense_gaussian_density() {
    let cases = [
        (
            ModelOrder::arima(2, 0, 1),
            ParamVector { ar: vec![0.5, -0.3], ma: vec![0.4], sar: vec![], sma: vec![], sigma2: 1.3 },
        ),
        (
            ModelOrder::new(1, 0, 1, 1, 0, 1, 4).unwrap(),
            ParamVector { ar: vec![0.3], ma: vec![-0.2], sar: vec![0.5], sma: vec![0.4], sigma2: 0.7 },
        ),
        (
            ModelOrder::new(0, 0, 1, 0, 0, 1, 12).unwrap(),
            ParamVector { ar: vec![], ma: vec![-0.4], sar: vec![], sma: vec![-0.6], sigma2: 2.0 },
        ),
    ];
    for (i, (order, params)) in cases.iter().enumerate() {
        let x = simulate_arma(order, params, 60, i as u64, 100).unwrap();
        let got = loglik(order, params, &x).unwrap();
        let want = dense_loglik(order, params, &x);
        assert!((got - want).abs() < 1e-8 * want.abs().max(1.0), "case {i}: {got} vs {want}");
    }
}

#[test]
fn recovers_seasonal_ar() {
    let order = ModelOrder::new(1, 0, 0, 1, 0, 0, 12).unwrap();
    let truth = ParamVector { ar: vec![0.5], sar: vec![0.4], ..ParamVector::zeros(&order, 1.0) };
    let x = simulate(&order, &truth, 1000, 42, 300).unwrap();
    let f = fit(&order, &x, &FitConfig::default()).unwrap();
    assert!(f.converged);
    for (est, (true_value, se)) in f.params.coefficients().iter().zip([0.5, 0.4].iter().zip(&f.stderr)) {
        let se = se.expect("standard error");
        assert!((est - true_value).abs() < 3.0 * se, "{est} vs {true_value} (se {se})");
    }
    assert!((f.sigma2 - 1.0).abs() < 0.15);
}

#[test]
fn recovers_airline_model() {
    let order = ModelOrder::new(0, 1, 1, 0, 1, 1, 12).unwrap();
    let truth = ParamVector { ma: vec![-0.4], sma: vec![-0.6], ..ParamVector::zeros(&order, 1.0) };
    let x = simulate(&order, &truth, 600, 7, 200).unwrap();
    let f = fit(&order, &x, &FitConfig::default()).unwrap();
    assert_eq!(f.n_effective, 600 - 13);
    assert!((f.params.ma[0] + 0.4).abs() < 0.12, "{:?}", f.params);
    assert!((f.params.sma[0] + 0.6).abs() < 0.12, "{:?}", f.params);
    let (aic, aicc, bic) = information_criteria(f.loglik, 3, 587).unwrap();
    assert_eq!((aic, aicc, bic), (f.aic, f.aicc, f.bic));
}

#[test]
fn fitted_loglik_is_a_local_maximum() {
    let order = ModelOrder::arima(1, 0, 1);
    let truth = ParamVector { ar: vec![0.7], ma: vec![-0.3], ..ParamVector::zeros(&order, 2.0) };
    let x = simulate(&order, &truth, 400, 3, 100).unwrap();
    let f = fit(&order, &x, &FitConfig::default()).unwrap();
    let best = loglik(&order, &f.params, x.values()).unwrap();
    assert!((best - f.loglik).abs() < 1e-9 * best.abs());
    for (dar, dma) in [(0.01, 0.0), (-0.01, 0.0), (0.0, 0.01), (0.0, -0.01)] {
        let moved = ParamVector { ar: vec![f.params.ar[0] + dar], ma: vec![f.params.ma[0] + dma], ..f.params.clone() };
        assert!(loglik(&order, &moved, x.values()).unwrap() < best);
    }
}

#[test]
fn standard_errors_match_ar1_asymptotics() {
    // var(φ̂) ≈ (1 - φ²) / n for an AR(1)
    let order = ModelOrder::arima(1, 0, 0);
    let truth = ParamVector { ar: vec![0.6], ..ParamVector::zeros(&order, 1.0) };
    let x = simulate(&order, &truth, 2000, 9, 100).unwrap();
    let f = fit(&order, &x, &FitConfig::default()).unwrap();
    let se = f.stderr[0].unwrap();
    let phi = f.params.ar[0];
    let asymptotic = ((1.0 - phi * phi) / 2000.0).sqrt();
    assert!((se / asymptotic - 1.0).abs() < 0.05, "{se} vs {asymptotic}");
    let again = standard_errors(&order, &f.params, &x).unwrap();
    assert_eq!(again, f.stderr);
}

#[test]
fn json_round_trip() {
    let order = ModelOrder::new(0, 1, 1, 0, 0, 0, 12).unwrap();
    let truth = ParamVector { ma: vec![0.3], ..ParamVector::zeros(&order, 1.0) };
    let x = simulate(&order, &truth, 120, 1, 50).unwrap();
    let f = fit(&order, &x, &FitConfig::default()).unwrap();
    let json = serde_json::to_value(&f).unwrap();
    for key in ["order", "params", "stderr", "loglik", "aic", "aicc", "bic", "sigma2", "n_effective", "converged", "iterations"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    let back: sarima_core::estimation::FitResult = serde_json::from_value(json).unwrap();
    assert_eq!(back, f);
    let diffed = difference_values(x.values(), 1, 0, 12).unwrap();
    assert_eq!(diffed.len(), f.n_effective);
}
