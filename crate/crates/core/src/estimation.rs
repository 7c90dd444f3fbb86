//! Maximum-likelihood fitting of a fixed SARIMA order.
//!
//! The innovation variance is profiled out, AR blocks are optimized through
//! the partial-autocorrelation reparameterization (so every candidate is
//! stationary) and MA blocks are optimized unconstrained.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ar_to_pacf, concentrated_loglik, innovations, pacf_to_ar, Innovations, ModelOrder, ParamVector};
use crate::linalg::{invert_spd, least_squares, Mat};
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::series::{difference_values, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Relative tolerance on the log-likelihood.
    pub tol: f64,
    /// Simplex iteration budget per starting point.
    pub max_iter: usize,
    /// Also start from a Hannan-Rissanen regression estimate.
    pub hannan_rissanen: bool,
    /// Finite-difference step for the Hessian, scaled by `max(|β|, 1)`.
    pub hessian_step: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 2000,
            hannan_rissanen: true,
            hessian_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub order: ModelOrder,
    pub params: ParamVector,
    /// One entry per coefficient in `ar, ma, sar, sma` order; `None` when the
    /// Hessian was not positive definite.
    pub stderr: Vec<Option<f64>>,
    pub loglik: f64,
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    pub sigma2: f64,
    pub n_effective: usize,
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    /// One-step prediction errors over the differenced training series.
    pub fn innovations(&self, training: &TimeSeries) -> Result<Innovations> {
        let diffed = self.diffed(training)?;
        innovations(&self.order, &self.params, &diffed)
    }

    /// In-sample one-step predictions on the level scale.
    ///
    /// The first `d + D·s` observations have no prediction; the returned
    /// series starts right after them.
    pub fn fitted_levels(&self, training: &TimeSeries) -> Result<TimeSeries> {
        let inn = self.innovations(training)?;
        let m = self.order.diff_loss();
        let fitted = training.values()[m..]
            .iter()
            .zip(&inn.residuals)
            .map(|(x, v)| x - v)
            .collect();
        TimeSeries::new(training.month_at(m), fitted)
    }

    fn diffed(&self, training: &TimeSeries) -> Result<Vec<f64>> {
        let o = &self.order;
        let diffed = difference_values(training.values(), o.d, o.sd, o.period)?;
        if diffed.len() != self.n_effective {
            return Err(Error::ShapeMismatch(format!(
                "fit used {} differenced observations, training gives {}",
                self.n_effective,
                diffed.len()
            )));
        }
        Ok(diffed)
    }
}

/// `(aic, aicc, bic)` for `k` estimated parameters and `n` observations.
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> Result<(f64, f64, f64)> {
    if n <= k + 1 {
        return Err(Error::DegenerateSampleSize { n, k });
    }
    let kf = k as f64;
    let aic = -2.0 * loglik + 2.0 * kf;
    let aicc = aic + 2.0 * kf * (kf + 1.0) / (n as f64 - kf - 1.0);
    let bic = -2.0 * loglik + kf * (n as f64).ln();
    Ok((aic, aicc, bic))
}

/// Optimizer coordinates: AR blocks as `atanh` of partial autocorrelations,
/// MA blocks raw.
struct Transform {
    order: ModelOrder,
}

impl Transform {
    fn params(&self, u: &[f64]) -> ParamVector {
        let o = &self.order;
        let (ar, rest) = u.split_at(o.p);
        let (ma, rest) = rest.split_at(o.q);
        let (sar, sma) = rest.split_at(o.sp);
        let constrain = |block: &[f64]| pacf_to_ar(&block.iter().map(|v| v.tanh()).collect::<Vec<_>>());
        ParamVector {
            ar: constrain(ar),
            ma: ma.to_vec(),
            sar: constrain(sar),
            sma: sma.to_vec(),
            sigma2: 1.0,
        }
    }

    fn coords(&self, params: &ParamVector) -> Vec<f64> {
        let unconstrain = |block: &[f64]| -> Vec<f64> {
            match ar_to_pacf(block) {
                Some(r) => r.iter().map(|v| v.clamp(-0.99, 0.99).atanh()).collect(),
                None => vec![0.0; block.len()],
            }
        };
        [
            unconstrain(&params.ar),
            params.ma.clone(),
            unconstrain(&params.sar),
            params.sma.clone(),
        ]
        .concat()
    }
}

struct Candidate {
    params: ParamVector,
    loglik: f64,
    sigma2: f64,
    iterations: usize,
    converged: bool,
}

fn optimize_from(order: &ModelOrder, diffed: &[f64], start: &ParamVector, config: &FitConfig) -> Option<Candidate> {
    let transform = Transform { order: *order };
    let objective = |u: &[f64]| match concentrated_loglik(order, &transform.params(u), diffed) {
        Ok((l, _)) => -l,
        Err(_) => f64::INFINITY,
    };
    let mut x = transform.coords(start);
    let mut value = objective(&x);
    let mut iterations = 0;
    let mut converged = false;
    // Restart from the best vertex until a fresh simplex stops improving.
    while iterations < config.max_iter {
        let nm = NelderMeadConfig {
            max_iter: config.max_iter - iterations,
            rel_tol: config.tol,
            ..Default::default()
        };
        let m = nelder_mead(objective, &x, &nm);
        iterations += m.iterations;
        let improved = value - m.value > config.tol * (m.value.abs() + config.tol);
        if m.value <= value {
            x = m.x;
            value = m.value;
        }
        converged = m.converged;
        if !m.converged || !improved {
            break;
        }
    }
    if !value.is_finite() {
        return None;
    }
    let params = transform.params(&x);
    let (loglik, sigma2) = concentrated_loglik(order, &params, diffed).ok()?;
    Some(Candidate {
        params,
        loglik,
        sigma2,
        iterations,
        converged,
    })
}

/// Yule-Walker AR(m) coefficients from the biased sample autocovariances.
fn yule_walker(x: &[f64], m: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let acov: Vec<f64> = (0..=m)
        .map(|k| (k..n).map(|t| (x[t] - mean) * (x[t - k] - mean)).sum::<f64>() / n as f64)
        .collect();
    if !(acov[0] > 0.0) {
        return None;
    }
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    let mut err = acov[0];
    for k in 1..=m {
        let num = acov[k] - (0..k - 1).map(|j| phi[j] * acov[k - 1 - j]).sum::<f64>();
        let r = num / err;
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - r * prev[k - 2 - j];
        }
        phi.push(r);
        err *= 1.0 - r * r;
        if !(err > 0.0) {
            return None;
        }
    }
    Some(phi)
}

/// Hannan-Rissanen style start: long-AR residuals stand in for the
/// innovations, then one additive-lag regression gives all blocks.
fn hannan_rissanen(order: &ModelOrder, w: &[f64]) -> Option<ParamVector> {
    let n = w.len();
    let s = order.period;
    let has_ma = order.q + order.sq > 0;
    let long = if has_ma {
        let floor = (10.0 * (n as f64).log10()).ceil() as usize;
        order.ar_degree().max(order.ma_degree()).max(floor).min(n / 4).max(1)
    } else {
        0
    };
    let eps: Vec<f64> = if has_ma {
        let a = yule_walker(w, long)?;
        (0..n)
            .map(|t| {
                if t < long {
                    0.0
                } else {
                    w[t] - (0..long).map(|i| a[i] * w[t - 1 - i]).sum::<f64>()
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let ar_lags: Vec<usize> = (1..=order.p).chain((1..=order.sp).map(|j| j * s)).collect();
    let ma_lags: Vec<usize> = (1..=order.q).chain((1..=order.sq).map(|j| j * s)).collect();
    let t0 = ar_lags
        .iter()
        .copied()
        .chain(ma_lags.iter().map(|&l| l + long))
        .max()
        .unwrap_or(0);
    let cols = ar_lags.len() + ma_lags.len();
    if cols == 0 || n < t0 + cols + 10 {
        return None;
    }
    let rows = n - t0;
    let mut design = Vec::with_capacity(rows * cols);
    for t in t0..n {
        design.extend(ar_lags.iter().map(|&l| w[t - l]));
        design.extend(ma_lags.iter().map(|&l| eps[t - l]));
    }
    let fit = least_squares(&Mat::from_rows(rows, cols, design), &w[t0..])?;
    let c = &fit.coefficients;
    let (ar, rest) = c.split_at(order.p);
    let (sar, rest) = rest.split_at(order.sp);
    let (ma, sma) = rest.split_at(order.q);
    let stationary_or_zero = |b: &[f64]| {
        if crate::kernel::is_stationary(b) {
            b.to_vec()
        } else {
            vec![0.0; b.len()]
        }
    };
    let clamp = |b: &[f64]| b.iter().map(|v| v.clamp(-0.9, 0.9)).collect::<Vec<_>>();
    Some(ParamVector {
        ar: stationary_or_zero(ar),
        ma: clamp(ma),
        sar: stationary_or_zero(sar),
        sma: clamp(sma),
        sigma2: 1.0,
    })
}

/// Fits `order` to `training` by exact maximum likelihood.
pub fn fit(order: &ModelOrder, training: &TimeSeries, config: &FitConfig) -> Result<FitResult> {
    let diffed = difference_values(training.values(), order.d, order.sd, order.period)?;
    let n = diffed.len();
    let k = order.param_count();
    if n < 10 * k {
        return Err(Error::InsufficientData(format!(
            "{n} differenced observations for {k} parameters; need at least {}",
            10 * k
        )));
    }

    let best = if order.coef_count() == 0 {
        let params = ParamVector::zeros(order, 1.0);
        let (loglik, sigma2) = concentrated_loglik(order, &params, &diffed)?;
        Candidate {
            params,
            loglik,
            sigma2,
            iterations: 0,
            converged: true,
        }
    } else {
        let mut starts = vec![ParamVector::zeros(order, 1.0)];
        if config.hannan_rissanen {
            if let Some(hr) = hannan_rissanen(order, &diffed) {
                if hr != starts[0] {
                    starts.push(hr);
                }
            }
        }
        starts
            .iter()
            .filter_map(|start| optimize_from(order, &diffed, start, config))
            .reduce(|a, b| if b.loglik > a.loglik { b } else { a })
            .ok_or(Error::NonFiniteLikelihood)?
    };

    let params = ParamVector {
        sigma2: best.sigma2,
        ..best.params
    };
    let stderr = hessian_std_errors(order, &params, &diffed, config.hessian_step);
    let (aic, aicc, bic) = information_criteria(best.loglik, k, n)?;
    Ok(FitResult {
        order: *order,
        params,
        stderr,
        loglik: best.loglik,
        aic,
        aicc,
        bic,
        sigma2: best.sigma2,
        n_effective: n,
        converged: best.converged,
        iterations: best.iterations,
    })
}

/// Standard errors from the inverse numerical Hessian of the profile
/// log-likelihood at `params`.
pub fn standard_errors(order: &ModelOrder, params: &ParamVector, training: &TimeSeries) -> Result<Vec<Option<f64>>> {
    params.check(order)?;
    let diffed = difference_values(training.values(), order.d, order.sd, order.period)?;
    Ok(hessian_std_errors(order, params, &diffed, FitConfig::default().hessian_step))
}

fn hessian_std_errors(order: &ModelOrder, params: &ParamVector, diffed: &[f64], step: f64) -> Vec<Option<f64>> {
    let beta = params.coefficients();
    let c = beta.len();
    let unavailable = vec![None; c];
    if c == 0 {
        return Vec::new();
    }
    let neg_loglik = |b: &[f64]| -> Option<f64> {
        let p = ParamVector::from_coefficients(order, b, 1.0).ok()?;
        concentrated_loglik(order, &p, diffed).ok().map(|(l, _)| -l)
    };
    let Some(center) = neg_loglik(&beta) else {
        return unavailable;
    };
    let h: Vec<f64> = beta.iter().map(|b| step * b.abs().max(1.0)).collect();
    let shifted = |moves: &[(usize, f64)]| {
        let mut b = beta.clone();
        for &(i, sign) in moves {
            b[i] += sign * h[i];
        }
        neg_loglik(&b)
    };
    let mut hess = Mat::zeros(c, c);
    for i in 0..c {
        let (Some(up), Some(down)) = (shifted(&[(i, 1.0)]), shifted(&[(i, -1.0)])) else {
            return unavailable;
        };
        hess[(i, i)] = (up - 2.0 * center + down) / (h[i] * h[i]);
        for j in 0..i {
            let corners = [
                shifted(&[(i, 1.0), (j, 1.0)]),
                shifted(&[(i, 1.0), (j, -1.0)]),
                shifted(&[(i, -1.0), (j, 1.0)]),
                shifted(&[(i, -1.0), (j, -1.0)]),
            ];
            let [Some(pp), Some(pm), Some(mp), Some(mm)] = corners else {
                return unavailable;
            };
            let v = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    match invert_spd(&hess) {
        Some(inv) => (0..c)
            .map(|i| {
                let v = inv[(i, i)];
                (v > 0.0 && v.is_finite()).then(|| v.sqrt())
            })
            .collect(),
        None => unavailable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::simulate;
    use approx::assert_relative_eq;

    #[test]
    fn criteria_formulas() {
        let (aic, aicc, bic) = information_criteria(-100.0, 3, 50).unwrap();
        assert_relative_eq!(aic, 206.0);
        assert_relative_eq!(aicc, 206.0 + 24.0 / 46.0, epsilon = 1e-12);
        assert_relative_eq!(bic, 200.0 + 3.0 * 50f64.ln(), epsilon = 1e-12);
        let (aic, _, bic) = information_criteria(0.0, 0, 10).unwrap();
        assert_eq!((aic, bic), (0.0, 0.0));
        assert!(matches!(
            information_criteria(-1.0, 5, 6),
            Err(Error::DegenerateSampleSize { n: 6, k: 5 })
        ));
    }

    #[test]
    fn reference_criteria_convention() {
        // 11 coefficients + σ² over 231 - 13 differenced observations
        let (aic, aicc, bic) = information_criteria(-3373.02, 12, 218).unwrap();
        assert!((aic - 6770.03).abs() < 0.05, "{aic}");
        assert!((aicc - 6771.55).abs() < 0.05, "{aicc}");
        assert!((bic - 6810.64).abs() < 0.05, "{bic}");
    }

    #[test]
    fn transform_round_trip() {
        let order = ModelOrder::new(2, 0, 1, 1, 0, 0, 12).unwrap();
        let t = Transform { order };
        let params = ParamVector {
            ar: vec![0.5, -0.2],
            ma: vec![0.3],
            sar: vec![0.4],
            sma: vec![],
            sigma2: 1.0,
        };
        let back = t.params(&t.coords(&params));
        for (a, b) in back.coefficients().iter().zip(params.coefficients()) {
            assert_relative_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn white_noise_fit_is_closed_form() {
        let order = ModelOrder::arima(0, 0, 0);
        let x: Vec<f64> = (0..40).map(|i| ((i * 13 % 7) as f64 - 3.0) * 0.5).collect();
        let series = TimeSeries::new(crate::MonthStamp::new(2000, 1).unwrap(), x.clone()).unwrap();
        let f = fit(&order, &series, &FitConfig::default()).unwrap();
        let ms = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert_relative_eq!(f.sigma2, ms, epsilon = 1e-12);
        let n = x.len() as f64;
        let closed = -0.5 * n * (2.0 * std::f64::consts::PI * ms).ln() - 0.5 * n;
        assert_relative_eq!(f.loglik, closed, epsilon = 1e-10);
        assert!(f.converged && f.stderr.is_empty());
    }

    #[test]
    fn insufficient_data() {
        let order = ModelOrder::arima(2, 0, 2);
        let series = TimeSeries::new(crate::MonthStamp::new(2000, 1).unwrap(), vec![1.0; 30]).unwrap();
        assert!(matches!(
            fit(&order, &series, &FitConfig::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn hannan_rissanen_lands_near_truth() {
        let order = ModelOrder::arima(1, 0, 1);
        let truth = ParamVector {
            ar: vec![0.6],
            ma: vec![0.3],
            ..ParamVector::zeros(&order, 1.0)
        };
        let x = simulate(&order, &truth, 3000, 17, 200).unwrap();
        let hr = hannan_rissanen(&order, x.values()).unwrap();
        assert!((hr.ar[0] - 0.6).abs() < 0.1, "{:?}", hr);
        assert!((hr.ma[0] - 0.3).abs() < 0.1, "{:?}", hr);
    }
}
