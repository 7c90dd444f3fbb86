//! Kalman filter over the Harvey-form state space.
//!
//! The filter runs at unit innovation variance; `σ²` only rescales the
//! prediction-error variances. Every covariance update exploits the companion
//! structure of `T`, so a step costs `O(r²)`.

use super::poly::expand;
use super::state_space::StateSpace;
use super::{ModelOrder, ParamVector};
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Result of one filtering pass at unit innovation variance.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    /// One-step prediction errors `v_t = y_t - E[y_t | y_{<t}]`.
    pub residuals: Vec<f64>,
    /// Prediction-error variances `F_t` in units of `σ²`.
    pub variances: Vec<f64>,
    /// Predicted state `a_{n+1|n}`.
    pub next_state: Vec<f64>,
    /// Predicted state covariance `P_{n+1|n}` (row-major, units of `σ²`).
    pub next_cov: Vec<f64>,
}

impl FilterOutput {
    pub fn sum_log_variances(&self) -> f64 {
        self.variances.iter().map(|f| f.ln()).sum()
    }

    pub fn sum_weighted_squares(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.variances)
            .map(|(v, f)| v * v / f)
            .sum()
    }
}

pub fn filter(ss: &StateSpace, data: &[f64]) -> Result<FilterOutput> {
    let r = ss.dim();
    let phi = ss.phi();
    let theta = ss.theta();
    let mut state = vec![0.0; r];
    let mut cov = ss.init_cov_slice().to_vec();
    let mut updated = vec![0.0; r * r];
    let mut gain = vec![0.0; r];
    let mut steady = false;
    let mut residuals = Vec::with_capacity(data.len());
    let mut variances = Vec::with_capacity(data.len());

    for &y in data {
        let f = cov[0];
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "prediction-error variance became {f}"
            )));
        }
        let v = y - state[0];
        residuals.push(v);
        variances.push(f);

        if !steady {
            for i in 0..r {
                gain[i] = cov[i * r] / f;
            }
        }
        // filtered state, then predict through T
        let head = state[0] + gain[0] * v;
        for i in 0..r {
            let next = if i + 1 < r { state[i + 1] + gain[i + 1] * v } else { 0.0 };
            state[i] = phi[i] * head + next;
        }
        if steady {
            continue;
        }

        for i in 0..r {
            let gi = cov[i * r];
            for k in i..r {
                let u = cov[i * r + k] - gi * cov[k * r] / f;
                updated[i * r + k] = u;
                updated[k * r + i] = u;
            }
        }
        let at = |m: &[f64], i: usize, k: usize| if i < r && k < r { m[i * r + k] } else { 0.0 };
        let mut delta = 0.0f64;
        let mut scale = 1.0f64;
        let u00 = updated[0];
        for i in 0..r {
            for k in i..r {
                let next = phi[i] * phi[k] * u00
                    + phi[i] * at(&updated, 0, k + 1)
                    + phi[k] * at(&updated, i + 1, 0)
                    + at(&updated, i + 1, k + 1)
                    + theta[i] * theta[k];
                delta = delta.max((next - cov[i * r + k]).abs());
                scale = scale.max(next.abs());
                cov[i * r + k] = next;
                cov[k * r + i] = next;
            }
        }
        if delta <= 1e-13 * scale {
            steady = true;
            for i in 0..r {
                gain[i] = cov[i * r] / cov[0];
            }
        }
    }

    Ok(FilterOutput {
        residuals,
        variances,
        next_state: state,
        next_cov: cov,
    })
}

fn run(order: &ModelOrder, params: &ParamVector, diffed: &[f64]) -> Result<FilterOutput> {
    params.check(order)?;
    if diffed.is_empty() {
        return Err(Error::InsufficientData("differenced series is empty".into()));
    }
    if !params.is_stationary() {
        return Err(Error::NonStationaryParams);
    }
    let ss = StateSpace::new(&expand(order, params)?)?;
    filter(&ss, diffed)
}

/// Exact Gaussian log-likelihood of the differenced series.
pub fn loglik(order: &ModelOrder, params: &ParamVector, diffed: &[f64]) -> Result<f64> {
    if !(params.sigma2 > 0.0) {
        return Err(Error::InvalidArgument("sigma2 must be positive".into()));
    }
    let out = run(order, params, diffed)?;
    let n = diffed.len() as f64;
    let value = -0.5
        * (n * (LN_2PI + params.sigma2.ln())
            + out.sum_log_variances()
            + out.sum_weighted_squares() / params.sigma2);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericalFailure("log-likelihood is not finite".into()))
    }
}

/// Log-likelihood with `σ²` replaced by its closed-form maximizer.
///
/// Returns `(ℓ, σ̂²)`; `params.sigma2` is ignored.
pub fn concentrated_loglik(order: &ModelOrder, params: &ParamVector, diffed: &[f64]) -> Result<(f64, f64)> {
    let out = run(order, params, diffed)?;
    let n = diffed.len() as f64;
    let sigma2 = out.sum_weighted_squares() / n;
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::NumericalFailure(format!("profiled sigma2 is {sigma2}")));
    }
    let value = -0.5 * (n * (LN_2PI + sigma2.ln() + 1.0) + out.sum_log_variances());
    if value.is_finite() {
        Ok((value, sigma2))
    } else {
        Err(Error::NumericalFailure("log-likelihood is not finite".into()))
    }
}

/// One-step prediction errors and their variances.
#[derive(Debug, Clone, PartialEq)]
pub struct Innovations {
    pub residuals: Vec<f64>,
    /// `σ² F_t`.
    pub variances: Vec<f64>,
}

impl Innovations {
    /// Residuals divided by their standard deviations.
    pub fn standardized(&self) -> Vec<f64> {
        self.residuals
            .iter()
            .zip(&self.variances)
            .map(|(v, f)| v / f.sqrt())
            .collect()
    }
}

pub fn innovations(order: &ModelOrder, params: &ParamVector, diffed: &[f64]) -> Result<Innovations> {
    let out = run(order, params, diffed)?;
    Ok(Innovations {
        variances: out.variances.iter().map(|f| f * params.sigma2).collect(),
        residuals: out.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ar1(phi: f64, sigma2: f64) -> (ModelOrder, ParamVector) {
        let order = ModelOrder::arima(1, 0, 0);
        let params = ParamVector {
            ar: vec![phi],
            ..ParamVector::zeros(&order, sigma2)
        };
        (order, params)
    }

    #[test]
    fn white_noise_closed_form() {
        let order = ModelOrder::arima(0, 0, 0);
        let x = [0.3, -1.2, 0.8, 2.0, -0.5];
        let sigma2 = 1.7;
        let params = ParamVector::zeros(&order, sigma2);
        let n = x.len() as f64;
        let ss: f64 = x.iter().map(|v| v * v).sum();
        let expect = -0.5 * n * (2.0 * std::f64::consts::PI * sigma2).ln() - ss / (2.0 * sigma2);
        assert_abs_diff_eq!(loglik(&order, &params, &x).unwrap(), expect, epsilon = 1e-12);
        let inn = innovations(&order, &params, &x).unwrap();
        assert_eq!(inn.residuals, x.to_vec());
    }

    #[test]
    fn ar1_residuals_follow_recursion() {
        let (order, params) = ar1(0.5, 1.0);
        let x = [1.0, 0.2, -0.7, 1.4, 0.1, -0.3];
        let inn = innovations(&order, &params, &x).unwrap();
        assert_eq!(inn.residuals.len(), x.len());
        assert_abs_diff_eq!(inn.residuals[0], x[0]);
        for t in 1..x.len() {
            assert_abs_diff_eq!(inn.residuals[t], x[t] - 0.5 * x[t - 1], epsilon = 1e-14);
        }
        assert_abs_diff_eq!(inn.variances[0], 1.0 / 0.75, epsilon = 1e-14);
    }

    #[test]
    fn innovations_reproduce_loglik() {
        let order = ModelOrder::new(1, 0, 1, 0, 0, 1, 4).unwrap();
        let params = ParamVector {
            ar: vec![0.4],
            ma: vec![0.3],
            sar: vec![],
            sma: vec![-0.5],
            sigma2: 2.5,
        };
        let x: Vec<f64> = (0..40).map(|i| ((i * 7 % 11) as f64 - 5.0) * 0.3).collect();
        let inn = innovations(&order, &params, &x).unwrap();
        let rebuilt = -0.5
            * inn
                .residuals
                .iter()
                .zip(&inn.variances)
                .map(|(v, f)| LN_2PI + f.ln() + v * v / f)
                .sum::<f64>();
        assert_abs_diff_eq!(rebuilt, loglik(&order, &params, &x).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn sigma2_scaling_identity() {
        let (order, params) = ar1(0.3, 1.0);
        let x = [0.5, -0.1, 0.9, 1.1, -0.4, 0.0, 0.3];
        let c: f64 = 3.7;
        let scaled: Vec<f64> = x.iter().map(|v| v * c.sqrt()).collect();
        let base = loglik(&order, &params, &x).unwrap();
        let other = loglik(&order, &ParamVector { sigma2: c, ..params.clone() }, &scaled).unwrap();
        assert_abs_diff_eq!(other - base, -(x.len() as f64) / 2.0 * c.ln(), epsilon = 1e-10);
    }

    #[test]
    fn concentrated_matches_full_at_optimum() {
        let (order, params) = ar1(0.2, 1.0);
        let x = [0.5, -0.1, 0.9, 1.1, -0.4, 0.0, 0.3];
        let (lc, s2) = concentrated_loglik(&order, &params, &x).unwrap();
        let full = loglik(&order, &ParamVector { sigma2: s2, ..params }, &x).unwrap();
        assert_abs_diff_eq!(lc, full, epsilon = 1e-12);
    }

    #[test]
    fn error_paths() {
        let (order, params) = ar1(1.05, 1.0);
        assert!(matches!(loglik(&order, &params, &[1.0, 2.0]), Err(Error::NonStationaryParams)));
        let (order, params) = ar1(0.5, 1.0);
        assert!(matches!(loglik(&order, &params, &[]), Err(Error::InsufficientData(_))));
        assert!(loglik(&order, &ParamVector { sigma2: 0.0, ..params }, &[1.0]).is_err());
    }
}
