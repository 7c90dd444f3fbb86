//! Residual diagnostics: correlograms, unit-root, portmanteau and normality
//! tests, and a combined report for a fitted model.

mod adf;

pub use adf::{adf_p_value, adf_test, default_lags, AdfRegression, TableBound};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    pub detail: TestDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestDetail {
    Adf {
        regression: AdfRegression,
        lags: usize,
        nobs: usize,
        /// Set when the statistic lies outside the tabulated range and the
        /// reported p-value is the table edge.
        bound: Option<TableBound>,
    },
    Portmanteau {
        lags: usize,
        fitdf: usize,
        df: usize,
        nobs: usize,
    },
    Ks {
        nobs: usize,
        mean: f64,
        sd: f64,
        method: KsMethod,
    },
    Mean {
        nobs: usize,
        sd: f64,
    },
}

/// Sample autocorrelations `r_0..=r_max_lag` with the biased denominator.
pub fn acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if x.len() <= max_lag {
        return Err(Error::LagTooLarge { lag: max_lag, len: x.len() });
    }
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = centered.iter().map(|v| v * v).sum();
    if !(c0 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                centered[k..].iter().zip(&centered).map(|(a, b)| a * b).sum::<f64>() / c0
            }
        })
        .collect())
}

/// Partial autocorrelations at lags `1..=max_lag` by Durbin-Levinson.
pub fn pacf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let r = match acf(x, max_lag) {
        Err(Error::ZeroVariance) => return Err(Error::SingularToeplitz),
        other => other?,
    };
    pacf_from_acf(&r)
}

/// Durbin-Levinson on `r_0..=r_m`; returns the `m` partial autocorrelations.
pub fn pacf_from_acf(r: &[f64]) -> Result<Vec<f64>> {
    let m = r.len().saturating_sub(1);
    let mut out = Vec::with_capacity(m);
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    let mut err = r[0];
    for k in 1..=m {
        if !(err > 0.0) {
            return Err(Error::SingularToeplitz);
        }
        let num = r[k] - (0..k - 1).map(|j| phi[j] * r[k - 1 - j]).sum::<f64>();
        let a = num / err;
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - a * prev[k - 2 - j];
        }
        phi.push(a);
        out.push(a);
        err *= 1.0 - a * a;
    }
    Ok(out)
}

fn chi_square_sf(q: f64, df: usize) -> f64 {
    if q <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    dist.sf(q).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Portmanteau {
    BoxPierce,
    LjungBox,
}

fn portmanteau(kind: Portmanteau, n: usize, r: &[f64], lags: usize, fitdf: usize) -> Result<TestOutcome> {
    if lags <= fitdf {
        return Err(Error::DegreesOfFreedomNonPositive { lags, fitdf });
    }
    if r.len() <= lags || n <= lags {
        return Err(Error::LagTooLarge { lag: lags, len: n });
    }
    let nf = n as f64;
    let statistic = match kind {
        Portmanteau::BoxPierce => nf * (1..=lags).map(|k| r[k] * r[k]).sum::<f64>(),
        Portmanteau::LjungBox => nf * (nf + 2.0) * (1..=lags).map(|k| r[k] * r[k] / (nf - k as f64)).sum::<f64>(),
    };
    let df = lags - fitdf;
    Ok(TestOutcome {
        test: match kind {
            Portmanteau::BoxPierce => "box_pierce",
            Portmanteau::LjungBox => "ljung_box",
        }
        .into(),
        statistic,
        p_value: chi_square_sf(statistic, df),
        detail: TestDetail::Portmanteau {
            lags,
            fitdf,
            df,
            nobs: n,
        },
    })
}

/// `Q = n Σ r_k²` over lags `1..=lags`, χ² with `lags - fitdf` degrees of freedom.
pub fn box_pierce(residuals: &[f64], lags: usize, fitdf: usize) -> Result<TestOutcome> {
    if lags <= fitdf {
        return Err(Error::DegreesOfFreedomNonPositive { lags, fitdf });
    }
    portmanteau(Portmanteau::BoxPierce, residuals.len(), &acf(residuals, lags)?, lags, fitdf)
}

/// `Q* = n(n+2) Σ r_k²/(n-k)`, otherwise as [`box_pierce`].
pub fn ljung_box(residuals: &[f64], lags: usize, fitdf: usize) -> Result<TestOutcome> {
    if lags <= fitdf {
        return Err(Error::DegreesOfFreedomNonPositive { lags, fitdf });
    }
    portmanteau(Portmanteau::LjungBox, residuals.len(), &acf(residuals, lags)?, lags, fitdf)
}

/// Box-Pierce from precomputed autocorrelations `r_0..` of `n` residuals.
pub fn box_pierce_from_acf(n: usize, r: &[f64], lags: usize, fitdf: usize) -> Result<TestOutcome> {
    portmanteau(Portmanteau::BoxPierce, n, r, lags, fitdf)
}

/// Ljung-Box from precomputed autocorrelations `r_0..` of `n` residuals.
pub fn ljung_box_from_acf(n: usize, r: &[f64], lags: usize, fitdf: usize) -> Result<TestOutcome> {
    portmanteau(Portmanteau::LjungBox, n, r, lags, fitdf)
}

/// How the Kolmogorov p-value scales `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsMethod {
    /// `λ = √n · D`.
    #[default]
    Asymptotic,
    /// `λ = (√n + 0.12 + 0.11/√n) · D`.
    Stephens,
}

impl std::str::FromStr for KsMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(Self::Asymptotic),
            "stephens" => Ok(Self::Stephens),
            other => Err(Error::InvalidArgument(format!("unknown KS method `{other}`"))),
        }
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // theta-function form converges fast for small λ
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20)
            .map(|k| {
                let j = (2 * k - 1) as f64;
                (-j * j * c).exp()
            })
            .sum::<f64>()
            * (2.0 * std::f64::consts::PI).sqrt()
            / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against a normal with the sample mean
/// and standard deviation plugged in (no Lilliefors correction).
pub fn ks_normality(residuals: &[f64], method: KsMethod) -> Result<TestOutcome> {
    let n = residuals.len();
    if n < 8 {
        return Err(Error::InsufficientData(format!("KS test needs at least 8 values, got {n}")));
    }
    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let sd = (residuals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let normal = Normal::new(mean, sd).map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let mut sorted = residuals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    let root = nf.sqrt();
    let lambda = match method {
        KsMethod::Asymptotic => root * statistic,
        KsMethod::Stephens => (root + 0.12 + 0.11 / root) * statistic,
    };
    Ok(TestOutcome {
        test: "ks_normality".into(),
        statistic,
        p_value: kolmogorov_sf(lambda),
        detail: TestDetail::Ks {
            nobs: n,
            mean,
            sd,
            method,
        },
    })
}

/// Two-sided t-test of a zero mean.
pub fn zero_mean_test(residuals: &[f64]) -> Result<TestOutcome> {
    let n = residuals.len();
    if n < 2 {
        return Err(Error::InsufficientData("mean test needs at least 2 values".into()));
    }
    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let sd = (residuals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let t = mean / (sd / nf.sqrt());
    let dist = statrs::distribution::StudentsT::new(0.0, 1.0, nf - 1.0).map_err(|e| Error::NumericalFailure(e.to_string()))?;
    Ok(TestOutcome {
        test: "zero_mean".into(),
        statistic: t,
        p_value: (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0),
        detail: TestDetail::Mean { nobs: n, sd },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub alpha: f64,
    /// Portmanteau lags.
    pub lags: usize,
    /// Degrees of freedom removed from the portmanteau tests; defaults to the
    /// number of ARMA coefficients.
    pub fitdf: Option<usize>,
    pub adf_regression: AdfRegression,
    pub adf_lags: Option<usize>,
    pub ks_method: KsMethod,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            lags: 24,
            fitdf: None,
            adf_regression: AdfRegression::Trend,
            adf_lags: None,
            ks_method: KsMethod::Asymptotic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionChecks {
    pub zero_mean: bool,
    pub stationary: bool,
    pub no_autocorrelation: bool,
    pub normality: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub nobs: usize,
    pub mean: f64,
    pub alpha: f64,
    pub zero_mean: TestOutcome,
    pub adf: TestOutcome,
    pub box_pierce: TestOutcome,
    pub ljung_box: TestOutcome,
    pub ks_normality: TestOutcome,
    pub checks: AssumptionChecks,
}

/// Runs every residual test on `residuals`.
pub fn residual_report_from(residuals: &[f64], fitdf: usize, config: &ReportConfig) -> Result<ResidualReport> {
    if residuals.is_empty() {
        return Err(Error::InsufficientData("no residuals".into()));
    }
    let fitdf = config.fitdf.unwrap_or(fitdf);
    let zero_mean = zero_mean_test(residuals)?;
    let adf = adf_test(residuals, config.adf_regression, config.adf_lags)?;
    let box_pierce = box_pierce(residuals, config.lags, fitdf)?;
    let ljung_box = ljung_box(residuals, config.lags, fitdf)?;
    let ks = ks_normality(residuals, config.ks_method)?;
    let alpha = config.alpha;
    let checks = AssumptionChecks {
        zero_mean: zero_mean.p_value > alpha,
        stationary: adf.p_value <= alpha,
        no_autocorrelation: box_pierce.p_value > alpha && ljung_box.p_value > alpha,
        normality: ks.p_value > alpha,
    };
    Ok(ResidualReport {
        nobs: residuals.len(),
        mean: residuals.iter().sum::<f64>() / residuals.len() as f64,
        alpha,
        zero_mean,
        adf,
        box_pierce,
        ljung_box,
        ks_normality: ks,
        checks,
    })
}

/// Diagnostics of the one-step residuals of `fit` on `training`.
pub fn residual_report(fit: &FitResult, training: &TimeSeries, config: &ReportConfig) -> Result<ResidualReport> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    let inn = fit.innovations(training)?;
    residual_report_from(&inn.residuals, fit.order.coef_count(), config)
}
