//! Augmented Dickey-Fuller unit-root test.

use serde::{Deserialize, Serialize};

use super::{TestDetail, TestOutcome};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, Mat};

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdfRegression {
    None,
    Drift,
    #[default]
    Trend,
}

impl std::str::FromStr for AdfRegression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "drift" => Ok(Self::Drift),
            "trend" => Ok(Self::Trend),
            other => Err(Error::InvalidArgument(format!("unknown ADF regression `{other}`"))),
        }
    }
}

/// Where the statistic fell relative to the tabulated p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableBound {
    /// True p-value is smaller than the one reported.
    Smaller,
    /// True p-value is greater than the one reported.
    Greater,
}

const SAMPLE_SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, 100_000.0];
const PROBS: [f64; 8] = [0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99];

// Dickey-Fuller critical values; rows follow PROBS, columns SAMPLE_SIZES.
const TREND: [[f64; 6]; 8] = [
    [-4.38, -4.15, -4.04, -3.99, -3.98, -3.96],
    [-3.95, -3.80, -3.73, -3.69, -3.68, -3.66],
    [-3.60, -3.50, -3.45, -3.43, -3.42, -3.41],
    [-3.24, -3.18, -3.15, -3.13, -3.13, -3.12],
    [-1.14, -1.19, -1.22, -1.23, -1.24, -1.25],
    [-0.80, -0.87, -0.90, -0.92, -0.93, -0.94],
    [-0.50, -0.58, -0.62, -0.64, -0.65, -0.66],
    [-0.15, -0.24, -0.28, -0.31, -0.32, -0.33],
];
#[allow(clippy::approx_constant)]
const DRIFT: [[f64; 6]; 8] = [
    [-3.75, -3.58, -3.51, -3.46, -3.44, -3.43],
    [-3.33, -3.22, -3.17, -3.14, -3.13, -3.12],
    [-3.00, -2.93, -2.89, -2.88, -2.87, -2.86],
    [-2.63, -2.60, -2.58, -2.57, -2.57, -2.57],
    [-0.37, -0.40, -0.42, -0.42, -0.43, -0.44],
    [0.00, -0.03, -0.05, -0.06, -0.07, -0.07],
    [0.34, 0.29, 0.26, 0.24, 0.24, 0.23],
    [0.72, 0.66, 0.63, 0.62, 0.61, 0.60],
];
const NONE: [[f64; 6]; 8] = [
    [-2.66, -2.62, -2.60, -2.58, -2.58, -2.58],
    [-2.26, -2.25, -2.24, -2.23, -2.23, -2.23],
    [-1.95, -1.95, -1.95, -1.95, -1.95, -1.95],
    [-1.60, -1.61, -1.61, -1.62, -1.62, -1.62],
    [0.92, 0.91, 0.90, 0.89, 0.89, 0.89],
    [1.33, 1.31, 1.29, 1.29, 1.28, 1.28],
    [1.70, 1.66, 1.64, 1.63, 1.62, 1.62],
    [2.16, 2.08, 2.03, 2.01, 2.00, 2.00],
];

/// Piecewise-linear interpolation clamped to the end points; `xs` ascending.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}

/// p-value of a Dickey-Fuller statistic for a regression on `n` differences.
pub fn adf_p_value(statistic: f64, n: usize, regression: AdfRegression) -> (f64, Option<TableBound>) {
    let table = match regression {
        AdfRegression::None => &NONE,
        AdfRegression::Drift => &DRIFT,
        AdfRegression::Trend => &TREND,
    };
    let critical: Vec<f64> = table
        .iter()
        .map(|row| interpolate(&SAMPLE_SIZES, row, n as f64))
        .collect();
    let p = interpolate(&critical, &PROBS, statistic);
    let bound = if statistic < critical[0] {
        Some(TableBound::Smaller)
    } else if statistic > critical[PROBS.len() - 1] {
        Some(TableBound::Greater)
    } else {
        None
    };
    (p, bound)
}

/// Default lag order `trunc((n - 1)^(1/3))`.
pub fn default_lags(len: usize) -> usize {
    (len.saturating_sub(1) as f64).cbrt().trunc() as usize
}

/// Regresses `Δx_t` on the deterministic terms, `x_{t-1}` and `lags` lagged
/// differences; the statistic is the t-ratio of the `x_{t-1}` coefficient.
pub fn adf_test(x: &[f64], regression: AdfRegression, lags: Option<usize>) -> Result<TestOutcome> {
    let lags = lags.unwrap_or_else(|| default_lags(x.len()));
    if x.len() <= lags + 10 {
        return Err(Error::InsufficientData(format!(
            "ADF with {lags} lags needs more than {} observations, got {}",
            lags + 10,
            x.len()
        )));
    }
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let n = dx.len();
    let deterministic = match regression {
        AdfRegression::None => 0,
        AdfRegression::Drift => 1,
        AdfRegression::Trend => 2,
    };
    let cols = 1 + deterministic + lags;
    let rows = n - lags;
    let mut design = Vec::with_capacity(rows * cols);
    let mut y = Vec::with_capacity(rows);
    for t in lags..n {
        // dx[t] = x[t+1] - x[t], so the lagged level is x[t]
        design.push(x[t]);
        if deterministic >= 1 {
            design.push(1.0);
        }
        if deterministic == 2 {
            design.push((t + 1) as f64);
        }
        design.extend((1..=lags).map(|i| dx[t - i]));
        y.push(dx[t]);
    }
    if rows <= cols {
        return Err(Error::InsufficientData("too few rows for the ADF regression".into()));
    }
    let fit = least_squares(&Mat::from_rows(rows, cols, design), &y).ok_or(Error::CollinearRegressors)?;
    let se = fit.std_errors[0];
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::CollinearRegressors);
    }
    let statistic = fit.coefficients[0] / se;
    let (p_value, bound) = adf_p_value(statistic, n, regression);
    Ok(TestOutcome {
        test: "adf".into(),
        statistic,
        p_value,
        detail: TestDetail::Adf {
            regression,
            lags,
            nobs: rows,
            bound,
        },
    })
}
