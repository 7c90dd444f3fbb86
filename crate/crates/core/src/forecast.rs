//! Level forecasts with normal prediction bands.
//!
//! Means and variances come from a Kalman filter run on the differenced
//! series, with the state augmented by the last `d + D·s` levels so the
//! integration step is propagated exactly. [`level_psi_variances`] gives the
//! same variances from level ψ-weights and serves as a cross-check.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::kernel::{expand, filter, psi_from_polynomials, simulate, ModelOrder, ParamVector, StateSpace};
use crate::linalg::Mat;
use crate::series::{difference_values, differencing_polynomial, MonthStamp, TimeSeries};

/// Standard normal 0.90 quantile.
pub const Z80: f64 = 1.281551566;
/// Standard normal 0.975 quantile.
pub const Z95: f64 = 1.959963985;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub start: MonthStamp,
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub lo80: Vec<f64>,
    pub hi80: Vec<f64>,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
}

impl Forecast {
    fn from_moments(start: MonthStamp, mean: Vec<f64>, se: Vec<f64>) -> Self {
        let band = |z: f64, sign: f64| -> Vec<f64> { mean.iter().zip(&se).map(|(m, s)| m + sign * z * s).collect() };
        Self {
            start,
            lo80: band(Z80, -1.0),
            hi80: band(Z80, 1.0),
            lo95: band(Z95, -1.0),
            hi95: band(Z95, 1.0),
            mean,
            se,
        }
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn month_at(&self, step: usize) -> MonthStamp {
        self.start.add_months(step as i64)
    }

    pub fn end(&self) -> MonthStamp {
        self.month_at(self.len().saturating_sub(1))
    }

    pub fn mean_series(&self) -> Result<TimeSeries> {
        TimeSeries::new(self.start, self.mean.clone())
    }

    /// Writes `date,mean,se,lo80,hi80,lo95,hi95` rows; `fmt` renders numbers.
    pub fn write_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "mean", "se", "lo80", "hi80", "lo95", "hi95"])?;
        for i in 0..self.len() {
            let mut row = vec![self.month_at(i).to_string()];
            row.extend(
                [self.mean[i], self.se[i], self.lo80[i], self.hi80[i], self.lo95[i], self.hi95[i]]
                    .into_iter()
                    .map(&fmt),
            );
            w.write_record(&row)?;
        }
        w.flush()
    }

    /// Reads the layout written by [`Forecast::write_csv`]; columns are found
    /// by header name and the dates must be consecutive months.
    pub fn read_csv<R: Read>(input: R) -> Result<Forecast> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header = reader
            .headers()
            .map_err(|e| Error::Parse { row: 1, message: e.to_string() })?
            .clone();
        let names = ["date", "mean", "se", "lo80", "hi80", "lo95", "hi95"];
        let mut cols = [0usize; 7];
        for (slot, name) in cols.iter_mut().zip(names) {
            *slot = header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("forecast file lacks a `{name}` column")))?;
        }
        let mut start = None;
        let mut columns: [Vec<f64>; 6] = Default::default();
        for (i, rec) in reader.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| Error::Parse { row, message: e.to_string() })?;
            let cell = |c: usize| rec.get(cols[c]).unwrap_or("");
            let month: MonthStamp = cell(0).parse().map_err(|_| Error::Parse {
                row,
                message: format!("bad date `{}`", cell(0)),
            })?;
            let expected = start.map(|s: MonthStamp| s.add_months(i as i64));
            match expected {
                None => start = Some(month),
                Some(m) if m != month => return Err(Error::GapInCalendar(m)),
                Some(_) => {}
            }
            for (k, column) in columns.iter_mut().enumerate() {
                let text = cell(k + 1);
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    row,
                    message: format!("non-numeric `{text}` in column {}", names[k + 1]),
                })?;
                column.push(v);
            }
        }
        let start = start.ok_or(Error::EmptySeries)?;
        let [mean, se, lo80, hi80, lo95, hi95] = columns;
        Ok(Forecast {
            start,
            mean,
            se,
            lo80,
            hi80,
            lo95,
            hi95,
        })
    }
}

/// `h`-step forecast from the end of `training`.
pub fn forecast(fit: &FitResult, training: &TimeSeries, h: usize) -> Result<Forecast> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    forecast_with_params(&fit.order, &fit.params, training, h)
}

/// Forecast with known parameters; `params.sigma2` scales the bands.
pub fn forecast_with_params(order: &ModelOrder, params: &ParamVector, training: &TimeSeries, h: usize) -> Result<Forecast> {
    if h == 0 {
        return Err(Error::HorizonZero);
    }
    params.check(order)?;
    if !params.is_stationary() {
        return Err(Error::NonStationaryParams);
    }
    let diffed = difference_values(training.values(), order.d, order.sd, order.period)?;
    if diffed.is_empty() {
        return Err(Error::InsufficientData("no observations left after differencing".into()));
    }
    let ss = StateSpace::new(&expand(order, params)?)?;
    let filtered = filter(&ss, &diffed)?;

    let r = ss.dim();
    let poly = differencing_polynomial(order.d, order.sd, order.period);
    let m = poly.len() - 1;
    let dim = r + m;

    // augmented state: (α, X_{t-1}, …, X_{t-m}) with known lags
    let mut mean = vec![0.0; dim];
    mean[..r].copy_from_slice(&filtered.next_state);
    let levels = training.values();
    for i in 0..m {
        mean[r + i] = levels[levels.len() - 1 - i];
    }
    let mut cov = Mat::zeros(dim, dim);
    for i in 0..r {
        for k in 0..r {
            cov[(i, k)] = filtered.next_cov[i * r + k];
        }
    }

    // X_t = α_t[0] - Σ c_i X_{t-i}, then the lags shift down by one
    let mut integrate = Mat::zeros(dim, dim);
    for i in 0..r {
        integrate[(i, i)] = 1.0;
    }
    if m > 0 {
        integrate[(r, 0)] = 1.0;
        for i in 1..=m {
            integrate[(r, r + i - 1)] = -poly[i];
        }
        for i in 1..m {
            integrate[(r + i, r + i - 1)] = 1.0;
        }
    }
    let mut advance = Mat::zeros(dim, dim);
    let t = ss.transition();
    for i in 0..r {
        for k in 0..r {
            advance[(i, k)] = t[(i, k)];
        }
    }
    for i in r..dim {
        advance[(i, i)] = 1.0;
    }
    let rsel = ss.selection();
    let level_index = if m > 0 { r } else { 0 };

    let mut out_mean = Vec::with_capacity(h);
    let mut out_se = Vec::with_capacity(h);
    for step in 0..h {
        if m > 0 {
            mean = integrate.mul_vec(&mean);
            cov = integrate.matmul(&cov).matmul(&integrate.transpose());
        }
        out_mean.push(mean[level_index]);
        let var = (cov[(level_index, level_index)] * params.sigma2).max(0.0);
        out_se.push(var.sqrt());
        if step + 1 < h {
            mean = advance.mul_vec(&mean);
            cov = advance.matmul(&cov).matmul(&advance.transpose());
            for i in 0..r {
                for k in 0..r {
                    cov[(i, k)] += rsel[i] * rsel[k];
                }
            }
        }
    }
    Ok(Forecast::from_moments(training.end().succ(), out_mean, out_se))
}

/// Level-scale prediction variances `σ² Σ_{j<h} ψ_j²`, with ψ-weights of the
/// full AR polynomial including the differencing factors.
///
/// Matches the state-space variances once the filter has reached steady
/// state, i.e. for long histories.
pub fn level_psi_variances(order: &ModelOrder, params: &ParamVector, h: usize) -> Result<Vec<f64>> {
    params.check(order)?;
    let arma = expand(order, params)?;
    // 1 - Σ φ_i B^i times the differencing polynomial, in "1 - Σ a_i B^i" form
    let mut phi_poly = vec![1.0];
    phi_poly.extend(arma.ar.iter().map(|a| -a));
    let diff = differencing_polynomial(order.d, order.sd, order.period);
    let mut full = vec![0.0; phi_poly.len() + diff.len() - 1];
    for (i, a) in phi_poly.iter().enumerate() {
        for (j, b) in diff.iter().enumerate() {
            full[i + j] += a * b;
        }
    }
    let ar: Vec<f64> = full[1..].iter().map(|c| -c).collect();
    let psi = psi_from_polynomials(&ar, &arma.ma, h.saturating_sub(1));
    let mut acc = 1.0;
    let mut out = Vec::with_capacity(h);
    for j in 0..h {
        if j > 0 {
            acc += psi[j - 1] * psi[j - 1];
        }
        out.push(params.sigma2 * acc);
    }
    Ok(out)
}

/// Fraction of future values that fall inside the bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub trials: usize,
    pub rate80: f64,
    pub rate95: f64,
    /// Per-step coverage of the 80% band.
    pub by_step80: Vec<f64>,
    /// Per-step coverage of the 95% band.
    pub by_step95: Vec<f64>,
}

/// History length used by [`empirical_coverage`] before each forecast origin.
pub const COVERAGE_HISTORY: usize = 200;

/// Simulates `trials` paths, forecasts each from the true parameters and
/// counts how often the next `h` values land inside the bands.
pub fn empirical_coverage(order: &ModelOrder, params: &ParamVector, h: usize, trials: usize, seed: u64) -> Result<Coverage> {
    if h == 0 {
        return Err(Error::HorizonZero);
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let history = COVERAGE_HISTORY + order.diff_loss();
    let hits: Vec<(Vec<bool>, Vec<bool>)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<(Vec<bool>, Vec<bool>)> {
            let path = simulate(order, params, history + h, seed.wrapping_add(trial), 100)?;
            let (past, future) = path.values().split_at(history);
            let training = TimeSeries::new(path.start(), past.to_vec())?;
            let fc = forecast_with_params(order, params, &training, h)?;
            let inside = |lo: &[f64], hi: &[f64]| -> Vec<bool> {
                future.iter().enumerate().map(|(i, &x)| lo[i] <= x && x <= hi[i]).collect()
            };
            Ok((inside(&fc.lo80, &fc.hi80), inside(&fc.lo95, &fc.hi95)))
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let by_step = |wide: bool| -> Vec<f64> {
        (0..h)
            .map(|i| hits.iter().filter(|t| if wide { t.1[i] } else { t.0[i] }).count() as f64 / n)
            .collect()
    };
    let by_step80 = by_step(false);
    let by_step95 = by_step(true);
    Ok(Coverage {
        trials,
        rate80: by_step80.iter().sum::<f64>() / h as f64,
        rate95: by_step95.iter().sum::<f64>() / h as f64,
        by_step80,
        by_step95,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(MonthStamp::new(2010, 1).unwrap(), values).unwrap()
    }

    #[test]
    fn quantiles() {
        assert_relative_eq!(Z95 / Z80, 1.529368, epsilon = 1e-6);
        assert_relative_eq!(Z80, 1.281552, epsilon = 1e-6);
        assert_relative_eq!(Z95, 1.959964, epsilon = 1e-6);
    }

    #[test]
    fn csv_round_trip() {
        let order = ModelOrder::arima(1, 0, 0);
        let mut params = ParamVector::zeros(&order, 1.7);
        params.ar = vec![0.4];
        let fc = forecast_with_params(&order, &params, &series(vec![1.0, -2.0, 0.5]), 5).unwrap();
        let mut buf = Vec::new();
        fc.write_csv(&mut buf, |x| x.to_string()).unwrap();
        assert_eq!(Forecast::read_csv(buf.as_slice()).unwrap(), fc);

        let gap = "date,mean,se,lo80,hi80,lo95,hi95\n2020-01,1,1,1,1,1,1\n2020-03,1,1,1,1,1,1\n";
        assert!(matches!(Forecast::read_csv(gap.as_bytes()), Err(Error::GapInCalendar(_))));
        assert!(matches!(Forecast::read_csv("date,mean\n".as_bytes()), Err(Error::Schema(_))));
        let header_only = "date,mean,se,lo80,hi80,lo95,hi95\n";
        assert!(matches!(Forecast::read_csv(header_only.as_bytes()), Err(Error::EmptySeries)));
    }

    #[test]
    fn white_noise_is_flat() {
        let order = ModelOrder::arima(0, 0, 0);
        let params = ParamVector::zeros(&order, 2.25);
        let fc = forecast_with_params(&order, &params, &series(vec![1.0, -2.0, 0.5]), 4).unwrap();
        assert_eq!(fc.start, MonthStamp::new(2010, 4).unwrap());
        for i in 0..4 {
            assert_eq!(fc.mean[i], 0.0);
            assert_relative_eq!(fc.se[i], 1.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn ar1_closed_form() {
        let order = ModelOrder::arima(1, 0, 0);
        let params = ParamVector {
            ar: vec![0.5],
            ..ParamVector::zeros(&order, 1.0)
        };
        let fc = forecast_with_params(&order, &params, &series(vec![0.3, -1.0, 2.0]), 5).unwrap();
        for h in 1..=5 {
            assert_relative_eq!(fc.mean[h - 1], 0.5f64.powi(h as i32) * 2.0, epsilon = 1e-12);
            let var: f64 = (0..h).map(|j| 0.25f64.powi(j as i32)).sum();
            assert_relative_eq!(fc.se[h - 1], var.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn random_walk() {
        let order = ModelOrder::arima(0, 1, 0);
        let params = ParamVector::zeros(&order, 4.0);
        let fc = forecast_with_params(&order, &params, &series(vec![1.0, 3.0, 2.5, 7.0]), 6).unwrap();
        for h in 1..=6 {
            assert_eq!(fc.mean[h - 1], 7.0);
            assert_relative_eq!(fc.se[h - 1], 2.0 * (h as f64).sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn bands_are_ordered_and_symmetric() {
        let order = ModelOrder::new(1, 1, 1, 0, 1, 1, 4).unwrap();
        let params = ParamVector {
            ar: vec![0.3],
            ma: vec![-0.2],
            sar: vec![],
            sma: vec![-0.5],
            sigma2: 1.7,
        };
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin() * 3.0 + i as f64 * 0.1).collect();
        let fc = forecast_with_params(&order, &params, &series(x), 10).unwrap();
        for i in 0..10 {
            assert!(fc.lo95[i] <= fc.lo80[i] && fc.lo80[i] <= fc.mean[i]);
            assert!(fc.mean[i] <= fc.hi80[i] && fc.hi80[i] <= fc.hi95[i]);
            let (lo, hi) = (fc.mean[i] - fc.lo80[i], fc.hi80[i] - fc.mean[i]);
            assert!((lo - hi).abs() <= 1e-9 * hi.abs().max(1e-300));
            assert_relative_eq!((fc.hi95[i] - fc.mean[i]) / hi, Z95 / Z80, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_horizon() {
        let order = ModelOrder::arima(0, 0, 0);
        let params = ParamVector::zeros(&order, 1.0);
        assert!(matches!(
            forecast_with_params(&order, &params, &series(vec![1.0]), 0),
            Err(Error::HorizonZero)
        ));
    }

    #[test]
    fn psi_variances_random_walk() {
        let order = ModelOrder::arima(0, 1, 0);
        let v = level_psi_variances(&order, &ParamVector::zeros(&order, 2.0), 5).unwrap();
        assert_eq!(v, vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn csv_layout() {
        let order = ModelOrder::arima(0, 0, 0);
        let fc = forecast_with_params(&order, &ParamVector::zeros(&order, 1.0), &series(vec![0.0]), 2).unwrap();
        let mut buf = Vec::new();
        fc.write_csv(&mut buf, |v| format!("{v:.2}")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("date,mean,se,lo80,hi80,lo95,hi95"));
        assert_eq!(lines.next(), Some("2010-02,0.00,1.00,-1.28,1.28,-1.96,1.96"));
    }
}
