//! C ABI over `sarima-core`.
//!
//! Objects cross the boundary as opaque handles created by a `*_new` / action
//! function and released by the matching `*_free`. Every fallible call
//! returns a [`SarimaStatus`]; on failure the thread's last error message is
//! available from [`sarima_last_error`]. Panics are caught at the boundary
//! and reported as [`SarimaStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sarima_core::counterfactual::{impact, Difference};
use sarima_core::diagnostics::{residual_report, ReportConfig};
use sarima_core::estimation::{fit, FitConfig, FitResult};
use sarima_core::forecast::{forecast, Forecast};
use sarima_core::ingest::{load_csv, ColumnSpec};
use sarima_core::metrics::accuracy;
use sarima_core::{Error, ErrorCategory, ModelOrder, MonthStamp, TimeSeries};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SarimaStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad arguments: orders, lengths, horizons, configuration.
    InvalidArgument = 2,
    /// Problems with the data: gaps, parse errors, too few observations.
    DataError = 3,
    /// Non-convergence, singular systems, non-finite likelihoods.
    NumericalError = 4,
    /// A caller buffer is shorter than the result.
    BufferTooSmall = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn fail(err: Error) -> SarimaStatus {
    set_error(format!("{}: {err}", err.kind()));
    match err.category() {
        ErrorCategory::Usage => SarimaStatus::InvalidArgument,
        ErrorCategory::Data => SarimaStatus::DataError,
        ErrorCategory::Numerical => SarimaStatus::NumericalError,
    }
}

fn guard(f: impl FnOnce() -> SarimaStatus) -> SarimaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SarimaStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)).to_string());
            return SarimaStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sarima_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sarima_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `(p,d,q)(P,D,Q)_period`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaOrder {
    pub p: u32,
    pub d: u32,
    pub q: u32,
    pub sp: u32,
    pub sd: u32,
    pub sq: u32,
    pub period: u32,
}

impl SarimaOrder {
    fn to_core(self) -> Result<ModelOrder, Error> {
        let u = |v: u32| v as usize;
        ModelOrder::new(u(self.p), u(self.d), u(self.q), u(self.sp), u(self.sd), u(self.sq), u(self.period))
    }
}

/// Opaque monthly series.
pub struct SarimaSeries(TimeSeries);

/// Opaque fitted model.
pub struct SarimaFit(FitResult);

/// Opaque interval forecast.
pub struct SarimaForecast(Forecast);

fn into_handle<T>(value: T, out: *mut *mut T) -> SarimaStatus {
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SarimaStatus::Ok
}

/// Copies `len` values starting at `start_year`-`start_month` into a new series.
#[no_mangle]
pub unsafe extern "C" fn sarima_series_new(
    start_year: i32,
    start_month: u32,
    values: *const f64,
    len: usize,
    out: *mut *mut SarimaSeries,
) -> SarimaStatus {
    non_null!(values, out);
    guard(|| {
        let values = std::slice::from_raw_parts(values, len).to_vec();
        match MonthStamp::new(start_year, start_month).and_then(|m| TimeSeries::new(m, values)) {
            Ok(s) => into_handle(SarimaSeries(s), out),
            Err(e) => fail(e),
        }
    })
}

/// Loads a `date,value` CSV (first two columns, header detected).
#[no_mangle]
pub unsafe extern "C" fn sarima_series_load_csv(path: *const c_char, out: *mut *mut SarimaSeries) -> SarimaStatus {
    non_null!(path, out);
    guard(|| {
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_error("path is not UTF-8".into());
            return SarimaStatus::InvalidArgument;
        };
        match load_csv(Path::new(path), &ColumnSpec::default()) {
            Ok(s) => into_handle(SarimaSeries(s), out),
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn sarima_series_len(series: *const SarimaSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn sarima_series_start(series: *const SarimaSeries, year: *mut i32, month: *mut u32) -> SarimaStatus {
    non_null!(series, year, month);
    let start = (*series).0.start();
    *year = start.year();
    *month = start.month();
    SarimaStatus::Ok
}

/// Copies the values into `buf`, which must hold `sarima_series_len` entries.
#[no_mangle]
pub unsafe extern "C" fn sarima_series_values(series: *const SarimaSeries, buf: *mut f64, len: usize) -> SarimaStatus {
    non_null!(series, buf);
    let values = (*series).0.values();
    if len < values.len() {
        set_error(format!("buffer holds {len} values, series has {}", values.len()));
        return SarimaStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    SarimaStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn sarima_series_free(series: *mut SarimaSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Maximum-likelihood fit of `order` to the whole of `training`.
#[no_mangle]
pub unsafe extern "C" fn sarima_fit(
    training: *const SarimaSeries,
    order: *const SarimaOrder,
    out: *mut *mut SarimaFit,
) -> SarimaStatus {
    non_null!(training, order, out);
    guard(|| {
        let result = (*order).to_core().and_then(|o| fit(&o, &(*training).0, &FitConfig::default()));
        match result {
            Ok(f) => into_handle(SarimaFit(f), out),
            Err(e) => fail(e),
        }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaFitSummary {
    pub loglik: f64,
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    pub sigma2: f64,
    pub n_effective: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Number of ARMA coefficients (`p + q + P + Q`).
    pub coef_count: usize,
}

#[no_mangle]
pub unsafe extern "C" fn sarima_fit_summary(fit: *const SarimaFit, out: *mut SarimaFitSummary) -> SarimaStatus {
    non_null!(fit, out);
    let f = &(*fit).0;
    *out = SarimaFitSummary {
        loglik: f.loglik,
        aic: f.aic,
        aicc: f.aicc,
        bic: f.bic,
        sigma2: f.sigma2,
        n_effective: f.n_effective,
        iterations: f.iterations,
        converged: f.converged,
        coef_count: f.order.coef_count(),
    };
    SarimaStatus::Ok
}

/// Coefficients in `ar, ma, sar, sma` order and their standard errors (NaN
/// when unavailable). `std_errors` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sarima_fit_coefficients(
    fit: *const SarimaFit,
    coefs: *mut f64,
    std_errors: *mut f64,
    len: usize,
) -> SarimaStatus {
    non_null!(fit, coefs);
    let f = &(*fit).0;
    let values = f.params.coefficients();
    if len < values.len() {
        set_error(format!("buffer holds {len} values, model has {}", values.len()));
        return SarimaStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(values.as_ptr(), coefs, values.len());
    if !std_errors.is_null() {
        for (i, se) in f.stderr.iter().enumerate() {
            *std_errors.add(i) = se.unwrap_or(f64::NAN);
        }
    }
    SarimaStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn sarima_fit_free(fit: *mut SarimaFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// `h`-step forecast from the end of `training`, which must be the series the
/// model was fitted on.
#[no_mangle]
pub unsafe extern "C" fn sarima_forecast(
    fit: *const SarimaFit,
    training: *const SarimaSeries,
    h: usize,
    out: *mut *mut SarimaForecast,
) -> SarimaStatus {
    non_null!(fit, training, out);
    guard(|| match forecast(&(*fit).0, &(*training).0, h) {
        Ok(fc) => into_handle(SarimaForecast(fc), out),
        Err(e) => fail(e),
    })
}

#[no_mangle]
pub unsafe extern "C" fn sarima_forecast_len(fc: *const SarimaForecast) -> usize {
    fc.as_ref().map_or(0, |f| f.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn sarima_forecast_start(fc: *const SarimaForecast, year: *mut i32, month: *mut u32) -> SarimaStatus {
    non_null!(fc, year, month);
    *year = (*fc).0.start.year();
    *month = (*fc).0.start.month();
    SarimaStatus::Ok
}

/// Copies forecast columns into caller buffers of `len` entries; any column
/// pointer may be NULL to skip it.
#[no_mangle]
pub unsafe extern "C" fn sarima_forecast_columns(
    fc: *const SarimaForecast,
    mean: *mut f64,
    se: *mut f64,
    lo80: *mut f64,
    hi80: *mut f64,
    lo95: *mut f64,
    hi95: *mut f64,
    len: usize,
) -> SarimaStatus {
    non_null!(fc);
    let f = &(*fc).0;
    if len < f.len() {
        set_error(format!("buffers hold {len} values, forecast has {}", f.len()));
        return SarimaStatus::BufferTooSmall;
    }
    for (dst, src) in [(mean, &f.mean), (se, &f.se), (lo80, &f.lo80), (hi80, &f.hi80), (lo95, &f.lo95), (hi95, &f.hi95)] {
        if !dst.is_null() {
            ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
        }
    }
    SarimaStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn sarima_forecast_free(fc: *mut SarimaForecast) {
    if !fc.is_null() {
        drop(Box::from_raw(fc));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaAccuracy {
    pub mse: f64,
    pub rmse: f64,
    /// Percent.
    pub mape: f64,
}

#[no_mangle]
pub unsafe extern "C" fn sarima_accuracy(
    actual: *const f64,
    predicted: *const f64,
    len: usize,
    out: *mut SarimaAccuracy,
) -> SarimaStatus {
    non_null!(actual, predicted, out);
    guard(|| {
        let a = std::slice::from_raw_parts(actual, len);
        let p = std::slice::from_raw_parts(predicted, len);
        match accuracy(a, p) {
            Ok(r) => {
                *out = SarimaAccuracy {
                    mse: r.mse,
                    rmse: r.rmse,
                    mape: r.mape,
                };
                SarimaStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Residual tests with default settings (α 0.05, 24 lags).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaResidualReport {
    pub nobs: usize,
    pub mean: f64,
    pub zero_mean: SarimaTest,
    pub adf: SarimaTest,
    pub box_pierce: SarimaTest,
    pub ljung_box: SarimaTest,
    pub ks_normality: SarimaTest,
    pub zero_mean_ok: bool,
    pub stationary_ok: bool,
    pub no_autocorrelation_ok: bool,
    pub normality_ok: bool,
}

#[no_mangle]
pub unsafe extern "C" fn sarima_residual_report(
    fit: *const SarimaFit,
    training: *const SarimaSeries,
    out: *mut SarimaResidualReport,
) -> SarimaStatus {
    non_null!(fit, training, out);
    guard(|| match residual_report(&(*fit).0, &(*training).0, &ReportConfig::default()) {
        Ok(r) => {
            let t = |o: &sarima_core::diagnostics::TestOutcome| SarimaTest {
                statistic: o.statistic,
                p_value: o.p_value,
            };
            *out = SarimaResidualReport {
                nobs: r.nobs,
                mean: r.mean,
                zero_mean: t(&r.zero_mean),
                adf: t(&r.adf),
                box_pierce: t(&r.box_pierce),
                ljung_box: t(&r.ljung_box),
                ks_normality: t(&r.ks_normality),
                zero_mean_ok: r.checks.zero_mean,
                stationary_ok: r.checks.stationary,
                no_autocorrelation_ok: r.checks.no_autocorrelation,
                normality_ok: r.checks.normality,
            };
            SarimaStatus::Ok
        }
        Err(e) => fail(e),
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaDifference {
    pub nominal: f64,
    pub percent: f64,
}

impl From<Difference> for SarimaDifference {
    fn from(d: Difference) -> Self {
        Self {
            nominal: d.nominal,
            percent: d.percent,
        }
    }
}

/// Mean differences of observed values from the projection and its bands.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SarimaImpact {
    pub months: usize,
    pub point: SarimaDifference,
    pub lo80: SarimaDifference,
    pub hi80: SarimaDifference,
    pub lo95: SarimaDifference,
    pub hi95: SarimaDifference,
}

/// `observed` must cover exactly the forecast months.
#[no_mangle]
pub unsafe extern "C" fn sarima_impact(
    observed: *const SarimaSeries,
    projection: *const SarimaForecast,
    out: *mut SarimaImpact,
) -> SarimaStatus {
    non_null!(observed, projection, out);
    guard(|| match impact(&(*observed).0, &(*projection).0) {
        Ok(r) => {
            let m = r.means;
            *out = SarimaImpact {
                months: r.rows.len(),
                point: m.point.into(),
                lo80: m.lo80.into(),
                hi80: m.hi80.into(),
                lo95: m.lo95.into(),
                hi95: m.hi95.into(),
            };
            SarimaStatus::Ok
        }
        Err(e) => fail(e),
    })
}
