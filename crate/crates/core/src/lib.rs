//! Seasonal ARIMA toolkit: exact-likelihood estimation, exhaustive order
//! search, residual diagnostics, interval forecasts and counterfactual impact
//! measurement for monthly series.

// `!(x > 0.0)` is used on purpose so NaN falls into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterfactual;
pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod forecast;
pub mod format;
pub mod ingest;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod optim;
pub mod search;
pub mod series;
pub mod svg;

pub use error::{Error, ErrorCategory, Result};
pub use kernel::{ModelOrder, ParamVector};
pub use series::{DataSplits, MonthStamp, TimeSeries};
