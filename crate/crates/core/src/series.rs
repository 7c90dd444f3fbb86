//! Calendar-indexed monthly series, differencing and the train/test/comparison split.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A Gregorian calendar month.
///
/// Ordering is lexicographic on `(year, month)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonthStamp {
    year: i32,
    month: u32,
}

impl MonthStamp {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidMonth { year, month });
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    /// Months since year 0, January.
    fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(12);
        let month = ordinal.rem_euclid(12) + 1;
        Self {
            year: year as i32,
            month: month as u32,
        }
    }

    pub fn succ(self) -> Self {
        self.add_months(1)
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `later`.
    pub fn months_until(self, later: MonthStamp) -> i64 {
        later.ordinal() - self.ordinal()
    }

    /// Number of days in this month.
    pub fn days_in_month(self) -> u32 {
        match self.month {
            1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
            4 | 6 | 9 | 11 => 30,
            _ => {
                let y = self.year;
                if (y % 4 == 0 && y % 100 != 0) || y % 400 == 0 {
                    29
                } else {
                    28
                }
            }
        }
    }
}

impl PartialOrd for MonthStamp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonthStamp {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.year, self.month).cmp(&(other.year, other.month))
    }
}

impl fmt::Display for MonthStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthStamp {
    type Err = Error;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected YYYY-MM, got {s:?}"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let year = y.parse::<i32>().map_err(|_| bad())?;
        let month = m.parse::<u32>().map_err(|_| bad())?;
        MonthStamp::new(year, month)
    }
}

impl Serialize for MonthStamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MonthStamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Gap-free monthly series of finite values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    start: MonthStamp,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start: MonthStamp, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { start, values })
    }

    pub fn start(&self) -> MonthStamp {
        self.start
    }

    /// Month of the last observation.
    pub fn end(&self) -> MonthStamp {
        self.month_at(self.values.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn month_at(&self, index: usize) -> MonthStamp {
        self.start.add_months(index as i64)
    }

    pub fn index_of(&self, month: MonthStamp) -> Option<usize> {
        let offset = self.start.months_until(month);
        (offset >= 0 && (offset as usize) < self.values.len()).then_some(offset as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthStamp, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.month_at(i), v))
    }

    /// Same values re-anchored at another start month.
    pub fn with_start(mut self, start: MonthStamp) -> Self {
        self.start = start;
        self
    }

    /// Inclusive month window `[from, to]`.
    pub fn window(&self, from: MonthStamp, to: MonthStamp) -> Result<TimeSeries> {
        let (Some(i), Some(j)) = (self.index_of(from), self.index_of(to)) else {
            return Err(Error::OutOfRange(format!(
                "window {from}..{to} outside series {}..{}",
                self.start,
                self.end()
            )));
        };
        if j < i {
            return Err(Error::OutOfRange(format!("window end {to} precedes start {from}")));
        }
        Ok(TimeSeries {
            start: from,
            values: self.values[i..=j].to_vec(),
        })
    }

    /// Index range `[from, to)`; `None` when empty.
    fn slice(&self, from: usize, to: usize) -> Option<TimeSeries> {
        (to > from).then(|| TimeSeries {
            start: self.month_at(from),
            values: self.values[from..to].to_vec(),
        })
    }
}

/// Coefficients `c_0..c_m` of `(1-B)^d (1-B^s)^D`, with `c_0 = 1`.
pub fn differencing_polynomial(d: usize, seasonal_d: usize, period: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mut multiply = |lag: usize| {
        let mut next = vec![0.0; poly.len() + lag];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + lag] -= c;
        }
        poly = next;
    };
    for _ in 0..seasonal_d {
        multiply(period);
    }
    for _ in 0..d {
        multiply(1);
    }
    poly
}

/// Seasonal differencing `seasonal_d` times, then ordinary differencing `d` times.
pub fn difference_values(values: &[f64], d: usize, seasonal_d: usize, period: usize) -> Result<Vec<f64>> {
    if period == 0 {
        return Err(Error::InvalidArgument("seasonal period must be at least 1".into()));
    }
    let lost = d + seasonal_d * period;
    if values.len() <= lost {
        return Err(Error::LengthTooShort {
            required: lost,
            actual: values.len(),
        });
    }
    let mut out = values.to_vec();
    for _ in 0..seasonal_d {
        out = out.windows(period + 1).map(|w| w[period] - w[0]).collect();
    }
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

pub fn difference(series: &TimeSeries, d: usize, seasonal_d: usize, period: usize) -> Result<TimeSeries> {
    let values = difference_values(series.values(), d, seasonal_d, period)?;
    let lost = d + seasonal_d * period;
    Ok(TimeSeries {
        start: series.start.add_months(lost as i64),
        values,
    })
}

/// Extends `levels` with new observations whose differenced values are `diffs`.
///
/// `levels` must hold at least `d + D*s` trailing observations of the original scale.
pub fn extend_levels(levels: &[f64], diffs: &[f64], d: usize, seasonal_d: usize, period: usize) -> Result<Vec<f64>> {
    let poly = differencing_polynomial(d, seasonal_d, period);
    let m = poly.len() - 1;
    if levels.len() < m {
        return Err(Error::ArityMismatch {
            expected: m,
            actual: levels.len(),
        });
    }
    let mut history: Vec<f64> = levels[levels.len() - m..].to_vec();
    let mut out = Vec::with_capacity(diffs.len());
    for &w in diffs {
        let len = history.len();
        let x = w - (1..=m).map(|i| poly[i] * history[len - i]).sum::<f64>();
        history.push(x);
        out.push(x);
    }
    Ok(out)
}

/// Inverse of [`difference`]: rebuilds levels from the `d + D*s` leading observations.
pub fn integrate(
    diffed: &TimeSeries,
    d: usize,
    seasonal_d: usize,
    period: usize,
    initial_values: &[f64],
) -> Result<TimeSeries> {
    if period == 0 {
        return Err(Error::InvalidArgument("seasonal period must be at least 1".into()));
    }
    let m = d + seasonal_d * period;
    if initial_values.len() != m {
        return Err(Error::ArityMismatch {
            expected: m,
            actual: initial_values.len(),
        });
    }
    let mut values = initial_values.to_vec();
    values.extend(extend_levels(initial_values, diffed.values(), d, seasonal_d, period)?);
    TimeSeries::new(diffed.start.add_months(-(m as i64)), values)
}

/// Training, test and comparison segments of one contiguous window.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSplits {
    pub training: TimeSeries,
    pub test: Option<TimeSeries>,
    pub comparison: Option<TimeSeries>,
}

impl DataSplits {
    pub fn test_values(&self) -> &[f64] {
        self.test.as_ref().map_or(&[], |s| s.values())
    }

    pub fn comparison_values(&self) -> &[f64] {
        self.comparison.as_ref().map_or(&[], |s| s.values())
    }

    pub fn test_len(&self) -> usize {
        self.test_values().len()
    }
}

/// Training ends at `train_end` inclusive, the next `test_len` months form the
/// test window and whatever follows is the comparison window.
pub fn split(series: &TimeSeries, train_end: MonthStamp, test_len: usize) -> Result<DataSplits> {
    let Some(last_train) = series.index_of(train_end) else {
        return Err(Error::OutOfRange(format!(
            "training end {train_end} outside series {}..{}",
            series.start(),
            series.end()
        )));
    };
    let test_from = last_train + 1;
    let test_to = test_from + test_len;
    if test_to > series.len() {
        return Err(Error::OutOfRange(format!(
            "test window of {test_len} months after {train_end} exceeds series ending {}",
            series.end()
        )));
    }
    Ok(DataSplits {
        training: series.slice(0, test_from).expect("training is nonempty"),
        test: series.slice(test_from, test_to),
        comparison: series.slice(test_to, series.len()),
    })
}
