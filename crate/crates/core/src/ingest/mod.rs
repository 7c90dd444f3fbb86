//! Loading monthly series from CSV files and from the SGS open-data API.

mod sgs;

pub use sgs::{aggregate_last_of_month, fetch_sgs, parse_sgs_payload, SgsConfig, SgsRecord, DEFAULT_SGS_BASE_URL};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{MonthStamp, TimeSeries};

/// Decimal separator of the input values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decimal {
    /// `1,234,567.89`
    #[default]
    Dot,
    /// `1.234.567,89`
    Comma,
}

/// A column chosen by zero-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(s.parse().map(Column::Index).unwrap_or_else(|_| Column::Name(s.to_string())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub date: Column,
    pub value: Column,
    pub delimiter: u8,
    pub decimal: Decimal,
    /// `None` detects a header by whether the first date cell parses.
    pub header: Option<bool>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            date: Column::Index(0),
            value: Column::Index(1),
            delimiter: b',',
            decimal: Decimal::Dot,
            header: None,
        }
    }
}

/// Parses a number written with the given decimal convention; thousands
/// separators are dropped.
pub fn parse_decimal(text: &str, decimal: Decimal) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    let cleaned: String = match decimal {
        Decimal::Dot => t.chars().filter(|&c| c != ',' && c != '_').collect(),
        Decimal::Comma => t.chars().filter(|&c| c != '.').map(|c| if c == ',' { '.' } else { c }).collect(),
    };
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Accepts `YYYY-MM`, `YYYY-MM-DD`, `YYYY/MM`, `MM/YYYY` and `DD/MM/YYYY`.
pub fn parse_month(text: &str) -> Option<MonthStamp> {
    let t = text.trim();
    let nums: Vec<&str> = t.split(['-', '/']).collect();
    let num = |s: &str| -> Option<u32> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    };
    let (year, month) = match nums.as_slice() {
        [a, b] if a.len() == 4 => (num(a)?, num(b)?),
        [a, b] if b.len() == 4 => (num(b)?, num(a)?),
        [a, b, c] if a.len() == 4 && t.contains('-') => {
            let day = num(c)?;
            if !(1..=31).contains(&day) {
                return None;
            }
            (num(a)?, num(b)?)
        }
        [d, m, y] if y.len() == 4 && t.contains('/') => {
            let day = num(d)?;
            if !(1..=31).contains(&day) {
                return None;
            }
            (num(y)?, num(m)?)
        }
        _ => return None,
    };
    MonthStamp::new(year as i32, month).ok()
}

fn resolve(column: &Column, header: Option<&csv::StringRecord>) -> Result<usize> {
    match column {
        Column::Index(i) => Ok(*i),
        Column::Name(name) => header
            .and_then(|h| h.iter().position(|c| c.trim() == name))
            .ok_or_else(|| Error::Config(format!("no column named `{name}`"))),
    }
}

/// Builds a gap-free series from `(month, value, row)` triples in any order.
pub fn assemble(mut points: Vec<(MonthStamp, f64, usize)>) -> Result<TimeSeries> {
    if points.is_empty() {
        return Err(Error::EmptySeries);
    }
    points.sort_by_key(|p| p.0);
    for w in points.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateMonth(w[0].0));
        }
        if w[0].0.succ() != w[1].0 {
            return Err(Error::GapInCalendar(w[0].0.succ()));
        }
    }
    let start = points[0].0;
    TimeSeries::new(start, points.into_iter().map(|p| p.1).collect())
}

/// Reads a monthly series from CSV text.
pub fn read_csv<R: Read>(input: R, spec: &ColumnSpec) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(spec.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = reader.records().enumerate().peekable();

    let mut header_record = None;
    let header = match spec.header {
        Some(h) => h,
        None => match records.peek() {
            Some((_, Ok(first))) => {
                let idx = match &spec.date {
                    Column::Index(i) => *i,
                    Column::Name(_) => 0,
                };
                first.get(idx).map_or(true, |cell| parse_month(cell).is_none())
            }
            _ => false,
        },
    };
    if header {
        if let Some((_, rec)) = records.next() {
            header_record = Some(rec.map_err(|e| Error::Parse { row: 1, message: e.to_string() })?);
        }
    }
    let date_col = resolve(&spec.date, header_record.as_ref())?;
    let value_col = resolve(&spec.value, header_record.as_ref())?;

    let mut points = Vec::new();
    for (i, rec) in records {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, message: e.to_string() })?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        let cell = |col: usize| {
            rec.get(col).ok_or_else(|| Error::Parse {
                row,
                message: format!("missing column {col}"),
            })
        };
        let date_text = cell(date_col)?;
        let month = parse_month(date_text).ok_or_else(|| Error::Parse {
            row,
            message: format!("unrecognized date `{date_text}`"),
        })?;
        let value_text = cell(value_col)?;
        let value = parse_decimal(value_text, spec.decimal).ok_or_else(|| Error::Parse {
            row,
            message: format!("non-numeric value `{value_text}`"),
        })?;
        points.push((month, value, row));
    }
    assemble(points)
}

pub fn load_csv(path: &Path, spec: &ColumnSpec) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, spec)
}

/// Canonical form: header `date,value`, `YYYY-MM` dates, shortest
/// round-trip decimal values.
pub fn write_csv<W: Write>(series: &TimeSeries, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "value"])?;
    for (month, value) in series.iter() {
        w.write_record([month.to_string(), value.to_string()])?;
    }
    w.flush()
}

pub fn save_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(series, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Groups `(date, value)` observations by month, keeping the latest one.
pub(crate) fn last_per_month<D: Ord + Copy>(obs: impl IntoIterator<Item = (MonthStamp, D, f64)>) -> BTreeMap<MonthStamp, (D, f64)> {
    let mut months: BTreeMap<MonthStamp, (D, f64)> = BTreeMap::new();
    for (month, day, value) in obs {
        match months.get(&month) {
            Some((seen, _)) if *seen > day => {}
            _ => {
                months.insert(month, (day, value));
            }
        }
    }
    months
}
