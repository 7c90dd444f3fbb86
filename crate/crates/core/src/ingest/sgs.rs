//! Client for the central bank's SGS time-series API, with an on-disk cache.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{assemble, last_per_month, load_csv, parse_decimal, save_csv, ColumnSpec, Decimal};
use crate::error::{Error, Result};
use crate::series::{MonthStamp, TimeSeries};

pub const DEFAULT_SGS_BASE_URL: &str = "https://api.bcb.gov.br";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgsConfig {
    pub code: u32,
    pub base_url: String,
    pub cache_dir: PathBuf,
    /// First and last month requested; required because the cache is keyed
    /// by it.
    pub date_range: Option<(MonthStamp, MonthStamp)>,
    /// Ignore a warm cache and fetch again.
    pub refresh: bool,
    pub timeout_secs: u64,
}

impl SgsConfig {
    pub fn new(code: u32, cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            code,
            base_url: DEFAULT_SGS_BASE_URL.to_string(),
            cache_dir: cache_dir.into(),
            date_range: None,
            refresh: false,
            timeout_secs: 30,
        }
    }

    fn range(&self) -> Result<(MonthStamp, MonthStamp)> {
        let (start, end) = self
            .date_range
            .ok_or_else(|| Error::Config("an SGS fetch needs a date range (--from/--to)".into()))?;
        if start > end {
            return Err(Error::Config(format!("date range {start}..{end} is empty")));
        }
        Ok((start, end))
    }

    pub fn url(&self) -> Result<String> {
        let (start, end) = self.range()?;
        Ok(format!(
            "{}/dados/serie/bcdata.sgs.{}/dados?formato=json&dataInicial=01/{:02}/{:04}&dataFinal={:02}/{:02}/{:04}",
            self.base_url.trim_end_matches('/'),
            self.code,
            start.month(),
            start.year(),
            end.days_in_month(),
            end.month(),
            end.year()
        ))
    }

    pub fn cache_path(&self) -> Result<PathBuf> {
        let (start, end) = self.range()?;
        Ok(self.cache_dir.join(format!("sgs-{}", self.code)).join(format!("{start}-{end}.csv")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SgsRecord {
    pub data: String,
    pub valor: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheMeta {
    code: u32,
    start: MonthStamp,
    end: MonthStamp,
    url: String,
    fetched_at: String,
    records: usize,
}

/// Decodes the JSON array of `{"data": "DD/MM/YYYY", "valor": "..."}`.
pub fn parse_sgs_payload(body: &str) -> Result<Vec<(NaiveDate, f64)>> {
    let records: Vec<SgsRecord> = serde_json::from_str(body).map_err(|e| Error::Schema(e.to_string()))?;
    records
        .iter()
        .map(|r| {
            let date = NaiveDate::parse_from_str(r.data.trim(), "%d/%m/%Y")
                .map_err(|e| Error::Schema(format!("bad date `{}`: {e}", r.data)))?;
            // a comma marks the Brazilian convention; otherwise a dot decimal
            let decimal = if r.valor.contains(',') { Decimal::Comma } else { Decimal::Dot };
            let value = parse_decimal(&r.valor, decimal).ok_or_else(|| Error::Schema(format!("bad value `{}`", r.valor)))?;
            Ok((date, value))
        })
        .collect()
}

/// Monthly series from dated observations, keeping the last one per month.
pub fn aggregate_last_of_month(obs: &[(NaiveDate, f64)]) -> Result<TimeSeries> {
    let mut keyed = Vec::with_capacity(obs.len());
    for &(date, value) in obs {
        keyed.push((MonthStamp::new(date.year(), date.month())?, date, value));
    }
    let months = last_per_month(keyed);
    assemble(months.into_iter().map(|(m, (_, v))| (m, v, 0)).collect())
}

fn read_cache(path: &Path) -> Result<TimeSeries> {
    load_csv(path, &ColumnSpec::default()).map_err(|e| Error::CacheCorrupt(format!("{}: {e}", path.display())))
}

fn download(config: &SgsConfig, url: &str) -> Result<String> {
    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build();
    match agent.get(url).set("Accept", "application/json").call() {
        Ok(resp) => resp.into_string().map_err(|e| Error::Network {
            status: 200,
            message: e.to_string(),
        }),
        Err(ureq::Error::Status(status, resp)) => Err(Error::Network {
            status,
            message: resp.status_text().to_string(),
        }),
        Err(e) => Err(Error::Network {
            status: 0,
            message: e.to_string(),
        }),
    }
}

/// Fetches an SGS series, serving a warm cache without touching the network.
///
/// When the request fails and a cached copy exists, the cached copy is
/// returned with a logged warning.
pub fn fetch_sgs(config: &SgsConfig) -> Result<TimeSeries> {
    if config.code == 0 {
        return Err(Error::Config("SGS series code must be positive".into()));
    }
    let (start, end) = config.range()?;
    let path = config.cache_path()?;
    if !config.refresh && path.exists() {
        match read_cache(&path) {
            Ok(series) => {
                log::debug!("SGS {} served from {}", config.code, path.display());
                return Ok(series);
            }
            Err(e) => log::warn!("{e}; fetching again"),
        }
    }

    let url = config.url()?;
    log::info!("GET {url}");
    let body = match download(config, &url) {
        Ok(body) => body,
        Err(err) => {
            if path.exists() {
                if let Ok(series) = read_cache(&path) {
                    log::warn!("{err}; using cached {}", path.display());
                    return Ok(series);
                }
            }
            return Err(err);
        }
    };
    let obs = parse_sgs_payload(&body)?;
    if obs.is_empty() {
        return Err(Error::EmptySeries);
    }
    let series = aggregate_last_of_month(&obs)?;

    let dir = path.parent().expect("cache path has a parent");
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_csv(&series, &path)?;
    let meta = CacheMeta {
        code: config.code,
        start,
        end,
        url,
        fetched_at: chrono::Utc::now().to_rfc3339(),
        records: obs.len(),
    };
    let meta_path = path.with_extension("meta.json");
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_template() {
        let mut cfg = SgsConfig::new(1788, "/tmp/cache");
        assert!(matches!(cfg.url(), Err(Error::Config(_))));
        cfg.date_range = Some((MonthStamp::new(2000, 1).unwrap(), MonthStamp::new(2020, 2).unwrap()));
        assert_eq!(
            cfg.url().unwrap(),
            "https://api.bcb.gov.br/dados/serie/bcdata.sgs.1788/dados?formato=json&dataInicial=01/01/2000&dataFinal=29/02/2020"
        );
        assert_eq!(cfg.cache_path().unwrap(), PathBuf::from("/tmp/cache/sgs-1788/2000-01-2020-02.csv"));
    }

    #[test]
    fn payload_values() {
        let obs = parse_sgs_payload(r#"[{"data":"01/01/2000","valor":"0,00"},{"data":"01/02/2000","valor":"1234.5"}]"#).unwrap();
        assert_eq!(obs[0].1, 0.0);
        assert_eq!(obs[1].1, 1234.5);
        assert!(matches!(parse_sgs_payload(r#"{"error":"x"}"#), Err(Error::Schema(_))));
        assert!(matches!(parse_sgs_payload(r#"[{"data":"2000-01-01","valor":"1"}]"#), Err(Error::Schema(_))));
    }

    #[test]
    fn last_observation_rule() {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).unwrap();
        let daily = [
            (d(2020, 1, 2), 1.0),
            (d(2020, 1, 31), 3.0),
            (d(2020, 1, 15), 2.0),
            (d(2020, 2, 3), 4.0),
            (d(2020, 2, 28), 5.0),
            (d(2020, 3, 1), 6.0),
        ];
        let s = aggregate_last_of_month(&daily).unwrap();
        assert_eq!(s.start(), MonthStamp::new(2020, 1).unwrap());
        assert_eq!(s.values(), &[3.0, 5.0, 6.0]);
    }
}
