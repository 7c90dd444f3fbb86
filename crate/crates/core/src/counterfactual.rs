//! Deviation of observed values from a counterfactual projection, for the
//! point forecast and for each band limit.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::Forecast;
use crate::series::{MonthStamp, TimeSeries};

/// Nominal (`R - R̂`) and percentage (`100 (R - R̂) / R̂`) difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Difference {
    pub nominal: f64,
    pub percent: f64,
}

impl Difference {
    fn between(actual: f64, reference: f64) -> Self {
        Self {
            nominal: actual - reference,
            percent: 100.0 * (actual - reference) / reference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactRow {
    pub date: MonthStamp,
    pub actual: f64,
    pub predicted: f64,
    pub point: Difference,
    pub lo80: Difference,
    pub hi80: Difference,
    pub lo95: Difference,
    pub hi95: Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactMeans {
    pub point: Difference,
    pub lo80: Difference,
    pub hi80: Difference,
    pub lo95: Difference,
    pub hi95: Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub rows: Vec<ImpactRow>,
    pub means: ImpactMeans,
}

/// Compares `observed` with `projection` month by month.
pub fn impact(observed: &TimeSeries, projection: &Forecast) -> Result<ImpactReport> {
    if observed.start() != projection.start || observed.len() != projection.len() {
        return Err(Error::RangeMismatch(format!(
            "observed covers {}..{}, projection covers {}..{}",
            observed.start(),
            observed.end(),
            projection.start,
            projection.end()
        )));
    }
    let mut rows = Vec::with_capacity(observed.len());
    for (i, (date, actual)) in observed.iter().enumerate() {
        let refs = [
            projection.mean[i],
            projection.lo80[i],
            projection.hi80[i],
            projection.lo95[i],
            projection.hi95[i],
        ];
        if refs.contains(&0.0) {
            return Err(Error::ZeroProjection(date));
        }
        let [point, lo80, hi80, lo95, hi95] = refs.map(|r| Difference::between(actual, r));
        rows.push(ImpactRow {
            date,
            actual,
            predicted: projection.mean[i],
            point,
            lo80,
            hi80,
            lo95,
            hi95,
        });
    }
    let n = rows.len() as f64;
    let mean_of = |pick: fn(&ImpactRow) -> Difference| Difference {
        nominal: rows.iter().map(|r| pick(r).nominal).sum::<f64>() / n,
        percent: rows.iter().map(|r| pick(r).percent).sum::<f64>() / n,
    };
    let means = ImpactMeans {
        point: mean_of(|r| r.point),
        lo80: mean_of(|r| r.lo80),
        hi80: mean_of(|r| r.hi80),
        lo95: mean_of(|r| r.lo95),
        hi95: mean_of(|r| r.hi95),
    };
    Ok(ImpactReport { rows, means })
}

impl ImpactReport {
    /// Per-period rows: `date,actual,predicted,nominal,percent` followed by the
    /// nominal and percent columns for each band limit.
    pub fn write_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "date",
            "actual",
            "predicted",
            "nominal",
            "percent",
            "nominal_lo80",
            "nominal_hi80",
            "nominal_lo95",
            "nominal_hi95",
            "percent_lo80",
            "percent_hi80",
            "percent_lo95",
            "percent_hi95",
        ])?;
        for r in &self.rows {
            let mut row = vec![r.date.to_string()];
            row.extend(
                [
                    r.actual,
                    r.predicted,
                    r.point.nominal,
                    r.point.percent,
                    r.lo80.nominal,
                    r.hi80.nominal,
                    r.lo95.nominal,
                    r.hi95.nominal,
                    r.lo80.percent,
                    r.hi80.percent,
                    r.lo95.percent,
                    r.hi95.percent,
                ]
                .map(&fmt),
            );
            w.write_record(&row)?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub estimate: String,
    pub mean_nominal: f64,
    pub mean_percent: f64,
}

/// Five-row summary: point estimate, then the lower and upper limits of the
/// 80% and 95% bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactSummary {
    pub start: MonthStamp,
    pub end: MonthStamp,
    pub rows: Vec<SummaryRow>,
}

pub fn impact_summary_table(report: &ImpactReport) -> Result<ImpactSummary> {
    let (Some(first), Some(last)) = (report.rows.first(), report.rows.last()) else {
        return Err(Error::EmptyReport);
    };
    let m = &report.means;
    let rows = [
        ("point", m.point),
        ("lower_80", m.lo80),
        ("upper_80", m.hi80),
        ("lower_95", m.lo95),
        ("upper_95", m.hi95),
    ]
    .into_iter()
    .map(|(label, d)| SummaryRow {
        estimate: label.into(),
        mean_nominal: d.nominal,
        mean_percent: d.percent,
    })
    .collect();
    Ok(ImpactSummary {
        start: first.date,
        end: last.date,
        rows,
    })
}

impl ImpactSummary {
    pub fn write_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["estimate", "mean_nominal", "mean_percent"])?;
        for r in &self.rows {
            w.write_record([r.estimate.clone(), fmt(r.mean_nominal), fmt(r.mean_percent)])?;
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn month() -> MonthStamp {
        MonthStamp::new(2021, 4).unwrap()
    }

    fn projection(mean: f64, lo80: f64, hi80: f64, lo95: f64, hi95: f64) -> Forecast {
        Forecast {
            start: month(),
            mean: vec![mean],
            se: vec![1.0],
            lo80: vec![lo80],
            hi80: vec![hi80],
            lo95: vec![lo95],
            hi95: vec![hi95],
        }
    }

    #[test]
    fn single_period_example() {
        let observed = TimeSeries::new(month(), vec![120.0]).unwrap();
        let report = impact(&observed, &projection(100.0, 95.0, 105.0, 90.0, 110.0)).unwrap();
        let r = report.rows[0];
        assert_eq!((r.point.nominal, r.point.percent), (20.0, 20.0));
        assert_eq!(r.lo95.nominal, 30.0);
        assert_relative_eq!(r.lo95.percent, 100.0 / 3.0, epsilon = 1e-12);
        assert_eq!(r.hi95.nominal, 10.0);
        assert_relative_eq!(r.hi95.percent, 100.0 / 11.0, epsilon = 1e-12);

        let table = impact_summary_table(&report).unwrap();
        assert_eq!(table.rows[0].mean_nominal, 20.0);
        assert_eq!(table.rows[3].estimate, "lower_95");
        assert_eq!(table.rows[3].mean_nominal, 30.0);
        assert_eq!(table.rows[4].mean_nominal, 10.0);
    }

    #[test]
    fn no_deviation() {
        let observed = TimeSeries::new(month(), vec![50.0]).unwrap();
        let report = impact(&observed, &projection(50.0, 50.0, 50.0, 50.0, 50.0)).unwrap();
        let table = impact_summary_table(&report).unwrap();
        assert!(table.rows.iter().all(|r| r.mean_nominal == 0.0 && r.mean_percent == 0.0));
    }

    #[test]
    fn errors() {
        let observed = TimeSeries::new(month().succ(), vec![1.0]).unwrap();
        assert!(matches!(
            impact(&observed, &projection(1.0, 1.0, 1.0, 1.0, 1.0)),
            Err(Error::RangeMismatch(_))
        ));
        let observed = TimeSeries::new(month(), vec![1.0]).unwrap();
        assert!(matches!(
            impact(&observed, &projection(0.0, -1.0, 1.0, -2.0, 2.0)),
            Err(Error::ZeroProjection(_))
        ));
        let empty = ImpactReport {
            rows: vec![],
            means: ImpactMeans {
                point: Difference { nominal: 0.0, percent: 0.0 },
                lo80: Difference { nominal: 0.0, percent: 0.0 },
                hi80: Difference { nominal: 0.0, percent: 0.0 },
                lo95: Difference { nominal: 0.0, percent: 0.0 },
                hi95: Difference { nominal: 0.0, percent: 0.0 },
            },
        };
        assert!(matches!(impact_summary_table(&empty), Err(Error::EmptyReport)));
    }
}
