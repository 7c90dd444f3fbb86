//! Exhaustive order search ranked by test-window MSE, with a final pick from
//! the shortlist by AIC, then MAPE, then RMSE.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{fit, FitConfig, FitResult};
use crate::forecast::forecast;
use crate::kernel::ModelOrder;
use crate::metrics::{accuracy, AccuracyReport};
use crate::series::DataSplits;

/// Inclusive range of order values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRange {
    pub min: usize,
    pub max: usize,
}

impl OrderRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min > max {
            return Err(Error::EmptySearchSpace);
        }
        Ok(Self { min, max })
    }

    pub fn fixed(value: usize) -> Self {
        Self { min: value, max: value }
    }

    pub fn len(&self) -> usize {
        self.max - self.min + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn values(&self) -> std::ops::RangeInclusive<usize> {
        self.min..=self.max
    }
}

impl std::str::FromStr for OrderRange {
    type Err = Error;

    /// `"3"` or `"0..5"` / `"0-5"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad order range `{s}`"));
        let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let v = s.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        OrderRange::new(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub p: OrderRange,
    pub d: OrderRange,
    pub q: OrderRange,
    #[serde(rename = "P")]
    pub sp: OrderRange,
    #[serde(rename = "D")]
    pub sd: OrderRange,
    #[serde(rename = "Q")]
    pub sq: OrderRange,
    pub period: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        let wide = OrderRange { min: 0, max: 5 };
        let diff = OrderRange { min: 0, max: 1 };
        Self {
            p: wide,
            d: diff,
            q: wide,
            sp: wide,
            sd: diff,
            sq: wide,
            period: 12,
        }
    }
}

impl SearchSpace {
    pub fn len(&self) -> usize {
        [self.p, self.d, self.q, self.sp, self.sd, self.sq]
            .iter()
            .map(OrderRange::len)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every cell, in lexicographic `(p, d, q, P, D, Q)` order.
    pub fn cells(&self) -> Result<Vec<ModelOrder>> {
        let mut out = Vec::with_capacity(self.len());
        for p in self.p.values() {
            for d in self.d.values() {
                for q in self.q.values() {
                    for sp in self.sp.values() {
                        for sd in self.sd.values() {
                            for sq in self.sq.values() {
                                out.push(ModelOrder::new(p, d, q, sp, sd, sq, self.period)?);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

impl std::str::FromStr for SearchSpace {
    type Err = Error;

    /// Comma-separated `key=range` overrides of the default space, keys
    /// `p d q P D Q s`, e.g. `p=0..1,q=0..1,d=1,D=1,P=0,Q=0`.
    fn from_str(s: &str) -> Result<Self> {
        let mut space = SearchSpace::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=range, got `{item}`")))?;
            let slot = match key.trim() {
                "p" => &mut space.p,
                "d" => &mut space.d,
                "q" => &mut space.q,
                "P" => &mut space.sp,
                "D" => &mut space.sd,
                "Q" => &mut space.sq,
                "s" => {
                    space.period = value
                        .trim()
                        .parse()
                        .ok()
                        .filter(|&p| p >= 1)
                        .ok_or_else(|| Error::InvalidArgument(format!("bad period `{value}`")))?;
                    continue;
                }
                other => return Err(Error::InvalidArgument(format!("unknown order key `{other}`"))),
            };
            *slot = value.parse()?;
        }
        Ok(space)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub fit: FitConfig,
    pub shortlist_size: usize,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    /// Wall-clock budget; cells not started in time are skipped and the
    /// leaderboard is flagged partial.
    pub budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            fit: FitConfig::default(),
            shortlist_size: 10,
            jobs: 0,
            budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub order: ModelOrder,
    pub fit: FitResult,
    /// Accuracy of the multi-step forecast over the test window.
    pub test: AccuracyReport,
    /// Accuracy of the one-step in-sample predictions.
    pub in_sample: AccuracyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFailure {
    pub order: ModelOrder,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    /// Successful cells sorted by test MSE, ties by order.
    pub entries: Vec<LeaderboardEntry>,
    pub shortlist_size: usize,
    pub failures: Vec<CellFailure>,
    pub total_cells: usize,
    pub evaluated_cells: usize,
    pub partial: bool,
}

impl Leaderboard {
    pub fn shortlist(&self) -> &[LeaderboardEntry] {
        &self.entries[..self.entries.len().min(self.shortlist_size)]
    }

    /// Every ranked entry: rank, order, fit statistics, then test and
    /// in-sample accuracy.
    pub fn write_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "rank",
            "p",
            "d",
            "q",
            "P",
            "D",
            "Q",
            "s",
            "loglik",
            "aic",
            "aicc",
            "bic",
            "sigma2",
            "test_mse",
            "test_rmse",
            "test_mape",
            "insample_rmse",
            "insample_mape",
        ])?;
        for (i, e) in self.entries.iter().enumerate() {
            let mut row = vec![(i + 1).to_string()];
            row.extend(order_fields(&e.order));
            row.push(e.order.period.to_string());
            row.extend(
                [
                    e.fit.loglik,
                    e.fit.aic,
                    e.fit.aicc,
                    e.fit.bic,
                    e.fit.sigma2,
                    e.test.mse,
                    e.test.rmse,
                    e.test.mape,
                    e.in_sample.rmse,
                    e.in_sample.mape,
                ]
                .map(&fmt),
            );
            w.write_record(&row)?;
        }
        w.flush()
    }

    /// Table-1 style rows `p,d,q,P,D,Q,rmse,mape,aic` for the shortlist, with
    /// in-sample RMSE and MAPE.
    pub fn write_shortlist_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "d", "q", "P", "D", "Q", "rmse", "mape", "aic"])?;
        for e in self.shortlist() {
            let mut row = order_fields(&e.order);
            row.extend([e.in_sample.rmse, e.in_sample.mape, e.fit.aic].map(&fmt));
            w.write_record(&row)?;
        }
        w.flush()
    }

    /// Test-window accuracy of the shortlist.
    pub fn write_test_csv<W: Write>(&self, out: W, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["p", "d", "q", "P", "D", "Q", "mse", "rmse", "mape"])?;
        for e in self.shortlist() {
            let mut row = order_fields(&e.order);
            row.extend([e.test.mse, e.test.rmse, e.test.mape].map(&fmt));
            w.write_record(&row)?;
        }
        w.flush()
    }
}

fn order_fields(o: &ModelOrder) -> Vec<String> {
    [o.p, o.d, o.q, o.sp, o.sd, o.sq].iter().map(|v| v.to_string()).collect()
}

enum CellOutcome {
    Done(Box<LeaderboardEntry>),
    Failed(CellFailure),
    Skipped,
}

fn evaluate(order: &ModelOrder, splits: &DataSplits, config: &FitConfig) -> Result<LeaderboardEntry> {
    let training = &splits.training;
    let test = splits.test_values();
    let fitted = fit(order, training, config)?;
    let fc = forecast(&fitted, training, test.len())?;
    let test_acc = accuracy(test, &fc.mean)?;
    if !test_acc.mse.is_finite() {
        return Err(Error::NumericalFailure("test MSE is not finite".into()));
    }
    let levels = fitted.fitted_levels(training)?;
    let in_sample = accuracy(&training.values()[order.diff_loss()..], levels.values())?;
    Ok(LeaderboardEntry {
        order: *order,
        fit: fitted,
        test: test_acc,
        in_sample,
    })
}

/// Fits every cell of `space` on the training split and ranks by test MSE.
pub fn grid_search(splits: &DataSplits, space: &SearchSpace, config: &SearchConfig) -> Result<Leaderboard> {
    if splits.test_len() == 0 {
        return Err(Error::InvalidArgument("grid search needs a nonempty test window".into()));
    }
    let cells = space.cells()?;
    if cells.is_empty() {
        return Err(Error::EmptySearchSpace);
    }
    let started = Instant::now();
    let run = |order: &ModelOrder| -> CellOutcome {
        if config.budget.is_some_and(|b| started.elapsed() >= b) {
            return CellOutcome::Skipped;
        }
        match evaluate(order, splits, &config.fit) {
            Ok(entry) => CellOutcome::Done(Box::new(entry)),
            Err(e) => {
                log::debug!("cell {order} failed: {e}");
                CellOutcome::Failed(CellFailure {
                    order: *order,
                    kind: e.kind().to_string(),
                    message: e.to_string(),
                })
            }
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    // indexed collect keeps cell order whatever the schedule
    let outcomes: Vec<CellOutcome> = pool.install(|| cells.par_iter().map(run).collect());

    let mut entries = Vec::new();
    let mut failures = Vec::new();
    let mut skipped = 0;
    for outcome in outcomes {
        match outcome {
            CellOutcome::Done(e) => entries.push(*e),
            CellOutcome::Failed(f) => failures.push(f),
            CellOutcome::Skipped => skipped += 1,
        }
    }
    log::info!(
        "grid search: {} fitted, {} failed, {} skipped of {}",
        entries.len(),
        failures.len(),
        skipped,
        cells.len()
    );
    if entries.is_empty() && skipped == 0 {
        return Err(Error::AllCellsFailed);
    }
    entries.sort_by(|a, b| a.test.mse.total_cmp(&b.test.mse).then(a.order.cmp(&b.order)));
    Ok(Leaderboard {
        entries,
        shortlist_size: config.shortlist_size,
        failures,
        total_cells: cells.len(),
        evaluated_cells: cells.len() - skipped,
        partial: skipped > 0,
    })
}

/// The numbers the final choice looks at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub order: ModelOrder,
    pub aic: f64,
    pub mape: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub order: ModelOrder,
    /// Shortlist in selection-key order.
    pub ranking: Vec<Candidate>,
    pub rationale: Vec<String>,
}

/// Lexicographic pick by (AIC, MAPE, RMSE, order).
pub fn select_from(candidates: &[Candidate]) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::EmptyShortlist);
    }
    let mut ranking = candidates.to_vec();
    ranking.sort_by(|a, b| {
        a.aic
            .total_cmp(&b.aic)
            .then(a.mape.total_cmp(&b.mape))
            .then(a.rmse.total_cmp(&b.rmse))
            .then(a.order.cmp(&b.order))
    });
    let best = ranking[0];
    let mut rationale = vec![format!(
        "{} has AIC {:.3}, MAPE {:.4}%, RMSE {:.6e}",
        best.order, best.aic, best.mape, best.rmse
    )];
    for other in &ranking[1..] {
        let reason = if other.aic != best.aic {
            format!("higher AIC ({:.3} > {:.3})", other.aic, best.aic)
        } else if other.mape != best.mape {
            format!("equal AIC, higher MAPE ({:.4}% > {:.4}%)", other.mape, best.mape)
        } else if other.rmse != best.rmse {
            format!("equal AIC and MAPE, higher RMSE ({:.6e} > {:.6e})", other.rmse, best.rmse)
        } else {
            "identical metrics, later order".to_string()
        };
        rationale.push(format!("{} loses: {reason}", other.order));
    }
    Ok(Selection {
        order: best.order,
        ranking,
        rationale,
    })
}

/// Final model from the shortlist, judged on AIC and in-sample MAPE/RMSE.
pub fn select_final(board: &Leaderboard) -> Result<Selection> {
    let candidates: Vec<Candidate> = board
        .shortlist()
        .iter()
        .map(|e| Candidate {
            order: e.order,
            aic: e.fit.aic,
            mape: e.in_sample.mape,
            rmse: e.in_sample.rmse,
        })
        .collect();
    select_from(&candidates)
}
