use std::io::Write;
use std::time::Duration;

use serde::Serialize;

use sarima_core::counterfactual::{impact, impact_summary_table, ImpactMeans, ImpactSummary};
use sarima_core::diagnostics::{acf, pacf, residual_report, ReportConfig};
use sarima_core::estimation::{fit, FitConfig, FitResult};
use sarima_core::forecast::{empirical_coverage, forecast, Forecast};
use sarima_core::format::formatter;
use sarima_core::ingest::{fetch_sgs, read_csv, write_csv, ColumnSpec, SgsConfig};
use sarima_core::kernel::simulate;
use sarima_core::metrics::accuracy;
use sarima_core::search::{grid_search, select_final, SearchConfig};
use sarima_core::series::split;
use sarima_core::svg::{line_chart, Line};
use sarima_core::{DataSplits, Error, ModelOrder, MonthStamp, ParamVector, Result, TimeSeries};

use crate::args::*;
use crate::manifest::{sha256_hex, InputFingerprint, OutputDir, RunManifest};

pub struct Run {
    pub precision: usize,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub started_at: String,
}

impl Run {
    fn fmt(&self) -> impl Fn(f64) -> String + Copy {
        formatter(self.precision)
    }

    fn manifest(&self, input: Option<InputFingerprint>) -> RunManifest {
        RunManifest {
            tool: "sarima",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.to_string(),
            config: self.config.clone(),
            precision: self.precision,
            input,
            started_at: self.started_at.clone(),
            finished_at: String::new(),
            outputs: Vec::new(),
        }
    }
}

fn load_source(src: &SourceArgs) -> Result<(TimeSeries, InputFingerprint)> {
    let (series, source, sha256) = if let Some(path) = &src.csv {
        if !src.delimiter.is_ascii() {
            return Err(Error::Config(format!("delimiter `{}` is not a single byte", src.delimiter)));
        }
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let spec = ColumnSpec {
            date: src.date_col.clone(),
            value: src.value_col.clone(),
            delimiter: src.delimiter as u8,
            decimal: src.decimal,
            header: None,
        };
        let series = read_csv(bytes.as_slice(), &spec)?;
        let series = series.window(src.from.unwrap_or(series.start()), src.to.unwrap_or(series.end()))?;
        (series, format!("csv:{}", path.display()), sha256_hex(&bytes))
    } else {
        let code = src.sgs.ok_or_else(|| Error::Config("one of --csv or --sgs is required".into()))?;
        let config = SgsConfig {
            code,
            base_url: src.sgs_base_url.clone(),
            cache_dir: src.cache_dir.clone(),
            date_range: src.from.zip(src.to),
            refresh: src.refresh,
            timeout_secs: 30,
        };
        let series = fetch_sgs(&config)?;
        let mut canonical = Vec::new();
        write_csv(&series, &mut canonical).map_err(|e| Error::io("<memory>", e))?;
        (series, format!("sgs:{code}"), sha256_hex(&canonical))
    };
    let series = if src.scale == 1.0 {
        series
    } else {
        if !(src.scale.is_finite() && src.scale != 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be finite and nonzero, got {}", src.scale)));
        }
        let start = series.start();
        TimeSeries::new(start, series.into_values().into_iter().map(|v| v * src.scale).collect())?
    };
    let fingerprint = InputFingerprint {
        source,
        sha256,
        first: series.start().to_string(),
        last: series.end().to_string(),
        observations: series.len(),
    };
    Ok((series, fingerprint))
}

fn make_splits(series: &TimeSeries, args: &SplitArgs) -> Result<DataSplits> {
    let train_end = match args.train_end {
        Some(m) => m,
        None => {
            if args.test_len >= series.len() {
                return Err(Error::OutOfRange(format!(
                    "a {}-month test window leaves no training data in {} observations",
                    args.test_len,
                    series.len()
                )));
            }
            series.end().add_months(-(args.test_len as i64))
        }
    };
    split(series, train_end, args.test_len)
}

fn fit_config(optim: &OptimArgs) -> FitConfig {
    FitConfig {
        tol: optim.tol,
        max_iter: optim.max_iter,
        ..FitConfig::default()
    }
}

fn write_series(out: &mut OutputDir, series: &TimeSeries, svg: bool) -> Result<()> {
    out.write_with("series.csv", |buf| write_csv(series, buf))?;
    if svg {
        let points = series.iter().enumerate().map(|(i, (_, v))| (i as f64, v)).collect();
        let chart = line_chart(
            "Series",
            &[Line {
                label: "observed",
                color: "black",
                dashed: false,
                points,
            }],
            (&series.start().to_string(), &series.end().to_string()),
        );
        out.write("series.svg", chart.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Window {
    start: MonthStamp,
    end: MonthStamp,
    observations: usize,
}

impl Window {
    fn of(s: &TimeSeries) -> Self {
        Self {
            start: s.start(),
            end: s.end(),
            observations: s.len(),
        }
    }
}

#[derive(Serialize)]
struct Coefficient {
    name: String,
    estimate: f64,
    std_error: Option<f64>,
    z: Option<f64>,
}

fn coefficients(fit: &FitResult) -> Vec<Coefficient> {
    fit.order
        .coef_names()
        .into_iter()
        .zip(fit.params.coefficients())
        .zip(&fit.stderr)
        .map(|((name, estimate), se)| Coefficient {
            name,
            estimate,
            std_error: *se,
            z: se.map(|s| estimate / s),
        })
        .collect()
}

/// Observed months from the series start through the later of the series
/// and projection ends, with projection columns where they exist.
struct BandTable {
    start: MonthStamp,
    actual: Vec<Option<f64>>,
    /// `mean, lo80, hi80, lo95, hi95`
    bands: Vec<Option<[f64; 5]>>,
}

impl BandTable {
    fn new(series: &TimeSeries, fc: &Forecast) -> Self {
        let start = series.start().min(fc.start);
        let end = series.end().max(fc.end());
        let n = start.months_until(end) as usize + 1;
        let mut actual = vec![None; n];
        let mut bands = vec![None; n];
        for (m, v) in series.iter() {
            actual[start.months_until(m) as usize] = Some(v);
        }
        for i in 0..fc.len() {
            bands[start.months_until(fc.month_at(i)) as usize] =
                Some([fc.mean[i], fc.lo80[i], fc.hi80[i], fc.lo95[i], fc.hi95[i]]);
        }
        Self { start, actual, bands }
    }

    fn write_csv(&self, out: &mut Vec<u8>, fmt: impl Fn(f64) -> String) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "actual", "mean", "lo80", "hi80", "lo95", "hi95"])?;
        let cell = |v: Option<f64>| v.map(&fmt).unwrap_or_default();
        for (i, (a, b)) in self.actual.iter().zip(&self.bands).enumerate() {
            let mut row = vec![self.start.add_months(i as i64).to_string(), cell(*a)];
            row.extend((0..5).map(|k| cell(b.map(|b| b[k]))));
            w.write_record(&row)?;
        }
        w.flush()
    }

    fn svg(&self, title: &str) -> String {
        let pts = |f: &dyn Fn(usize) -> Option<f64>| {
            (0..self.actual.len()).map(|i| (i as f64, f(i).unwrap_or(f64::NAN))).collect::<Vec<_>>()
        };
        let band = |k: usize| pts(&|i| self.bands[i].map(|b| b[k]));
        let lines = [
            Line {
                label: "observed",
                color: "black",
                dashed: false,
                points: pts(&|i| self.actual[i]),
            },
            Line {
                label: "forecast",
                color: "#1f77b4",
                dashed: false,
                points: band(0),
            },
            Line {
                label: "80% band",
                color: "#ff7f0e",
                dashed: true,
                points: band(1),
            },
            Line {
                label: "",
                color: "#ff7f0e",
                dashed: true,
                points: band(2),
            },
            Line {
                label: "95% band",
                color: "#d62728",
                dashed: true,
                points: band(3),
            },
            Line {
                label: "",
                color: "#d62728",
                dashed: true,
                points: band(4),
            },
        ];
        let end = self.start.add_months(self.actual.len() as i64 - 1);
        line_chart(title, &lines, (&self.start.to_string(), &end.to_string()))
    }
}

pub fn search(run: &Run, a: &SearchArgs) -> Result<()> {
    let (series, input) = load_source(&a.source)?;
    let splits = make_splits(&series, &a.split)?;
    let budget = match a.budget_secs {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(Error::InvalidArgument(format!("budget must be a nonnegative number of seconds, got {s}")))
        }
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let config = SearchConfig {
        fit: fit_config(&a.optim),
        shortlist_size: a.shortlist,
        jobs: a.run.jobs,
        budget,
    };
    log::info!("searching {} cells", a.space.len());
    let board = grid_search(&splits, &a.space, &config)?;
    let selection = select_final(&board)?;
    let chosen = board
        .entries
        .iter()
        .find(|e| e.order == selection.order)
        .expect("selection comes from the shortlist");

    let fmt = run.fmt();
    let mut out = OutputDir::create(&a.output.out)?;
    write_series(&mut out, &series, a.output.svg)?;
    out.write_with("leaderboard.csv", |buf| board.write_csv(buf, fmt))?;
    out.write_with("shortlist.csv", |buf| board.write_shortlist_csv(buf, fmt))?;
    out.write_with("test_performance.csv", |buf| board.write_test_csv(buf, fmt))?;
    out.write_with("failures.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["p", "d", "q", "P", "D", "Q", "kind", "message"])?;
        for f in &board.failures {
            let o = f.order;
            let mut row: Vec<String> = [o.p, o.d, o.q, o.sp, o.sd, o.sq].iter().map(|v| v.to_string()).collect();
            row.extend([f.kind.clone(), f.message.clone()]);
            w.write_record(&row)?;
        }
        w.flush()
    })?;
    out.write_json("leaderboard.json", &board)?;
    out.write_json(
        "selection.json",
        &serde_json::json!({
            "order": selection.order,
            "order_flag": order_flag(&selection.order),
            "ranking": selection.ranking,
            "rationale": selection.rationale,
            "training": Window::of(&splits.training),
            "fit": chosen.fit,
            "test": chosen.test,
            "in_sample": chosen.in_sample,
        }),
    )?;
    if board.partial {
        log::warn!(
            "budget exhausted: {} of {} cells evaluated",
            board.evaluated_cells,
            board.total_cells
        );
    }
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "selected {} ({} ranked, {} failed)", selection.order, board.entries.len(), board.failures.len());
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}

fn order_flag(o: &ModelOrder) -> String {
    format!("{},{},{},{},{},{},{}", o.p, o.d, o.q, o.sp, o.sd, o.sq, o.period)
}

fn fit_training(order: &ModelOrder, training: &TimeSeries, optim: &OptimArgs) -> Result<FitResult> {
    let fitted = fit(order, training, &fit_config(optim))?;
    if !fitted.converged {
        log::warn!("{order} did not converge in {} iterations", fitted.iterations);
    }
    Ok(fitted)
}

fn write_fit(out: &mut OutputDir, fitted: &FitResult, training: &TimeSeries, fmt: impl Fn(f64) -> String) -> Result<()> {
    let coefs = coefficients(fitted);
    out.write_json(
        "fit.json",
        &serde_json::json!({
            "order": fitted.order,
            "order_flag": order_flag(&fitted.order),
            "training": Window::of(training),
            "coefficients": coefs,
            "fit": fitted,
        }),
    )?;
    out.write_with("coefficients.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["name", "estimate", "std_error", "z"])?;
        for c in &coefs {
            w.write_record([
                c.name.clone(),
                fmt(c.estimate),
                c.std_error.map(&fmt).unwrap_or_default(),
                c.z.map(&fmt).unwrap_or_default(),
            ])?;
        }
        w.flush()
    })
}

pub fn fit_cmd(run: &Run, a: &FitArgs) -> Result<()> {
    let (series, input) = load_source(&a.source)?;
    let splits = make_splits(&series, &a.split)?;
    let training = &splits.training;
    let fitted = fit_training(&a.model.order.0, training, &a.optim)?;
    let levels = fitted.fitted_levels(training)?;

    let fmt = run.fmt();
    let mut out = OutputDir::create(&a.output.out)?;
    write_series(&mut out, &series, a.output.svg)?;
    write_fit(&mut out, &fitted, training, fmt)?;
    out.write_with("fit_overlay.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["date", "actual", "fitted"])?;
        let skip = fitted.order.diff_loss();
        for (i, (m, v)) in training.iter().enumerate() {
            let f = i.checked_sub(skip).map(|j| fmt(levels.values()[j])).unwrap_or_default();
            w.write_record([m.to_string(), fmt(v), f])?;
        }
        w.flush()
    })?;
    if a.output.svg {
        let skip = fitted.order.diff_loss();
        let chart = line_chart(
            &format!("In-sample fit {}", fitted.order),
            &[
                Line {
                    label: "observed",
                    color: "black",
                    dashed: false,
                    points: training.values().iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
                },
                Line {
                    label: "fitted",
                    color: "#1f77b4",
                    dashed: true,
                    points: levels.values().iter().enumerate().map(|(i, v)| ((i + skip) as f64, *v)).collect(),
                },
            ],
            (&training.start().to_string(), &training.end().to_string()),
        );
        out.write("fit_overlay.svg", chart.as_bytes())?;
    }
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}: loglik {} aic {} sigma2 {}",
        fitted.order,
        fmt(fitted.loglik),
        fmt(fitted.aic),
        fmt(fitted.sigma2)
    );
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}

pub fn diagnose(run: &Run, a: &DiagnoseArgs) -> Result<()> {
    let (series, input) = load_source(&a.source)?;
    let splits = make_splits(&series, &a.split)?;
    let training = &splits.training;
    let fitted = fit_training(&a.model.order.0, training, &a.optim)?;
    let config = ReportConfig {
        alpha: a.alpha,
        lags: a.lags,
        fitdf: a.fitdf,
        adf_regression: a.adf_regression,
        adf_lags: a.adf_lags,
        ks_method: a.ks_method,
    };
    let report = residual_report(&fitted, training, &config)?;
    let inn = fitted.innovations(training)?;
    let standardized = inn.standardized();
    let max_lag = a.max_lag.min(inn.residuals.len().saturating_sub(1));
    let r = acf(&inn.residuals, max_lag)?;
    let phi = pacf(&inn.residuals, max_lag)?;
    let bound = 1.959963985 / (inn.residuals.len() as f64).sqrt();

    let fmt = run.fmt();
    let mut out = OutputDir::create(&a.output.out)?;
    write_series(&mut out, &series, a.output.svg)?;
    write_fit(&mut out, &fitted, training, fmt)?;
    out.write_json(
        "residual_report.json",
        &serde_json::json!({ "order": fitted.order, "config": config, "report": report }),
    )?;
    let first = training.month_at(fitted.order.diff_loss());
    out.write_with("residuals.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["date", "residual", "standardized"])?;
        for (i, (e, z)) in inn.residuals.iter().zip(&standardized).enumerate() {
            w.write_record([first.add_months(i as i64).to_string(), fmt(*e), fmt(*z)])?;
        }
        w.flush()
    })?;
    out.write_with("acf_pacf.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["lag", "acf", "pacf", "bound95"])?;
        for lag in 1..=max_lag {
            w.write_record([lag.to_string(), fmt(r[lag]), fmt(phi[lag - 1]), fmt(bound)])?;
        }
        w.flush()
    })?;
    if a.output.svg {
        let lags = |v: &[f64], off: usize| (1..=max_lag).map(|l| (l as f64, v[l - off])).collect::<Vec<_>>();
        let flat = |y: f64| vec![(1.0, y), (max_lag as f64, y)];
        let chart = line_chart(
            "Residual ACF and PACF",
            &[
                Line { label: "acf", color: "black", dashed: false, points: lags(&r, 0) },
                Line { label: "pacf", color: "#1f77b4", dashed: false, points: lags(&phi, 1) },
                Line { label: "±1.96/√n", color: "#d62728", dashed: true, points: flat(bound) },
                Line { label: "", color: "#d62728", dashed: true, points: flat(-bound) },
            ],
            ("1", &max_lag.to_string()),
        );
        out.write("acf_pacf.svg", chart.as_bytes())?;
        let chart = line_chart(
            "Residuals",
            &[Line {
                label: "residual",
                color: "black",
                dashed: false,
                points: inn.residuals.iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
            }],
            (&first.to_string(), &training.end().to_string()),
        );
        out.write("residuals.svg", chart.as_bytes())?;
    }
    let mut stdout = std::io::stdout().lock();
    for t in [&report.zero_mean, &report.adf, &report.box_pierce, &report.ljung_box, &report.ks_normality] {
        let _ = writeln!(stdout, "{:<14} statistic {:>12}  p {}", t.test, fmt(t.statistic), fmt(t.p_value));
    }
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}

pub fn forecast_cmd(run: &Run, a: &ForecastArgs) -> Result<()> {
    let (series, input) = load_source(&a.source)?;
    let splits = make_splits(&series, &a.split)?;
    let training = &splits.training;
    let fitted = fit_training(&a.model.order.0, training, &a.optim)?;
    let after = series.len() - training.len();
    let h = a.h.unwrap_or(if after > 0 { after } else { 12 });
    let fc = forecast(&fitted, training, h)?;

    let fmt = run.fmt();
    let mut out = OutputDir::create(&a.output.out)?;
    write_series(&mut out, &series, a.output.svg)?;
    write_fit(&mut out, &fitted, training, fmt)?;
    out.write_with("forecast.csv", |buf| fc.write_csv(buf, fmt))?;
    let table = BandTable::new(&series, &fc);
    out.write_with("forecast_bands.csv", |buf| table.write_csv(buf, fmt))?;
    if a.output.svg {
        out.write("forecast_bands.svg", table.svg(&format!("Forecast {}", fitted.order)).as_bytes())?;
    }

    let overlap = h.min(after);
    if overlap > 0 {
        let actual = &series.values()[training.len()..training.len() + overlap];
        match accuracy(actual, &fc.mean[..overlap]) {
            Ok(acc) => out.write_json(
                "accuracy.json",
                &serde_json::json!({
                    "window": { "start": fc.start, "end": fc.month_at(overlap - 1), "observations": overlap },
                    "accuracy": acc,
                }),
            )?,
            Err(e) => log::warn!("accuracy skipped: {e}"),
        }
    }
    if let Some(trials) = a.coverage_trials {
        let cov = empirical_coverage(&fitted.order, &fitted.params, h, trials, a.run.seed)?;
        out.write_json("coverage.json", &cov)?;
    }
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}

/// Forecast restricted to `[from, to]`.
fn slice_forecast(fc: &Forecast, from: MonthStamp, to: MonthStamp) -> Result<Forecast> {
    if from < fc.start || to > fc.end() || to < from {
        return Err(Error::RangeMismatch(format!(
            "window {from}..{to} is not inside the projection {}..{}",
            fc.start,
            fc.end()
        )));
    }
    let i = fc.start.months_until(from) as usize;
    let j = fc.start.months_until(to) as usize + 1;
    Ok(Forecast {
        start: from,
        mean: fc.mean[i..j].to_vec(),
        se: fc.se[i..j].to_vec(),
        lo80: fc.lo80[i..j].to_vec(),
        hi80: fc.hi80[i..j].to_vec(),
        lo95: fc.lo95[i..j].to_vec(),
        hi95: fc.hi95[i..j].to_vec(),
    })
}

pub fn impact_cmd(run: &Run, a: &ImpactArgs) -> Result<()> {
    let (series, input) = load_source(&a.source)?;
    let fmt = run.fmt();
    let mut out = OutputDir::create(&a.output.out)?;

    let (projection, default_from) = if let Some(path) = &a.forecast {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let fc = Forecast::read_csv(std::io::BufReader::new(file))?;
        let start = fc.start;
        (fc, start)
    } else {
        let order = a.order.expect("clap requires --order without --forecast").0;
        let splits = make_splits(&series, &a.split)?;
        let training = &splits.training;
        let h = series.len() - training.len();
        if h == 0 {
            return Err(Error::OutOfRange(format!("no observations after training end {}", training.end())));
        }
        let fitted = fit_training(&order, training, &a.optim)?;
        let fc = forecast(&fitted, training, h)?;
        write_fit(&mut out, &fitted, training, fmt)?;
        out.write_with("forecast.csv", |buf| fc.write_csv(buf, fmt))?;
        let from = match &splits.comparison {
            Some(c) => c.start(),
            None => {
                log::info!("no months after the test window; comparing over the test window");
                fc.start
            }
        };
        (fc, from)
    };
    let from = a.window_from.unwrap_or(default_from);
    let to = a.window_to.unwrap_or(projection.end().min(series.end()));
    let projection = slice_forecast(&projection, from, to)?;
    let observed = series.window(from, to)?;
    let report = impact(&observed, &projection)?;
    let summary: ImpactSummary = impact_summary_table(&report)?;
    let means: &ImpactMeans = &report.means;

    write_series(&mut out, &series, a.output.svg)?;
    out.write_with("impact.csv", |buf| report.write_csv(buf, fmt))?;
    out.write_with("impact_summary.csv", |buf| summary.write_csv(buf, fmt))?;
    out.write_json("impact_summary.json", &serde_json::json!({ "summary": summary, "means": means }))?;
    let table = BandTable::new(&series.window(series.start(), to)?, &projection);
    out.write_with("comparison_overlay.csv", |buf| table.write_csv(buf, fmt))?;
    if a.output.svg {
        out.write("comparison_overlay.svg", table.svg("Observed against projection").as_bytes())?;
    }
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "impact {}..{}", summary.start, summary.end);
    for r in &summary.rows {
        let _ = writeln!(stdout, "{:<9} {:>14} {:>10}%", r.estimate, fmt(r.mean_nominal), fmt(r.mean_percent));
    }
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}

pub fn fetch(run: &Run, a: &FetchArgs) -> Result<()> {
    let (series, input) = load_source(&a.source)?;
    let mut out = OutputDir::create(&a.output.out)?;
    write_series(&mut out, &series, a.output.svg)?;
    let _ = writeln!(std::io::stdout().lock(), "{} observations {}..{}", series.len(), series.start(), series.end());
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}

pub fn simulate_cmd(run: &Run, a: &SimulateArgs) -> Result<()> {
    let order = a.model.order.0;
    let params = ParamVector {
        ar: a.ar.0.clone(),
        ma: a.ma.0.clone(),
        sar: a.sar.0.clone(),
        sma: a.sma.0.clone(),
        sigma2: a.sigma2,
    };
    params.check(&order)?;
    let drawn = simulate(&order, &params, a.n, a.run.seed, a.burn_in)?;
    let series = TimeSeries::new(a.start, drawn.into_values().into_iter().map(|v| v + a.level).collect())?;
    let mut out = OutputDir::create(&a.output.out)?;
    write_series(&mut out, &series, a.output.svg)?;
    let mut canonical = Vec::new();
    write_csv(&series, &mut canonical).map_err(|e| Error::io("<memory>", e))?;
    let input = InputFingerprint {
        source: "simulated".into(),
        sha256: sha256_hex(&canonical),
        first: series.start().to_string(),
        last: series.end().to_string(),
        observations: series.len(),
    };
    out.finish(run.manifest(Some(input)))?;
    Ok(())
}
