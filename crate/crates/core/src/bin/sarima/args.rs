use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sarima_core::diagnostics::{AdfRegression, KsMethod};
use sarima_core::ingest::{Column, Decimal};
use sarima_core::search::SearchSpace;
use sarima_core::{ModelOrder, MonthStamp};

#[derive(Debug, Parser)]
#[command(
    name = "sarima",
    version,
    about = "Seasonal ARIMA search, diagnostics, forecasting and counterfactual impact for monthly series",
    args_override_self = true
)]
pub struct Cli {
    /// TOML file of flag values; top-level keys apply to every command that
    /// takes them, `[command]` tables to one command. Flags given on the
    /// command line win.
    #[arg(long, global = true, value_name = "FILE", display_order = 900)]
    pub config: Option<PathBuf>,

    /// Significant digits in CSV tables (0 = shortest exact form); JSON is
    /// always full precision.
    #[arg(long, global = true, default_value_t = 6, value_name = "N", display_order = 901)]
    pub precision: usize,

    /// More log output on stderr (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count, display_order = 902)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit every order in a grid, rank by test MSE and pick the final model.
    Search(SearchArgs),
    /// Fit one order on the training window.
    Fit(FitArgs),
    /// Residual tests, residual series and ACF/PACF of a fitted order.
    Diagnose(DiagnoseArgs),
    /// Interval forecast from the end of the training window.
    Forecast(ForecastArgs),
    /// Observed values against a counterfactual projection.
    Impact(ImpactArgs),
    /// Download (or load) a series and write it in canonical form.
    Fetch(FetchArgs),
    /// Draw a series from a SARIMA process with known coefficients.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Search(_) => "search",
            Command::Fit(_) => "fit",
            Command::Diagnose(_) => "diagnose",
            Command::Forecast(_) => "forecast",
            Command::Impact(_) => "impact",
            Command::Fetch(_) => "fetch",
            Command::Simulate(_) => "simulate",
        }
    }
}

/// Where the series comes from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Monthly series from a CSV file.
    #[arg(long, value_name = "PATH", conflicts_with = "sgs", required_unless_present = "sgs")]
    pub csv: Option<PathBuf>,

    /// Series code in the central bank's SGS API.
    #[arg(long, value_name = "CODE")]
    pub sgs: Option<u32>,

    /// Date column, by zero-based index or header name.
    #[arg(long, default_value = "0", value_name = "COL")]
    #[serde(serialize_with = "ser_column")]
    pub date_col: Column,

    /// Value column, by zero-based index or header name.
    #[arg(long, default_value = "1", value_name = "COL")]
    #[serde(serialize_with = "ser_column")]
    pub value_col: Column,

    /// CSV field delimiter.
    #[arg(long, default_value_t = ',', value_name = "CHAR")]
    pub delimiter: char,

    /// Decimal separator of CSV values.
    #[arg(long, default_value = "dot", value_parser = parse_decimal_flag, value_name = "dot|comma")]
    pub decimal: Decimal,

    /// Base URL of the SGS API.
    #[arg(long, default_value = sarima_core::ingest::DEFAULT_SGS_BASE_URL, value_name = "URL")]
    pub sgs_base_url: String,

    /// Directory for cached SGS downloads.
    #[arg(long, default_value = ".sarima-cache", value_name = "DIR")]
    pub cache_dir: PathBuf,

    /// First month of data to use (required with --sgs).
    #[arg(long, value_name = "YYYY-MM")]
    pub from: Option<MonthStamp>,

    /// Last month of data to use (required with --sgs).
    #[arg(long, value_name = "YYYY-MM")]
    pub to: Option<MonthStamp>,

    /// Ignore cached SGS downloads.
    #[arg(long)]
    pub refresh: bool,

    /// Multiply every value by this factor after loading.
    #[arg(long, default_value_t = 1.0, value_name = "X", allow_hyphen_values = true)]
    pub scale: f64,
}

fn ser_column<S: serde::Serializer>(c: &Column, s: S) -> Result<S::Ok, S::Error> {
    match c {
        Column::Index(i) => s.serialize_u64(*i as u64),
        Column::Name(n) => s.serialize_str(n),
    }
}

fn parse_decimal_flag(s: &str) -> Result<Decimal, String> {
    match s {
        "dot" | "." => Ok(Decimal::Dot),
        "comma" | "," => Ok(Decimal::Comma),
        _ => Err(format!("expected `dot` or `comma`, got `{s}`")),
    }
}

/// How the series is cut into training and test windows.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SplitArgs {
    /// Last training month [default: test-len months before the series end].
    #[arg(long, value_name = "YYYY-MM")]
    pub train_end: Option<MonthStamp>,

    /// Months in the test window right after training.
    #[arg(long, default_value_t = 12, value_name = "N")]
    pub test_len: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,

    /// Also render SVG line charts of the plot data.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 0, value_name = "N")]
    pub jobs: usize,

    /// Seed for every random draw.
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimArgs {
    /// Nelder-Mead iteration cap per start.
    #[arg(long, default_value_t = 2000, value_name = "N")]
    pub max_iter: usize,

    /// Relative tolerance on the simplex log-likelihood spread.
    #[arg(long, default_value_t = 1e-8, value_name = "X")]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub optim: OptimArgs,

    /// Order ranges overriding the default grid, e.g. `p=0..2,d=1,D=1,s=12`
    /// (default p,q,P,Q 0..5; d,D 0..1; s 12).
    #[arg(long, default_value = "", value_name = "SPEC", hide_default_value = true)]
    #[serde(serialize_with = "ser_display_space")]
    pub space: SearchSpace,

    /// Entries of the leaderboard that enter the final selection.
    #[arg(long, default_value_t = 10, value_name = "N")]
    pub shortlist: usize,

    /// Wall-clock budget; unstarted cells are skipped and the run is marked partial.
    #[arg(long, value_name = "SECS")]
    pub budget_secs: Option<f64>,
}

fn ser_display_space<S: serde::Serializer>(space: &SearchSpace, s: S) -> Result<S::Ok, S::Error> {
    let r = |o: &sarima_core::search::OrderRange| format!("{}..{}", o.min, o.max);
    s.serialize_str(&format!(
        "p={},d={},q={},P={},D={},Q={},s={}",
        r(&space.p),
        r(&space.d),
        r(&space.q),
        r(&space.sp),
        r(&space.sd),
        r(&space.sq),
        space.period
    ))
}

/// `p,d,q,P,D,Q[,s]`.
#[derive(Debug, Clone, Copy)]
pub struct OrderArg(pub ModelOrder);

impl FromStr for OrderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(OrderArg).map_err(|e: sarima_core::Error| e.to_string())
    }
}

impl Serialize for OrderArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let o = &self.0;
        s.serialize_str(&format!("{},{},{},{},{},{},{}", o.p, o.d, o.q, o.sp, o.sd, o.sq, o.period))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Model order as `p,d,q,P,D,Q[,s]` (s defaults to 12).
    #[arg(long, value_name = "ORDER")]
    pub order: OrderArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub optim: OptimArgs,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub optim: OptimArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    /// Significance level of the assumption checks.
    #[arg(long, default_value_t = 0.05, value_name = "X")]
    pub alpha: f64,

    /// Lags in the Box-Pierce and Ljung-Box statistics.
    #[arg(long, default_value_t = 24, value_name = "N")]
    pub lags: usize,

    /// Degrees of freedom removed from the portmanteau tests [default: p+q+P+Q].
    #[arg(long, value_name = "N")]
    pub fitdf: Option<usize>,

    /// Deterministic terms of the ADF regression.
    #[arg(long, default_value = "trend", value_name = "none|drift|trend")]
    #[serde(serialize_with = "ser_debug")]
    pub adf_regression: AdfRegression,

    /// Lagged differences in the ADF regression [default: trunc((n-1)^(1/3))].
    #[arg(long, value_name = "N")]
    pub adf_lags: Option<usize>,

    /// KS p-value form.
    #[arg(long, default_value = "asymptotic", value_name = "asymptotic|stephens")]
    #[serde(serialize_with = "ser_debug")]
    pub ks_method: KsMethod,

    /// Largest lag in acf_pacf.csv.
    #[arg(long, default_value_t = 36, value_name = "N")]
    pub max_lag: usize,
}

fn ser_debug<T: std::fmt::Debug, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:?}").to_lowercase())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub optim: OptimArgs,
    #[command(flatten)]
    pub model: ModelArgs,

    /// Forecast horizon [default: every month after training, or 12].
    #[arg(long, value_name = "N")]
    pub h: Option<usize>,

    /// Also simulate band coverage at the fitted coefficients with this many trials.
    #[arg(long, value_name = "N")]
    pub coverage_trials: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ImpactArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub optim: OptimArgs,

    /// Projection in the forecast.csv layout; observed data are taken over its months.
    #[arg(long, value_name = "FILE", conflicts_with = "order", required_unless_present = "order")]
    pub forecast: Option<PathBuf>,

    /// Fit this order (`p,d,q,P,D,Q[,s]`) on the training window and project from its end.
    #[arg(long, value_name = "ORDER")]
    pub order: Option<OrderArg>,

    /// First month compared [default: first month after the test window].
    #[arg(long, value_name = "YYYY-MM")]
    pub window_from: Option<MonthStamp>,

    /// Last month compared [default: last month of data].
    #[arg(long, value_name = "YYYY-MM")]
    pub window_to: Option<MonthStamp>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FetchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Comma-separated coefficients.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Coefs(pub Vec<f64>);

impl FromStr for Coefs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| format!("bad coefficient `{t}`")))
            .collect::<Result<_, _>>()
            .map(Coefs)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub run: RunArgs,

    /// Nonseasonal AR coefficients.
    #[arg(long, default_value = "", value_name = "LIST", hide_default_value = true, allow_hyphen_values = true)]
    pub ar: Coefs,

    /// Nonseasonal MA coefficients.
    #[arg(long, default_value = "", value_name = "LIST", hide_default_value = true, allow_hyphen_values = true)]
    pub ma: Coefs,

    /// Seasonal AR coefficients.
    #[arg(long, default_value = "", value_name = "LIST", hide_default_value = true, allow_hyphen_values = true)]
    pub sar: Coefs,

    /// Seasonal MA coefficients.
    #[arg(long, default_value = "", value_name = "LIST", hide_default_value = true, allow_hyphen_values = true)]
    pub sma: Coefs,

    /// Innovation variance.
    #[arg(long, default_value_t = 1.0, value_name = "X")]
    pub sigma2: f64,

    /// Number of observations.
    #[arg(long, default_value_t = 240, value_name = "N")]
    pub n: usize,

    /// Draws discarded before the kept sample.
    #[arg(long, default_value_t = 100, value_name = "N")]
    pub burn_in: usize,

    /// Month of the first observation.
    #[arg(long, default_value = "2000-01", value_name = "YYYY-MM")]
    pub start: MonthStamp,

    /// Constant added to every level.
    #[arg(long, default_value_t = 0.0, value_name = "X", allow_hyphen_values = true)]
    pub level: f64,
}
