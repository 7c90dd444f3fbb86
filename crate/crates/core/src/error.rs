use std::path::PathBuf;

use crate::series::MonthStamp;

/// Errors raised anywhere in the toolkit.
///
/// Variants are grouped by the exit-code family the CLI maps them to, see
/// [`Error::category`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    // -- series / shapes --------------------------------------------------
    #[error("series too short: need more than {required} observations, got {actual}")]
    LengthTooShort { required: usize, actual: usize },
    #[error("expected {expected} initial values, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("range out of bounds: {0}")]
    OutOfRange(String),
    #[error("invalid month stamp {year}-{month:02}")]
    InvalidMonth { year: i32, month: u32 },
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("series must contain at least one observation")]
    EmptySeries,
    #[error("parameter shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    // -- numerical --------------------------------------------------------
    #[error("autoregressive parameters are not stationary")]
    NonStationaryParams,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("likelihood was non-finite at every starting point")]
    NonFiniteLikelihood,
    #[error("fit did not converge")]
    NotConverged,
    #[error("forecast horizon must be at least one step")]
    HorizonZero,
    #[error("degenerate sample size: n = {n} must exceed k + 1 = {}", k + 1)]
    DegenerateSampleSize { n: usize, k: usize },
    #[error("regressors are collinear")]
    CollinearRegressors,
    #[error("lag {lag} too large for a series of length {len}")]
    LagTooLarge { lag: usize, len: usize },
    #[error("autocorrelation Toeplitz system is singular")]
    SingularToeplitz,
    #[error("degrees of freedom must be positive (lags {lags}, fitdf {fitdf})")]
    DegreesOfFreedomNonPositive { lags: usize, fitdf: usize },
    #[error("series has zero variance")]
    ZeroVariance,

    // -- metrics / search / impact ---------------------------------------
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("MAPE undefined: actual value at index {0} is zero")]
    ZeroActualForMape(usize),
    #[error("search space is empty")]
    EmptySearchSpace,
    #[error("every cell of the search space failed to fit")]
    AllCellsFailed,
    #[error("shortlist is empty")]
    EmptyShortlist,
    #[error("observed and projected ranges differ: {0}")]
    RangeMismatch(String),
    #[error("projection is zero at {0}; percentage difference undefined")]
    ZeroProjection(MonthStamp),
    #[error("impact report is empty")]
    EmptyReport,

    // -- ingestion --------------------------------------------------------
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("calendar gap: month {0} is missing")]
    GapInCalendar(MonthStamp),
    #[error("duplicate month {0}")]
    DuplicateMonth(MonthStamp),
    #[error("network error (status {status}): {message}")]
    Network { status: u16, message: String },
    #[error("unexpected payload schema: {0}")]
    Schema(String),
    #[error("cache entry is corrupt: {0}")]
    CacheCorrupt(String),
    #[error("configuration error: {0}")]
    Config(String),
}

/// Coarse failure family, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            InvalidArgument(_) | Config(_) | HorizonZero | ShapeMismatch(_) | EmptySearchSpace => {
                ErrorCategory::Usage
            }
            NonStationaryParams
            | NumericalFailure(_)
            | NonFiniteLikelihood
            | NotConverged
            | DegenerateSampleSize { .. }
            | CollinearRegressors
            | SingularToeplitz
            | ZeroVariance
            | AllCellsFailed => ErrorCategory::Numerical,
            _ => ErrorCategory::Data,
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            LengthTooShort { .. } => "LengthTooShort",
            ArityMismatch { .. } => "ArityMismatch",
            OutOfRange(_) => "OutOfRange",
            InvalidMonth { .. } => "InvalidMonth",
            NonFinite(_) => "NonFinite",
            EmptySeries => "EmptySeries",
            ShapeMismatch(_) => "ShapeMismatch",
            InvalidArgument(_) => "InvalidArgument",
            NonStationaryParams => "NonStationaryParams",
            NumericalFailure(_) => "NumericalFailure",
            InsufficientData(_) => "InsufficientData",
            NonFiniteLikelihood => "NonFiniteLikelihood",
            NotConverged => "NotConverged",
            HorizonZero => "HorizonZero",
            DegenerateSampleSize { .. } => "DegenerateSampleSize",
            CollinearRegressors => "CollinearRegressors",
            LagTooLarge { .. } => "LagTooLarge",
            SingularToeplitz => "SingularToeplitz",
            DegreesOfFreedomNonPositive { .. } => "DegreesOfFreedomNonPositive",
            ZeroVariance => "ZeroVariance",
            LengthMismatch { .. } => "LengthMismatch",
            ZeroActualForMape(_) => "ZeroActualForMape",
            EmptySearchSpace => "EmptySearchSpace",
            AllCellsFailed => "AllCellsFailed",
            EmptyShortlist => "EmptyShortlist",
            RangeMismatch(_) => "RangeMismatch",
            ZeroProjection(_) => "ZeroProjection",
            EmptyReport => "EmptyReport",
            Io { .. } => "Io",
            Parse { .. } => "ParseError",
            GapInCalendar(_) => "GapInCalendar",
            DuplicateMonth(_) => "DuplicateMonth",
            Network { .. } => "Network",
            Schema(_) => "SchemaError",
            CacheCorrupt(_) => "CacheCorrupt",
            Config(_) => "ConfigError",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
