//! SARIMA model structure, lag-polynomial expansion, state-space form and
//! the exact Gaussian likelihood of the differenced series.
//!
//! Sign conventions follow the usual R/statsmodels layout:
//!
//! ```text
//! (1 - φ₁B - … - φ_pB^p)(1 - Φ₁B^s - … - Φ_PB^{sP}) w_t
//!     = (1 + θ₁B + … + θ_qB^q)(1 + Θ₁B^s + … + Θ_QB^{sQ}) ε_t
//! ```
//!
//! where `w_t = (1-B)^d (1-B^s)^D X_t`. No intercept is modelled.

mod kalman;
mod poly;
mod simulate;
mod state_space;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kalman::{concentrated_loglik, filter, innovations, loglik, FilterOutput, Innovations};
pub use poly::{ar_to_pacf, expand, is_stationary, pacf_to_ar, psi_from_polynomials, psi_weights, ExpandedArma};
pub use simulate::{simulate, simulate_arma};
pub use state_space::{solve_lyapunov_doubling, StateSpace};

/// `(p,d,q)(P,D,Q)_s` specification.
///
/// Seasonal orders are stored as `sp`, `sd`, `sq` and serialize as `P`, `D`, `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    #[serde(rename = "P")]
    pub sp: usize,
    #[serde(rename = "D")]
    pub sd: usize,
    #[serde(rename = "Q")]
    pub sq: usize,
    #[serde(rename = "s")]
    pub period: usize,
}

impl ModelOrder {
    pub fn new(p: usize, d: usize, q: usize, sp: usize, sd: usize, sq: usize, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidArgument("seasonal period must be at least 1".into()));
        }
        Ok(Self {
            p,
            d,
            q,
            sp,
            sd,
            sq,
            period,
        })
    }

    /// Non-seasonal ARIMA(p,d,q).
    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            sp: 0,
            sd: 0,
            sq: 0,
            period: 1,
        }
    }

    /// Number of ARMA coefficients `p + q + P + Q`.
    pub fn coef_count(&self) -> usize {
        self.p + self.q + self.sp + self.sq
    }

    /// Coefficients plus the innovation variance.
    pub fn param_count(&self) -> usize {
        self.coef_count() + 1
    }

    /// Observations consumed by differencing, `d + D·s`.
    pub fn diff_loss(&self) -> usize {
        self.d + self.sd * self.period
    }

    pub fn ar_degree(&self) -> usize {
        self.p + self.period * self.sp
    }

    pub fn ma_degree(&self) -> usize {
        self.q + self.period * self.sq
    }

    /// Dimension of the ARMA state vector.
    pub fn state_dim(&self) -> usize {
        self.ar_degree().max(self.ma_degree() + 1)
    }

    /// Coefficient labels in lag order, e.g. `ar1, ma1, sar1, sma1`.
    pub fn coef_names(&self) -> Vec<String> {
        let block = |prefix: &'static str, n: usize| (1..=n).map(move |i| format!("{prefix}{i}"));
        block("ar", self.p)
            .chain(block("ma", self.q))
            .chain(block("sar", self.sp))
            .chain(block("sma", self.sq))
            .collect()
    }
}

impl fmt::Display for ModelOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})({},{},{})[{}]",
            self.p, self.d, self.q, self.sp, self.sd, self.sq, self.period
        )
    }
}

impl FromStr for ModelOrder {
    type Err = Error;

    /// Parses `p,d,q,P,D,Q` with an optional trailing `,s` (default 12).
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad order {s:?}")))?;
        match parts[..] {
            [p, d, q, sp, sd, sq] => ModelOrder::new(p, d, q, sp, sd, sq, 12),
            [p, d, q, sp, sd, sq, period] => ModelOrder::new(p, d, q, sp, sd, sq, period),
            _ => Err(Error::InvalidArgument(format!(
                "order must be p,d,q,P,D,Q[,s], got {s:?}"
            ))),
        }
    }
}

/// Coefficient values for a [`ModelOrder`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sar: Vec<f64>,
    pub sma: Vec<f64>,
    pub sigma2: f64,
}

impl ParamVector {
    pub fn zeros(order: &ModelOrder, sigma2: f64) -> Self {
        Self {
            ar: vec![0.0; order.p],
            ma: vec![0.0; order.q],
            sar: vec![0.0; order.sp],
            sma: vec![0.0; order.sq],
            sigma2,
        }
    }

    /// Splits a flat `ar, ma, sar, sma` vector.
    pub fn from_coefficients(order: &ModelOrder, coefs: &[f64], sigma2: f64) -> Result<Self> {
        if coefs.len() != order.coef_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for order {order}, expected {}",
                coefs.len(),
                order.coef_count()
            )));
        }
        let (ar, rest) = coefs.split_at(order.p);
        let (ma, rest) = rest.split_at(order.q);
        let (sar, sma) = rest.split_at(order.sp);
        Ok(Self {
            ar: ar.to_vec(),
            ma: ma.to_vec(),
            sar: sar.to_vec(),
            sma: sma.to_vec(),
            sigma2,
        })
    }

    pub fn coefficients(&self) -> Vec<f64> {
        [&self.ar[..], &self.ma, &self.sar, &self.sma].concat()
    }

    pub fn check(&self, order: &ModelOrder) -> Result<()> {
        let shape = [
            ("ar", self.ar.len(), order.p),
            ("ma", self.ma.len(), order.q),
            ("sar", self.sar.len(), order.sp),
            ("sma", self.sma.len(), order.sq),
        ];
        for (name, got, want) in shape {
            if got != want {
                return Err(Error::ShapeMismatch(format!(
                    "{name} has {got} coefficients, order {order} needs {want}"
                )));
            }
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma2 must be >= 0, got {}", self.sigma2)));
        }
        if self.coefficients().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(())
    }

    /// Both AR blocks have all roots outside the unit circle.
    pub fn is_stationary(&self) -> bool {
        is_stationary(&self.ar) && is_stationary(&self.sar)
    }
}
