use serde::{Deserialize, Serialize};

use super::{ModelOrder, ParamVector};
use crate::error::{Error, Result};

/// Product-polynomial coefficients of the multiplicative model.
///
/// `ar[k-1]` is the coefficient of `B^k` in `1 - Σ ar[k-1] B^k`, and `ma[k-1]`
/// the coefficient of `B^k` in `1 + Σ ma[k-1] B^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedArma {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

impl ExpandedArma {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>) -> Self {
        Self { ar, ma }
    }

    pub fn psi(&self, horizon: usize) -> Vec<f64> {
        psi_from_polynomials(&self.ar, &self.ma, horizon)
    }
}

/// Multiplies the non-seasonal and seasonal lag polynomials.
pub fn expand(order: &ModelOrder, params: &ParamVector) -> Result<ExpandedArma> {
    params.check(order)?;
    let s = order.period;
    let mut ar = vec![0.0; order.ar_degree()];
    for (i, &phi) in params.ar.iter().enumerate() {
        ar[i] += phi;
    }
    for (j, &big_phi) in params.sar.iter().enumerate() {
        let seasonal_lag = s * (j + 1);
        ar[seasonal_lag - 1] += big_phi;
        for (i, &phi) in params.ar.iter().enumerate() {
            ar[seasonal_lag + i] -= phi * big_phi;
        }
    }
    let mut ma = vec![0.0; order.ma_degree()];
    for (i, &theta) in params.ma.iter().enumerate() {
        ma[i] += theta;
    }
    for (j, &big_theta) in params.sma.iter().enumerate() {
        let seasonal_lag = s * (j + 1);
        ma[seasonal_lag - 1] += big_theta;
        for (i, &theta) in params.ma.iter().enumerate() {
            ma[seasonal_lag + i] += theta * big_theta;
        }
    }
    Ok(ExpandedArma { ar, ma })
}

/// `ψ₁..ψ_h` of `θ(B)/φ(B)` (with `ψ₀ = 1` implicit).
pub fn psi_from_polynomials(ar: &[f64], ma: &[f64], horizon: usize) -> Vec<f64> {
    let mut psi = vec![0.0; horizon + 1];
    psi[0] = 1.0;
    for j in 1..=horizon {
        let mut v = ma.get(j - 1).copied().unwrap_or(0.0);
        for (i, &phi) in ar.iter().enumerate().take(j) {
            v += phi * psi[j - 1 - i];
        }
        psi[j] = v;
    }
    psi.remove(0);
    psi
}

/// MA(∞) weights of the differenced-scale ARMA.
pub fn psi_weights(order: &ModelOrder, params: &ParamVector, horizon: usize) -> Result<Vec<f64>> {
    if !params.is_stationary() {
        return Err(Error::NonStationaryParams);
    }
    Ok(expand(order, params)?.psi(horizon))
}

/// Durbin-Levinson map from partial autocorrelations to AR coefficients.
///
/// Every `|r_k| < 1` yields a stationary polynomial.
pub fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(pacf.len());
    for (k, &r) in pacf.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi.push(r);
    }
    phi
}

/// Step-down recursion; `None` when the polynomial is not stationary.
pub fn ar_to_pacf(ar: &[f64]) -> Option<Vec<f64>> {
    let mut phi = ar.to_vec();
    let mut pacf = vec![0.0; ar.len()];
    for k in (0..ar.len()).rev() {
        let r = phi[k];
        if !(r.abs() < 1.0) {
            return None;
        }
        pacf[k] = r;
        let denom = 1.0 - r * r;
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = (prev[j] + r * prev[k - 1 - j]) / denom;
        }
        phi.truncate(k);
    }
    Some(pacf)
}

/// All roots of `1 - Σ φ_i z^i` lie outside the unit circle.
pub fn is_stationary(ar: &[f64]) -> bool {
    ar_to_pacf(ar).is_some()
}
