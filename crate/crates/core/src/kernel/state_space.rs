//! Harvey-form ARMA state space.
//!
//! ```text
//! α_{t+1} = T α_t + R ε_{t+1},   y_t = Z α_t
//! ```
//!
//! `T` carries the AR coefficients in its first column and ones on the
//! superdiagonal, `R = (1, θ₁, …, θ_{r-1})` and `Z = e₁`. The initial state
//! covariance is the stationary solution of `P = T P Tᵀ + R Rᵀ` (unit
//! innovation variance).

use super::poly::{is_stationary, ExpandedArma};
use crate::error::{Error, Result};
use crate::linalg::{solve, Mat};

#[derive(Debug, Clone)]
pub struct StateSpace {
    dim: usize,
    /// First column of `T`, zero padded to `dim`.
    phi: Vec<f64>,
    /// `R`, starting with the implicit `θ₀ = 1`, zero padded to `dim`.
    theta: Vec<f64>,
    /// Row-major `dim × dim` stationary covariance.
    init_cov: Vec<f64>,
}

impl StateSpace {
    pub fn new(arma: &ExpandedArma) -> Result<Self> {
        if !is_stationary(&arma.ar) {
            return Err(Error::NonStationaryParams);
        }
        let dim = arma.ar.len().max(arma.ma.len() + 1);
        let mut phi = arma.ar.clone();
        phi.resize(dim, 0.0);
        let mut theta = Vec::with_capacity(dim);
        theta.push(1.0);
        theta.extend_from_slice(&arma.ma);
        theta.resize(dim, 0.0);
        let init_cov = stationary_covariance(&phi, &theta, arma.ar.len(), arma.ma.len())?;
        Ok(Self {
            dim,
            phi,
            theta,
            init_cov,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub(crate) fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub(crate) fn init_cov_slice(&self) -> &[f64] {
        &self.init_cov
    }

    pub fn transition(&self) -> Mat {
        let mut t = Mat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            t[(i, 0)] = self.phi[i];
            if i + 1 < self.dim {
                t[(i, i + 1)] = 1.0;
            }
        }
        t
    }

    pub fn selection(&self) -> Vec<f64> {
        self.theta.clone()
    }

    pub fn observation(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.dim];
        z[0] = 1.0;
        z
    }

    pub fn state_cov_init(&self) -> Mat {
        Mat::from_rows(self.dim, self.dim, self.init_cov.clone())
    }
}

/// Solves the stationary Lyapunov equation using the ARMA autocovariances.
///
/// The first row of `P` is `cov(y_t, α_t[k])`, which the autocovariances and
/// ψ-weights give in closed form; the remaining entries follow from the
/// entrywise form of `P = T P Tᵀ + R Rᵀ`, filled from the bottom-right corner.
fn stationary_covariance(phi: &[f64], theta: &[f64], p: usize, q: usize) -> Result<Vec<f64>> {
    let r = phi.len();
    let psi = {
        let mut psi = vec![0.0; r];
        psi[0] = 1.0;
        for j in 1..r {
            let mut v = if j <= q { theta[j] } else { 0.0 };
            for i in 1..=j.min(p) {
                v += phi[i - 1] * psi[j - i];
            }
            psi[j] = v;
        }
        psi
    };
    // Σ_{j=k}^{q} θ_j ψ_{j-k}
    let ma_cross = |k: usize| -> f64 { (k..=q).map(|j| theta[j] * psi[j - k]).sum() };

    let mut gamma = vec![0.0; r + 1];
    if p == 0 {
        for (k, g) in gamma.iter_mut().enumerate().take(q + 1) {
            *g = ma_cross(k);
        }
    } else {
        let mut a = Mat::zeros(p + 1, p + 1);
        let mut b = vec![0.0; p + 1];
        for k in 0..=p {
            a[(k, k)] += 1.0;
            for i in 1..=p {
                a[(k, k.abs_diff(i))] -= phi[i - 1];
            }
            b[k] = if k <= q { ma_cross(k) } else { 0.0 };
        }
        let sol = solve(&a, &b).ok_or(Error::NonStationaryParams)?;
        gamma[..=p].copy_from_slice(&sol);
        for k in p + 1..=r {
            let mut v = if k <= q { ma_cross(k) } else { 0.0 };
            for i in 1..=p {
                v += phi[i - 1] * gamma[k - i];
            }
            gamma[k] = v;
        }
    }
    if !(gamma[0] > 0.0) || gamma.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonStationaryParams);
    }

    let mut cov = vec![0.0; r * r];
    cov[0] = gamma[0];
    for k in 1..r {
        let mut v = 0.0;
        for j in k + 1..=r.min(p) {
            v += phi[j - 1] * gamma[j - k];
        }
        for j in k..r.min(q + 1) {
            v += theta[j] * psi[j - k];
        }
        cov[k] = v;
        cov[k * r] = v;
    }
    let at = |cov: &[f64], i: usize, k: usize| if i < r && k < r { cov[i * r + k] } else { 0.0 };
    let phi_at = |i: usize| if i < r { phi[i] } else { 0.0 };
    for i in (1..r).rev() {
        for k in (i..r).rev() {
            let v = phi_at(i) * phi_at(k) * cov[0]
                + phi_at(i) * at(&cov, 0, k + 1)
                + phi_at(k) * at(&cov, i + 1, 0)
                + at(&cov, i + 1, k + 1)
                + theta[i] * theta[k];
            cov[i * r + k] = v;
            cov[k * r + i] = v;
        }
    }
    Ok(cov)
}

/// Solves `P = T P Tᵀ + Q` by the doubling iteration.
///
/// Returns `None` when the iteration fails to settle, which happens when `T`
/// has an eigenvalue on or outside the unit circle.
pub fn solve_lyapunov_doubling(t: &Mat, q: &Mat) -> Option<Mat> {
    let mut a = t.clone();
    let mut p = q.clone();
    for _ in 0..100 {
        let next = p.add(&a.matmul(&p).matmul(&a.transpose()));
        let delta = next
            .as_slice()
            .iter()
            .zip(p.as_slice())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        p = next;
        if !p.max_abs().is_finite() {
            return None;
        }
        if delta <= 1e-15 * p.max_abs() {
            return Some(p);
        }
        a = a.matmul(&a);
    }
    None
}
