use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::poly::expand;
use super::{ModelOrder, ParamVector};
use crate::error::{Error, Result};
use crate::series::{extend_levels, MonthStamp, TimeSeries};

/// Draws `n` values of the differenced-scale ARMA after `burn_in` discarded steps.
pub fn simulate_arma(order: &ModelOrder, params: &ParamVector, n: usize, seed: u64, burn_in: usize) -> Result<Vec<f64>> {
    params.check(order)?;
    if !params.is_stationary() {
        return Err(Error::NonStationaryParams);
    }
    let arma = expand(order, params)?;
    let noise = Normal::new(0.0, params.sigma2.sqrt())
        .map_err(|e| Error::InvalidArgument(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + burn_in;
    let mut eps = Vec::with_capacity(total);
    let mut w: Vec<f64> = Vec::with_capacity(total);
    for t in 0..total {
        let e = noise.sample(&mut rng);
        let mut v = e;
        for (i, &phi) in arma.ar.iter().enumerate().take(t) {
            v += phi * w[t - 1 - i];
        }
        for (j, &theta) in arma.ma.iter().enumerate().take(t) {
            v += theta * eps[t - 1 - j];
        }
        eps.push(e);
        w.push(v);
    }
    Ok(w.split_off(burn_in))
}

/// Reproducible draw of `n` level observations from the SARIMA process.
///
/// The differenced-scale ARMA is integrated from zero initial values; the
/// series starts in January 2000.
pub fn simulate(order: &ModelOrder, params: &ParamVector, n: usize, seed: u64, burn_in: usize) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("simulation length must be at least 1".into()));
    }
    let w = simulate_arma(order, params, n, seed, burn_in)?;
    let zeros = vec![0.0; order.diff_loss()];
    let levels = extend_levels(&zeros, &w, order.d, order.sd, order.period)?;
    TimeSeries::new(MonthStamp::new(2000, 1)?, levels)
}
