//! Point-forecast accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub mse: f64,
    pub rmse: f64,
    /// Percent units.
    pub mape: f64,
}

/// MSE, RMSE and MAPE of `predicted` against `actual`.
pub fn accuracy(actual: &[f64], predicted: &[f64]) -> Result<AccuracyReport> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(i) = actual.iter().position(|&a| a == 0.0) {
        return Err(Error::ZeroActualForMape(i));
    }
    let n = actual.len() as f64;
    let mse = actual.iter().zip(predicted).map(|(a, p)| (a - p) * (a - p)).sum::<f64>() / n;
    let mape = 100.0 / n * actual.iter().zip(predicted).map(|(a, p)| (a - p).abs() / a.abs()).sum::<f64>();
    Ok(AccuracyReport {
        mse,
        rmse: mse.sqrt(),
        mape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        let r = accuracy(&[100.0, 200.0], &[110.0, 180.0]).unwrap();
        assert_eq!(r.mse, 250.0);
        assert_relative_eq!(r.rmse, 15.811_388_300_841_896, epsilon = 1e-12);
        assert_relative_eq!(r.mape, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn perfect_forecast() {
        let r = accuracy(&[3.0, -1.0, 7.5], &[3.0, -1.0, 7.5]).unwrap();
        assert_eq!((r.mse, r.rmse, r.mape), (0.0, 0.0, 0.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(accuracy(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { left: 1, right: 2 })));
        assert!(matches!(accuracy(&[1.0, 0.0], &[1.0, 2.0]), Err(Error::ZeroActualForMape(1))));
        assert!(matches!(accuracy(&[], &[]), Err(Error::EmptySeries)));
    }

    fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((prop_oneof![1.0f64..1e6, -1e6f64..-1.0], -1e6f64..1e6), 1..40)
    }

    proptest! {
        #[test]
        fn rmse_is_root_mse(v in pairs()) {
            let (a, p): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            let r = accuracy(&a, &p).unwrap();
            prop_assert_eq!(r.rmse, r.mse.sqrt());
        }

        #[test]
        fn permutation_symmetry(v in pairs(), seed in any::<u64>()) {
            let (a, p): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
            let mut shuffled = v.clone();
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let (sa, sp): (Vec<f64>, Vec<f64>) = shuffled.into_iter().unzip();
            let x = accuracy(&a, &p).unwrap();
            let y = accuracy(&sa, &sp).unwrap();
            prop_assert!((x.mse - y.mse).abs() <= 1e-9 * x.mse.max(1.0));
            prop_assert!((x.mape - y.mape).abs() <= 1e-9 * x.mape.max(1.0));
        }

        #[test]
        fn scaling(v in pairs(), c in 0.001f64..1000.0) {
            let (a, p): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
            let sa: Vec<f64> = a.iter().map(|x| x * c).collect();
            let sp: Vec<f64> = p.iter().map(|x| x * c).collect();
            let x = accuracy(&a, &p).unwrap();
            let y = accuracy(&sa, &sp).unwrap();
            prop_assert!((y.rmse - c * x.rmse).abs() <= 1e-9 * (c * x.rmse).max(1e-12));
            prop_assert!((y.mape - x.mape).abs() <= 1e-9 * x.mape.max(1.0));
        }

        #[test]
        fn sign_flip(v in pairs()) {
            let (a, p): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
            let na: Vec<f64> = a.iter().map(|x| -x).collect();
            let np: Vec<f64> = p.iter().map(|x| -x).collect();
            prop_assert_eq!(accuracy(&a, &p).unwrap().mape, accuracy(&na, &np).unwrap().mape);
        }
    }
}
