use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::diff::integrate_values;
use super::{ArimaError, ArimaOrder, ArimaParams, Result};
use crate::ingest::TimeSeries;

const BURN_IN: usize = 100;

/// Draw a Gaussian ARIMA sample path of length `n`.
///
/// The ARMA recursion runs `100 + n` steps from its mean and the first 100
/// are discarded; the remainder is integrated `d` times from zero. The
/// intercept acts as `c` in the ARMA recursion for every `d`. Identical
/// arguments always produce identical paths.
pub fn simulate(
    order: ArimaOrder,
    params: &ArimaParams,
    sigma: f64,
    n: usize,
    seed: u64,
) -> Result<TimeSeries> {
    if params.ar.len() != order.p || params.ma.len() != order.q {
        return Err(ArimaError::InadmissibleParams(format!(
            "{} AR and {} MA coefficients do not match {order}",
            params.ar.len(),
            params.ma.len()
        )));
    }
    if n == 0 {
        return Err(ArimaError::InadmissibleParams("n must be at least 1".into()));
    }
    if !params.is_admissible() {
        return Err(ArimaError::InadmissibleParams(
            "AR or MA polynomial has a root on or inside the unit circle".into(),
        ));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(ArimaError::InadmissibleParams(format!("sigma = {sigma}")));
    }
    let normal = Normal::new(0.0, sigma)
        .map_err(|_| ArimaError::InadmissibleParams(format!("sigma = {sigma}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let total = BURN_IN + n;
    let mean = params.intercept / (1.0 - params.ar.iter().sum::<f64>());
    let (p, q) = (order.p, order.q);
    let mut w = vec![mean; total + p];
    let mut eps = vec![0.0; total + q];
    for t in 0..total {
        let e = normal.sample(&mut rng);
        eps[t + q] = e;
        let mut v = params.intercept + e;
        for (i, phi) in params.ar.iter().enumerate() {
            v += phi * w[t + p - 1 - i];
        }
        for (j, theta) in params.ma.iter().enumerate() {
            v += theta * eps[t + q - 1 - j];
        }
        w[t + p] = v;
    }
    let arma = &w[p + BURN_IN..];
    let values = if order.d == 0 {
        arma.to_vec()
    } else {
        integrate_values(arma, &vec![0.0; order.d], order.d)?
    };
    Ok(TimeSeries::new(
        crate::domain::YearMonth::new(2000, 1).expect("valid month"),
        values,
        format!("simulated {order}"),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::acf;

    #[test]
    fn noiseless_mean_model_is_constant() {
        let x = simulate(ArimaOrder::new(0, 0, 0), &ArimaParams::new(5.0, vec![], vec![]), 0.0, 30, 1)
            .unwrap();
        assert_eq!(x.values(), &[5.0; 30]);
    }

    #[test]
    fn deterministic_for_seed() {
        let o = ArimaOrder::new(1, 1, 1);
        let p = ArimaParams::new(0.0, vec![0.3], vec![0.2]);
        let a = simulate(o, &p, 1.0, 50, 99).unwrap();
        let b = simulate(o, &p, 1.0, 50, 99).unwrap();
        let c = simulate(o, &p, 1.0, 50, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 50);
    }

    #[test]
    fn ar1_lag_one_autocorrelation() {
        let x = simulate(ArimaOrder::new(1, 0, 0), &ArimaParams::new(0.0, vec![0.7], vec![]), 1.0, 5000, 8)
            .unwrap();
        let r = acf(&x, 1).unwrap().coefficients[1];
        assert!((0.65..=0.75).contains(&r), "{r}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let o = ArimaOrder::new(1, 0, 0);
        assert!(simulate(o, &ArimaParams::new(0.0, vec![1.1], vec![]), 1.0, 10, 0).is_err());
        assert!(simulate(o, &ArimaParams::new(0.0, vec![0.5], vec![]), -1.0, 10, 0).is_err());
        assert!(simulate(o, &ArimaParams::new(0.0, vec![0.5], vec![]), 1.0, 0, 0).is_err());
        assert!(simulate(o, &ArimaParams::new(0.0, vec![], vec![]), 1.0, 10, 0).is_err());
        assert!(simulate(ArimaOrder::new(0, 0, 1), &ArimaParams::new(0.0, vec![], vec![-1.0]), 1.0, 10, 0).is_err());
    }
}
