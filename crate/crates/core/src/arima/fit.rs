use super::css::{css_residuals, sse_packed, PENALTY};
use super::diff::difference_values;
use super::{ArimaError, ArimaFit, ArimaOrder, ArimaParams, Result};
use crate::ingest::TimeSeries;
use crate::optim::{nelder_mead, NelderMeadConfig};

const PERTURBATION: f64 = 0.3;

/// Estimate an ARIMA model by conditional sum of squares.
///
/// The level series is differenced `order.d` times, then CSS is minimized
/// from five deterministic starts: all-zero coefficients, a Hannan–Rissanen
/// regression estimate, that estimate shifted by ±0.3, and zeros with
/// alternating ±0.3. Each start is pulled inside the admissible region before
/// the simplex search. The lowest admissible minimum wins, earliest start on ties.
pub fn fit(series: &TimeSeries, order: ArimaOrder) -> Result<ArimaFit> {
    let needed = order.min_observations();
    if series.len() < needed {
        return Err(ArimaError::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    let w = difference_values(series.values(), order.d)?;
    if is_constant(&w) {
        return Err(ArimaError::ZeroVariance);
    }

    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt();
    let objective = |x: &[f64]| sse_packed(&w, order, x);

    let best_packed = if order.p + order.q == 0 {
        // the CSS minimizer of a mean model is the sample mean
        if order.has_intercept() {
            vec![mean]
        } else {
            Vec::new()
        }
    } else {
        let mut steps = vec![0.1; order.param_len()];
        if order.has_intercept() {
            steps[0] = 0.1 * mean.abs().max(sd);
        }
        let config = NelderMeadConfig {
            max_iter: 3000 * order.param_len(),
            ..NelderMeadConfig::default()
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for start in starting_points(&w, order, mean) {
            let m = nelder_mead(objective, &start, &steps, &config);
            if m.f.is_finite() && m.f < PENALTY && best.as_ref().is_none_or(|(f, _)| m.f < *f) {
                best = Some((m.f, m.x));
            }
        }
        best.ok_or(ArimaError::OptimizerFailed)?.1
    };

    let params = ArimaParams::unpack(order, &best_packed);
    if !params.is_admissible() {
        return Err(ArimaError::OptimizerFailed);
    }
    let residuals = css_residuals(&w, &params);
    let n_effective = residuals.len();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = sse / n_effective as f64;
    let k = order.aic_param_count() as f64;
    let aic = n_effective as f64 * sigma2.max(f64::MIN_POSITIVE).ln() + 2.0 * k;

    Ok(ArimaFit {
        order,
        intercept: order.has_intercept().then_some(params.intercept),
        ar_coeffs: params.ar,
        ma_coeffs: params.ma,
        sigma2,
        residuals,
        aic,
        n_effective,
    })
}

fn is_constant(w: &[f64]) -> bool {
    let first = w[0];
    let scale = w.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    w.iter().all(|v| (v - first).abs() <= 1e-12 * scale)
}

/// Intercept consistent with the sample mean for the given AR coefficients.
fn intercept_for(mean: f64, ar: &[f64]) -> f64 {
    mean * (1.0 - ar.iter().sum::<f64>())
}

fn pack(order: ArimaOrder, mean: f64, ar: Vec<f64>, ma: Vec<f64>) -> Vec<f64> {
    let c = intercept_for(mean, &ar);
    ArimaParams::new(c, ar, ma).pack(order)
}

/// Shrink coefficients toward zero until admissible.
fn make_admissible(mut ar: Vec<f64>, mut ma: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    for _ in 0..200 {
        let probe = ArimaParams::new(0.0, ar.clone(), ma.clone());
        if probe.is_admissible() {
            break;
        }
        ar.iter_mut().for_each(|a| *a *= 0.9);
        ma.iter_mut().for_each(|a| *a *= 0.9);
    }
    (ar, ma)
}

fn starting_points(w: &[f64], order: ArimaOrder, mean: f64) -> Vec<Vec<f64>> {
    let (p, q) = (order.p, order.q);
    let (hr_ar, hr_ma) = hannan_rissanen(w, order).unwrap_or((vec![0.0; p], vec![0.0; q]));
    let shifted = |delta: f64| {
        (
            hr_ar.iter().map(|a| a + delta).collect::<Vec<_>>(),
            hr_ma.iter().map(|a| a + delta).collect::<Vec<_>>(),
        )
    };
    let alternating = |len: usize, offset: usize| -> Vec<f64> {
        (0..len)
            .map(|i| {
                if (i + offset).is_multiple_of(2) {
                    PERTURBATION
                } else {
                    -PERTURBATION
                }
            })
            .collect()
    };
    let candidates = [
        (vec![0.0; p], vec![0.0; q]),
        (hr_ar.clone(), hr_ma.clone()),
        shifted(PERTURBATION),
        shifted(-PERTURBATION),
        (alternating(p, 0), alternating(q, p)),
    ];
    candidates
        .into_iter()
        .map(|(ar, ma)| {
            let (ar, ma) = make_admissible(ar, ma);
            pack(order, mean, ar, ma)
        })
        .collect()
}

/// Two-stage regression estimate of ARMA coefficients: a long autoregression
/// supplies innovation estimates, which then enter a second regression as
/// lagged MA regressors. Pure AR orders reduce to ordinary least squares,
/// which is the exact CSS minimizer.
fn hannan_rissanen(w: &[f64], order: ArimaOrder) -> Option<(Vec<f64>, Vec<f64>)> {
    let (p, q) = (order.p, order.q);
    let intercept = order.has_intercept();
    let n = w.len();

    let innovations: Vec<f64> = if q == 0 {
        vec![0.0; n]
    } else {
        let m = (p.max(q) + 4).min(n / 3);
        if m == 0 {
            return None;
        }
        let rows: Vec<Vec<f64>> = (m..n)
            .map(|t| lagged_row(intercept, (1..=m).map(|i| w[t - i])))
            .collect();
        let y = &w[m..];
        let beta = ols(&rows, y)?;
        let mut e = vec![0.0; n];
        for (k, t) in (m..n).enumerate() {
            let fitted: f64 = rows[k].iter().zip(&beta).map(|(a, b)| a * b).sum();
            e[t] = w[t] - fitted;
        }
        e
    };

    let start = if q == 0 { p } else { (p.max(q) + 4).min(n / 3) + q };
    if n <= start + p + q + 2 {
        return None;
    }
    let rows: Vec<Vec<f64>> = (start..n)
        .map(|t| {
            lagged_row(
                intercept,
                (1..=p).map(|i| w[t - i]).chain((1..=q).map(|j| innovations[t - j])),
            )
        })
        .collect();
    let beta = ols(&rows, &w[start..])?;
    let off = usize::from(intercept);
    Some((beta[off..off + p].to_vec(), beta[off + p..].to_vec()))
}

fn lagged_row(intercept: bool, lags: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut row = Vec::new();
    if intercept {
        row.push(1.0);
    }
    row.extend(lags);
    row
}

/// Least squares via the normal equations and Gaussian elimination with
/// partial pivoting. `None` if the system is singular.
pub(crate) fn ols(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = rows.first()?.len();
    if k == 0 || rows.len() < k {
        return None;
    }
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * yi;
        }
    }
    let scale = (0..k).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut().take(k - col - 1) {
            let factor = row[col] / pivot_row[col];
            for (x, p) in row[col..=k].iter_mut().zip(&pivot_row[col..=k]) {
                *x -= factor * p;
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = ((i + 1)..k).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][k] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
