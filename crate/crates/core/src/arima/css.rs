use super::{poly, ArimaOrder, ArimaParams};
use crate::ingest::TimeSeries;

/// Objective value assigned to non-stationary or non-invertible candidates.
pub(crate) const PENALTY: f64 = 1e12;

/// One-step residuals `ε_t` for `t = p..n`, with pre-sample errors set to zero.
pub fn css_residuals(w: &[f64], params: &ArimaParams) -> Vec<f64> {
    let p = params.ar.len();
    let q = params.ma.len();
    let n = w.len();
    if n <= p {
        return Vec::new();
    }
    let mut eps = vec![0.0; n];
    for t in p..n {
        let mut e = w[t] - params.intercept;
        for (i, phi) in params.ar.iter().enumerate() {
            e -= phi * w[t - 1 - i];
        }
        for (j, theta) in params.ma.iter().enumerate().take(t.min(q)) {
            e -= theta * eps[t - 1 - j];
        }
        eps[t] = e;
    }
    eps.split_off(p)
}

pub(crate) fn sse_packed(w: &[f64], order: ArimaOrder, packed: &[f64]) -> f64 {
    let params = ArimaParams::unpack(order, packed);
    let ar_excess = poly::max_reflection(&params.ar);
    let neg_ma: Vec<f64> = params.ma.iter().map(|t| -t).collect();
    let ma_excess = poly::max_reflection(&neg_ma);
    let worst = ar_excess.max(ma_excess);
    if worst >= 1.0 {
        // grows with the distance past the boundary so the simplex is pushed back inside
        let outside: f64 = packed.iter().map(|v| v * v).sum::<f64>().sqrt();
        return PENALTY * (1.0 + (worst - 1.0).min(1e6) + outside.min(1e6));
    }
    css_residuals(w, &params).iter().map(|e| e * e).sum()
}

/// Conditional sum of squares for an already-differenced series.
///
/// `params` is packed as `[c, φ_1..φ_p, θ_1..θ_q]` when `order.d == 0`, and
/// without `c` otherwise. Inadmissible parameters return a large penalty.
pub fn css_objective(params: &[f64], series: &TimeSeries, order: ArimaOrder) -> f64 {
    assert_eq!(
        params.len(),
        order.param_len(),
        "parameter vector does not match {order}"
    );
    sse_packed(series.values(), order, params)
}
