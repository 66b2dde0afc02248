use serde::{Deserialize, Serialize};

use super::diff::{difference_values, integrate_values};
use super::{poly, ArimaError, ArimaFit, Result};
use crate::domain::YearMonth;
use crate::stats::Z95;

/// Point forecasts with optional 95% bounds (empty for point-only models).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecast {
    pub point: Vec<f64>,
    pub lower_95: Vec<f64>,
    pub upper_95: Vec<f64>,
}

impl Forecast {
    pub fn point_only(point: Vec<f64>) -> Self {
        Self {
            point,
            lower_95: Vec::new(),
            upper_95: Vec::new(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.point.len()
    }

    pub fn has_intervals(&self) -> bool {
        self.lower_95.len() == self.point.len() && !self.point.is_empty()
    }

    pub fn interval_widths(&self) -> Vec<f64> {
        self.upper_95
            .iter()
            .zip(&self.lower_95)
            .map(|(u, l)| u - l)
            .collect()
    }

    /// `date,point,lower_95,upper_95`; interval cells are blank for point-only forecasts.
    pub fn to_csv(&self, first_month: YearMonth) -> String {
        let mut out = String::from("date,point,lower_95,upper_95\n");
        for (h, p) in self.point.iter().enumerate() {
            let month = first_month.add_months(h as i64);
            if self.has_intervals() {
                out.push_str(&format!(
                    "{month},{p:.6},{:.6},{:.6}\n",
                    self.lower_95[h], self.upper_95[h]
                ));
            } else {
                out.push_str(&format!("{month},{p:.6},,\n"));
            }
        }
        out
    }
}

/// Forecast `horizon` steps past the end of `last_levels`.
///
/// `last_levels` is the tail of the level series the model was fitted on and
/// must hold at least `d + p` values. Future innovations are zero; in-sample
/// innovations come from the fit's residuals. Intervals use the psi weights
/// of `θ(B) / (φ(B)(1 - B)^d)`.
pub fn forecast(fit: &ArimaFit, last_levels: &[f64], horizon: usize) -> Result<Forecast> {
    if horizon == 0 {
        return Err(ArimaError::InvalidHorizon);
    }
    let order = fit.order;
    let needed = order.d + order.p;
    if last_levels.len() < needed {
        return Err(ArimaError::InsufficientHistory {
            needed,
            got: last_levels.len(),
        });
    }
    let (p, q) = (order.p, order.q);
    let c = fit.intercept.unwrap_or(0.0);

    let w = if last_levels.len() > order.d {
        difference_values(last_levels, order.d)?
    } else {
        Vec::new()
    };
    let mut w_ext: Vec<f64> = w[w.len() - p..].to_vec();
    let mut eps_ext: Vec<f64> = {
        let r = &fit.residuals;
        let mut tail = vec![0.0; q.saturating_sub(r.len())];
        tail.extend_from_slice(&r[r.len().saturating_sub(q)..]);
        tail
    };

    let mut diffs = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut v = c;
        for (i, phi) in fit.ar_coeffs.iter().enumerate() {
            v += phi * w_ext[w_ext.len() - 1 - i];
        }
        for (j, theta) in fit.ma_coeffs.iter().enumerate() {
            v += theta * eps_ext[eps_ext.len() - 1 - j];
        }
        diffs.push(v);
        w_ext.push(v);
        eps_ext.push(0.0);
    }

    let seeds = &last_levels[last_levels.len() - order.d..];
    let point = integrate_values(&diffs, seeds, order.d)?;

    let full_ar = poly::integrated_ar(&fit.ar_coeffs, order.d);
    let psi = poly::psi_weights(&full_ar, &fit.ma_coeffs, horizon);
    let sigma = fit.sigma();
    let mut cum = 0.0;
    let mut lower_95 = Vec::with_capacity(horizon);
    let mut upper_95 = Vec::with_capacity(horizon);
    for (h, pt) in point.iter().enumerate() {
        cum += psi[h] * psi[h];
        let half = Z95 * sigma * cum.sqrt();
        lower_95.push(pt - half);
        upper_95.push(pt + half);
    }
    Ok(Forecast {
        point,
        lower_95,
        upper_95,
    })
}
