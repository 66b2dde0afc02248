//! ARIMA(p, d, q) built from first principles.
//!
//! The differenced series `w` follows
//!
//! ```text
//! w_t = c + φ_1 w_{t-1} + … + φ_p w_{t-p} + ε_t + θ_1 ε_{t-1} + … + θ_q ε_{t-q}
//! ```
//!
//! with the intercept `c` present only when `d = 0`. Coefficients are
//! estimated by conditional sum of squares, minimized with Nelder–Mead from
//! several deterministic starting points, and orders are chosen by AIC over an
//! exhaustive grid.

mod css;
mod diff;
mod fit;
mod forecast;
pub mod poly;
mod select;
mod simulate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use css::{css_objective, css_residuals};
pub use diff::{difference, difference_values, integrate, integrate_values};
pub use fit::fit;
pub use forecast::{forecast, Forecast};
pub use select::{select_order, select_order_detailed, Candidate, BOUNDARY_RADIUS};
pub use simulate::simulate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArimaError {
    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("series has zero variance after differencing")]
    ZeroVariance,
    #[error("optimizer failed: no starting point reached an admissible minimum")]
    OptimizerFailed,
    #[error("every candidate order failed to fit")]
    AllCandidatesFailed,
    #[error("expected {expected} seed values, got {got}")]
    SeedMismatch { expected: usize, got: usize },
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("need at least {needed} trailing levels to forecast, got {got}")]
    InsufficientHistory { needed: usize, got: usize },
    #[error("inadmissible parameters: {0}")]
    InadmissibleParams(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
}

impl From<crate::ingest::IngestError> for ArimaError {
    fn from(e: crate::ingest::IngestError) -> Self {
        ArimaError::InvalidSeries(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ArimaError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub const fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }

    /// Intercept is estimated only for undifferenced models.
    pub fn has_intercept(self) -> bool {
        self.d == 0
    }

    /// Length of the CSS parameter vector `[c?, φ…, θ…]`.
    pub fn param_len(self) -> usize {
        self.p + self.q + usize::from(self.has_intercept())
    }

    /// Parameter count for AIC: coefficients, intercept, and the innovation variance.
    pub fn aic_param_count(self) -> usize {
        self.param_len() + 1
    }

    /// Smallest series length `fit` accepts for this order.
    pub fn min_observations(self) -> usize {
        self.d + self.p.max(self.q) + 10
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)
    }
}

/// Inclusive upper bounds of the order-selection grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaBounds {
    pub p_max: usize,
    pub d_max: usize,
    pub q_max: usize,
}

impl Default for ArimaBounds {
    fn default() -> Self {
        Self {
            p_max: 3,
            d_max: 2,
            q_max: 3,
        }
    }
}

/// Model coefficients in natural form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaParams {
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

impl ArimaParams {
    pub fn new(intercept: f64, ar: Vec<f64>, ma: Vec<f64>) -> Self {
        Self { intercept, ar, ma }
    }

    /// Split a packed `[c?, φ…, θ…]` vector.
    pub fn unpack(order: ArimaOrder, packed: &[f64]) -> Self {
        let off = usize::from(order.has_intercept());
        Self {
            intercept: if off == 1 { packed[0] } else { 0.0 },
            ar: packed[off..off + order.p].to_vec(),
            ma: packed[off + order.p..off + order.p + order.q].to_vec(),
        }
    }

    pub fn pack(&self, order: ArimaOrder) -> Vec<f64> {
        let mut v = Vec::with_capacity(order.param_len());
        if order.has_intercept() {
            v.push(self.intercept);
        }
        v.extend_from_slice(&self.ar);
        v.extend_from_slice(&self.ma);
        v
    }

    /// Both polynomials have every root strictly outside the unit circle.
    pub fn is_admissible(&self) -> bool {
        poly::ar_is_stationary(&self.ar) && poly::ma_is_invertible(&self.ma)
    }
}

/// A fitted model with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaFit {
    pub order: ArimaOrder,
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    /// Present iff `d = 0`.
    pub intercept: Option<f64>,
    pub sigma2: f64,
    /// One-step residuals for differenced observations `p..`; the last entry
    /// belongs to the final observation.
    pub residuals: Vec<f64>,
    pub aic: f64,
    pub n_effective: usize,
}

impl ArimaFit {
    /// Assemble a model from known coefficients, e.g. to forecast without fitting.
    pub fn from_params(order: ArimaOrder, params: ArimaParams, sigma2: f64) -> Result<Self> {
        if params.ar.len() != order.p || params.ma.len() != order.q {
            return Err(ArimaError::InadmissibleParams(format!(
                "{} AR and {} MA coefficients do not match {order}",
                params.ar.len(),
                params.ma.len()
            )));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(ArimaError::InadmissibleParams(format!("sigma2 = {sigma2}")));
        }
        Ok(Self {
            order,
            intercept: order.has_intercept().then_some(params.intercept),
            ar_coeffs: params.ar,
            ma_coeffs: params.ma,
            sigma2,
            residuals: Vec::new(),
            aic: f64::NAN,
            n_effective: 0,
        })
    }

    pub fn params(&self) -> ArimaParams {
        ArimaParams {
            intercept: self.intercept.unwrap_or(0.0),
            ar: self.ar_coeffs.clone(),
            ma: self.ma_coeffs.clone(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn residual_mean(&self) -> f64 {
        if self.residuals.is_empty() {
            0.0
        } else {
            self.residuals.iter().sum::<f64>() / self.residuals.len() as f64
        }
    }
}
