//! Exponential-smoothing comparators and a rolling-origin backtest harness.
//!
//! Simple exponential smoothing (SES):
//!
//! ```text
//! ŷ_t = L_{t-1}
//! L_t = α y_t + (1 - α) L_{t-1}
//! ```
//!
//! Additive Holt–Winters with period `m = 12`:
//!
//! ```text
//! ŷ_t = L_{t-1} + T_{t-1} + S_{t-m}
//! L_t = α (y_t - S_{t-m}) + (1 - α)(L_{t-1} + T_{t-1})
//! T_t = β (L_t - L_{t-1}) + (1 - β) T_{t-1}
//! S_t = γ (y_t - L_t) + (1 - γ) S_{t-m}
//! ```

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arima::{self, ArimaBounds, ArimaError, ArimaOrder, Forecast};
use crate::ingest::TimeSeries;

pub const PERIOD: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("fold at origin {origin}: {source}")]
    Arima {
        origin: usize,
        #[source]
        source: ArimaError,
    },
}

pub type Result<T> = std::result::Result<T, BaselineError>;

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|v| *v == x[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SesModel {
    pub alpha: f64,
    pub level: f64,
    /// In-sample one-step squared error at `alpha`.
    pub sse: f64,
}

/// One-step SSE and final level of SES with the level started at `x[0]`.
pub fn ses_sse(x: &[f64], alpha: f64) -> (f64, f64) {
    let mut level = x[0];
    let mut sse = 0.0;
    for &y in &x[1..] {
        let e = y - level;
        sse += e * e;
        level += alpha * e;
    }
    (sse, level)
}

/// Pick `alpha` on the grid 0.01, 0.02, …, 0.99 by in-sample one-step SSE.
/// The smallest alpha wins ties.
pub fn ses_fit(series: &TimeSeries) -> Result<SesModel> {
    let x = series.values();
    if x.len() < 3 {
        return Err(BaselineError::SeriesTooShort {
            needed: 3,
            got: x.len(),
        });
    }
    if is_constant(x) {
        return Err(BaselineError::ZeroVariance);
    }
    let mut best: Option<SesModel> = None;
    for i in 1..=99 {
        let alpha = i as f64 / 100.0;
        let (sse, level) = ses_sse(x, alpha);
        if best.as_ref().is_none_or(|b| sse < b.sse) {
            best = Some(SesModel { alpha, level, sse });
        }
    }
    Ok(best.expect("grid is non-empty"))
}

impl SesModel {
    pub fn forecast(&self, horizon: usize) -> Result<Forecast> {
        if horizon == 0 {
            return Err(BaselineError::InvalidHorizon);
        }
        Ok(Forecast::point_only(vec![self.level; horizon]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoltWintersModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub level: f64,
    pub trend: f64,
    /// `seasonals[k]` applies to every time index `t` with `t % 12 == k`.
    pub seasonals: [f64; PERIOD],
    /// Season slot of the first forecast step.
    pub next_slot: usize,
    pub sse: f64,
}

struct HwState {
    level: f64,
    trend: f64,
    seasonals: [f64; PERIOD],
}

/// Classical start from the first two seasons: level from the first season's
/// mean, trend from the change in seasonal means, seasonal indices from the
/// averaged deviations (normalized to sum to zero). The level is backed up to
/// the step before the first observation.
fn hw_initial_state(x: &[f64]) -> HwState {
    let m = PERIOD as f64;
    let mean1 = x[..PERIOD].iter().sum::<f64>() / m;
    let mean2 = x[PERIOD..2 * PERIOD].iter().sum::<f64>() / m;
    let trend = (mean2 - mean1) / m;
    let mut seasonals = [0.0; PERIOD];
    for (i, s) in seasonals.iter_mut().enumerate() {
        *s = ((x[i] - mean1) + (x[PERIOD + i] - mean2)) / 2.0;
    }
    let avg = seasonals.iter().sum::<f64>() / m;
    seasonals.iter_mut().for_each(|s| *s -= avg);
    // mean1 sits at t = 5.5; step back to t = -1
    let level = mean1 - trend * (m + 1.0) / 2.0;
    HwState {
        level,
        trend,
        seasonals,
    }
}

fn hw_run(x: &[f64], alpha: f64, beta: f64, gamma: f64) -> (f64, HwState) {
    let mut st = hw_initial_state(x);
    let mut sse = 0.0;
    for (t, &y) in x.iter().enumerate() {
        let slot = t % PERIOD;
        let season = st.seasonals[slot];
        let e = y - (st.level + st.trend + season);
        sse += e * e;
        let prev = st.level;
        st.level = alpha * (y - season) + (1.0 - alpha) * (st.level + st.trend);
        st.trend = beta * (st.level - prev) + (1.0 - beta) * st.trend;
        st.seasonals[slot] = gamma * (y - st.level) + (1.0 - gamma) * season;
    }
    (sse, st)
}

/// Grid-search `(α, β, γ) ∈ {0.1, …, 0.9}³` by in-sample one-step SSE.
/// Needs at least two full seasons.
pub fn hw_fit(series: &TimeSeries) -> Result<HoltWintersModel> {
    let x = series.values();
    if x.len() < 2 * PERIOD {
        return Err(BaselineError::SeriesTooShort {
            needed: 2 * PERIOD,
            got: x.len(),
        });
    }
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut best: Option<(f64, f64, f64, f64, HwState)> = None;
    for &a in &grid {
        for &b in &grid {
            for &g in &grid {
                let (sse, st) = hw_run(x, a, b, g);
                if best.as_ref().is_none_or(|bst| sse < bst.0) {
                    best = Some((sse, a, b, g, st));
                }
            }
        }
    }
    let (sse, alpha, beta, gamma, mut st) = best.expect("grid is non-empty");
    let avg = st.seasonals.iter().sum::<f64>() / PERIOD as f64;
    st.seasonals.iter_mut().for_each(|s| *s -= avg);
    st.level += avg;
    Ok(HoltWintersModel {
        alpha,
        beta,
        gamma,
        level: st.level,
        trend: st.trend,
        seasonals: st.seasonals,
        next_slot: x.len() % PERIOD,
        sse,
    })
}

impl HoltWintersModel {
    pub fn forecast(&self, horizon: usize) -> Result<Forecast> {
        if horizon == 0 {
            return Err(BaselineError::InvalidHorizon);
        }
        let point = (0..horizon)
            .map(|k| {
                self.level
                    + (k + 1) as f64 * self.trend
                    + self.seasonals[(self.next_slot + k) % PERIOD]
            })
            .collect();
        Ok(Forecast::point_only(point))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaselineModel {
    Ses(SesModel),
    HoltWinters(HoltWintersModel),
}

/// Point forecasts from either smoothing model; interval fields stay empty.
pub fn forecast_baseline(model: &BaselineModel, horizon: usize) -> Result<Forecast> {
    match model {
        BaselineModel::Ses(m) => m.forecast(horizon),
        BaselineModel::HoltWinters(m) => m.forecast(horizon),
    }
}

/// Model family evaluated by [`rolling_origin_backtest`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    /// ARIMA with a fixed order, or with the order chosen by AIC on the
    /// first training window and then re-estimated at every origin.
    Arima {
        order: Option<ArimaOrder>,
        bounds: ArimaBounds,
    },
    Ses,
    HoltWinters,
}

impl ModelKind {
    pub fn auto_arima() -> Self {
        ModelKind::Arima {
            order: None,
            bounds: ArimaBounds::default(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Arima { .. } => "Arima",
            ModelKind::Ses => "Ses",
            ModelKind::HoltWinters => "HoltWinters",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "arima" => Ok(ModelKind::auto_arima()),
            "ses" => Ok(ModelKind::Ses),
            "holtwinters" | "holt-winters" | "hw" => Ok(ModelKind::HoltWinters),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub model_name: String,
    pub mae: f64,
    pub rmse: f64,
    /// Mean absolute percentage error in percent, over non-zero actuals only.
    pub mape: f64,
    pub fold_count: usize,
    pub horizon: usize,
    /// Orders used by ARIMA folds, in origin order, with repeats collapsed.
    pub arima_orders: Vec<ArimaOrder>,
}

impl BacktestReport {
    pub const CSV_HEADER: &'static str = "model,mae,rmse,mape,folds,horizon";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{},{}",
            self.model_name, self.mae, self.rmse, self.mape, self.fold_count, self.horizon
        )
    }
}

/// Render reports as the backtest CSV table.
pub fn reports_to_csv(reports: &[BacktestReport]) -> String {
    let mut out = format!("{}\n", BacktestReport::CSV_HEADER);
    for r in reports {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Accuracy metrics over a flat list of `(actual, forecast)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub mae: f64,
    pub rmse: f64,
    pub mape: f64,
}

pub fn error_metrics(pairs: &[(f64, f64)]) -> ErrorMetrics {
    let n = pairs.len() as f64;
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut pct = 0.0;
    let mut pct_n = 0usize;
    for &(actual, predicted) in pairs {
        let e = actual - predicted;
        abs += e.abs();
        sq += e * e;
        if actual != 0.0 {
            pct += (e / actual).abs();
            pct_n += 1;
        }
    }
    let mae = abs / n;
    // guard against rounding putting rmse a hair below mae
    let rmse = (sq / n).sqrt().max(mae);
    ErrorMetrics {
        mae,
        rmse,
        mape: if pct_n == 0 {
            0.0
        } else {
            100.0 * pct / pct_n as f64
        },
    }
}

/// Expanding-window evaluation: for each origin `t` in `min_train..=n-horizon`
/// fit on `x[..t]`, forecast `horizon` steps and score against `x[t..t+horizon]`.
///
/// A training window with no variation is forecast as its constant value,
/// the limit every model family reaches on such data. Automatic ARIMA picks
/// its order by AIC on the first window of every block of 12 origins.
pub fn rolling_origin_backtest(
    series: &TimeSeries,
    model_kind: ModelKind,
    horizon: usize,
    min_train: usize,
) -> Result<BacktestReport> {
    if horizon == 0 {
        return Err(BaselineError::InvalidHorizon);
    }
    let x = series.values();
    let n = x.len();
    if min_train == 0 || n < min_train + horizon {
        return Err(BaselineError::SeriesTooShort {
            needed: min_train.max(1) + horizon,
            got: n,
        });
    }

    // ARIMA orders are re-identified on the training window once a year of
    // origins and re-estimated at every origin.
    let origins: Vec<usize> = (min_train..=n - horizon).collect();
    let reselect = PERIOD;
    let block_orders: Vec<Option<ArimaOrder>> = match model_kind {
        ModelKind::Arima { order: Some(o), .. } => vec![Some(o); origins.len().div_ceil(reselect)],
        ModelKind::Arima { order: None, bounds } => origins
            .iter()
            .step_by(reselect)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&&origin| select_for(series, &x[..origin], bounds, origin))
            .collect::<Result<_>>()?,
        _ => vec![None; origins.len().div_ceil(reselect)],
    };

    let folds: Vec<Result<Vec<(f64, f64)>>> = origins
        .par_iter()
        .enumerate()
        .map(|(i, &origin)| {
            let train = &x[..origin];
            let order = block_orders[i / reselect];
            let predicted = forecast_fold(series, train, model_kind, order, horizon, origin)?;
            Ok(x[origin..origin + horizon]
                .iter()
                .copied()
                .zip(predicted)
                .collect())
        })
        .collect();
    let mut pairs = Vec::with_capacity(origins.len() * horizon);
    for fold in folds {
        pairs.extend(fold?);
    }
    let mut arima_orders: Vec<ArimaOrder> = Vec::new();
    for o in block_orders.into_iter().flatten() {
        if arima_orders.last() != Some(&o) {
            arima_orders.push(o);
        }
    }
    let m = error_metrics(&pairs);
    Ok(BacktestReport {
        model_name: model_kind.label().to_string(),
        mae: m.mae,
        rmse: m.rmse,
        mape: m.mape,
        fold_count: origins.len(),
        horizon,
        arima_orders,
    })
}

/// AIC order for one training window; `None` if the window is constant.
fn select_for(series: &TimeSeries, train: &[f64], bounds: ArimaBounds, origin: usize) -> Result<Option<ArimaOrder>> {
    if is_constant(train) {
        return Ok(None);
    }
    let ts = TimeSeries::new(series.start(), train.to_vec(), series.field_name())
        .expect("non-empty finite window");
    arima::select_order(&ts, bounds)
        .map(Some)
        .map_err(|source| BaselineError::Arima { origin, source })
}

fn forecast_fold(
    series: &TimeSeries,
    train: &[f64],
    kind: ModelKind,
    arima_order: Option<ArimaOrder>,
    horizon: usize,
    origin: usize,
) -> Result<Vec<f64>> {
    if is_constant(train) {
        return Ok(vec![train[0]; horizon]);
    }
    let ts = TimeSeries::new(series.start(), train.to_vec(), series.field_name())
        .expect("non-empty finite window");
    let fc = match kind {
        ModelKind::Ses => ses_fit(&ts)?.forecast(horizon)?,
        ModelKind::HoltWinters => hw_fit(&ts)?.forecast(horizon)?,
        ModelKind::Arima { bounds, .. } => {
            let order = match arima_order {
                Some(o) => o,
                // the block started on a constant window; identify on this one
                None => select_for(series, train, bounds, origin)?.expect("window is not constant"),
            };
            let wrap = |source| BaselineError::Arima { origin, source };
            let f = arima::fit(&ts, order).map_err(wrap)?;
            arima::forecast(&f, train, horizon).map_err(wrap)?
        }
    };
    Ok(fc.point)
}
