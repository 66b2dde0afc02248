//! Plan assembly, scoring, recommendations and risk-table output.
//!
//! Demand, freshness and shelf life always come from the planner. Return
//! rate and retailer capacity come from the plan file when given there, and
//! otherwise from an ARIMA forecast of the corresponding history column.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arima::{self, ArimaBounds, ArimaError, ArimaFit, Forecast};
use crate::domain::{
    self, DomainError, PlanRow, RatePercent, RiskLevel, RiskRow, RiskScore, Thresholds, YearMonth,
};
use crate::ingest::{self, Dataset, Field, IngestError, PlanInput, TimeSeries};

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("plan covers {got} months, horizon is {expected}")]
    HorizonMismatch { expected: usize, got: usize },
    #[error("plan months are not consecutive: {after} is followed by {next}")]
    PlanGap { after: YearMonth, next: YearMonth },
    #[error("plan month {plan_start} does not follow history ending {history_end}")]
    PlanBeforeHistory {
        plan_start: YearMonth,
        history_end: YearMonth,
    },
    #[error("{month}: column `{column}` must be given in the plan")]
    MissingOverride { month: YearMonth, column: &'static str },
    #[error("forecasting {field}: {source}")]
    Forecast {
        field: &'static str,
        #[source]
        source: ArimaError,
    },
    #[error("{field}: {source}")]
    Series {
        field: &'static str,
        #[source]
        source: IngestError,
    },
    #[error("{month}: {source}")]
    Domain {
        month: YearMonth,
        #[source]
        source: DomainError,
    },
    #[error("plan leaves {0} blank and no history was given to forecast it")]
    NoHistory(&'static str),
    #[error("{0} is already Low risk")]
    AlreadyLow(YearMonth),
    #[error("no rows to emit")]
    EmptyInput,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RiskError>;

/// Where a forecast-able plan column comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Source {
    /// Forecast from history unless the plan row gives a value.
    #[default]
    Forecast,
    /// Every plan row must give a value.
    PlanOverride,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub horizon: usize,
    pub capacity_source: Source,
    pub rate_source: Source,
    pub thresholds: Thresholds,
    pub bounds: ArimaBounds,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            horizon: 12,
            capacity_source: Source::Forecast,
            rate_source: Source::Forecast,
            thresholds: Thresholds::default(),
            bounds: ArimaBounds::default(),
        }
    }
}

/// A forecast together with the model behind it. `model` is `None` when the
/// series is constant and the forecast is that constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldForecast {
    pub field: String,
    pub first_month: YearMonth,
    pub model: Option<ArimaFit>,
    pub forecast: Forecast,
}

/// Select an order, fit it, and forecast `horizon` months past the series end.
pub fn forecast_series(
    series: &TimeSeries,
    bounds: ArimaBounds,
    horizon: usize,
) -> std::result::Result<FieldForecast, ArimaError> {
    if horizon == 0 {
        return Err(ArimaError::InvalidHorizon);
    }
    let x = series.values();
    let first_month = series.end().succ();
    if x.iter().all(|v| *v == x[0]) {
        let point = vec![x[0]; horizon];
        return Ok(FieldForecast {
            field: series.field_name().to_string(),
            first_month,
            model: None,
            forecast: Forecast {
                lower_95: point.clone(),
                upper_95: point.clone(),
                point,
            },
        });
    }
    let (fit, _) = arima::select_order_detailed(series, bounds)?;
    let forecast = arima::forecast(&fit, x, horizon)?;
    Ok(FieldForecast {
        field: series.field_name().to_string(),
        first_month,
        model: Some(fit),
        forecast,
    })
}

fn check_plan(plan: &[PlanInput], horizon: usize) -> Result<()> {
    if plan.len() != horizon {
        return Err(RiskError::HorizonMismatch {
            expected: horizon,
            got: plan.len(),
        });
    }
    if let Some(w) = plan.windows(2).find(|w| w[0].month.succ() != w[1].month) {
        return Err(RiskError::PlanGap {
            after: w[0].month,
            next: w[1].month,
        });
    }
    Ok(())
}

/// Forecast values for each plan month, or `None` when no row needs one.
fn forecast_column(
    history: Option<&Dataset>,
    plan: &[PlanInput],
    field: Field,
    needed: bool,
    bounds: ArimaBounds,
) -> Result<Option<Vec<f64>>> {
    if !needed {
        return Ok(None);
    }
    let history = history.ok_or(RiskError::NoHistory(field.name()))?;
    let series = ingest::extract_series(history, field).map_err(|source| RiskError::Series {
        field: field.name(),
        source,
    })?;
    let history_end = series.end();
    let plan_start = plan[0].month;
    let offset = history_end.months_until(plan_start);
    if offset < 1 {
        return Err(RiskError::PlanBeforeHistory {
            plan_start,
            history_end,
        });
    }
    let steps = offset as usize - 1 + plan.len();
    let f = forecast_series(&series, bounds, steps).map_err(|source| RiskError::Forecast {
        field: field.name(),
        source,
    })?;
    Ok(Some(f.forecast.point[offset as usize - 1..].to_vec()))
}

/// Combine planner inputs with forecasts into one [`PlanRow`] per month.
/// History is only consulted for columns the plan leaves blank.
pub fn build_plan(history: Option<&Dataset>, plan: &[PlanInput], config: &ScoringConfig) -> Result<Vec<PlanRow>> {
    check_plan(plan, config.horizon)?;
    for row in plan {
        if config.rate_source == Source::PlanOverride && row.return_rate_pct.is_none() {
            return Err(RiskError::MissingOverride {
                month: row.month,
                column: "return_rate_pct",
            });
        }
        if config.capacity_source == Source::PlanOverride && row.retailer_capacity.is_none() {
            return Err(RiskError::MissingOverride {
                month: row.month,
                column: "retailer_capacity",
            });
        }
    }
    let need_rate = plan.iter().any(|r| r.return_rate_pct.is_none());
    let need_cap = plan.iter().any(|r| r.retailer_capacity.is_none());
    let rates = forecast_column(history, plan, Field::RateOfReturn, need_rate, config.bounds)?;
    let caps = forecast_column(history, plan, Field::RetailerCapacity, need_cap, config.bounds)?;

    plan.iter()
        .enumerate()
        .map(|(i, input)| {
            let domain_err = |source| RiskError::Domain {
                month: input.month,
                source,
            };
            let return_rate = match input.return_rate_pct {
                Some(pct) => RatePercent::from_percent(pct).map_err(domain_err)?,
                None => {
                    let r = rates.as_ref().expect("forecast when missing")[i];
                    RatePercent::new(r.clamp(0.0, 1.0)).map_err(domain_err)?
                }
            };
            let retailer_capacity = match input.retailer_capacity {
                Some(c) => c,
                None => {
                    let c = caps.as_ref().expect("forecast when missing")[i];
                    c.round().max(1.0) as u64
                }
            };
            Ok(PlanRow {
                month: input.month,
                demand_plan_qty: input.demand_plan_qty,
                return_rate,
                retailer_capacity,
                freshness_in_months: input.freshness_in_months,
                shelf_life_in_months: input.shelf_life_in_months,
            })
        })
        .collect()
}

/// Score a single month. Everything that re-scores a row goes through here.
pub fn score_row(plan: &PlanRow, thresholds: &Thresholds) -> std::result::Result<RiskRow, DomainError> {
    let expected_return_qty = domain::expected_return_qty(plan.demand_plan_qty, plan.return_rate);
    let freshness_ratio = domain::freshness_ratio(plan.freshness_in_months, plan.shelf_life_in_months)?;
    let risk_score =
        domain::bad_goods_risk_score(expected_return_qty, plan.retailer_capacity, freshness_ratio)?;
    Ok(RiskRow {
        plan: plan.clone(),
        expected_return_qty,
        freshness_ratio,
        risk_score,
        risk_level: thresholds.classify(risk_score),
    })
}

/// Score every row with the default thresholds.
pub fn score_plan(rows: &[PlanRow]) -> Result<Vec<RiskRow>> {
    score_plan_with(rows, &Thresholds::default())
}

pub fn score_plan_with(rows: &[PlanRow], thresholds: &Thresholds) -> Result<Vec<RiskRow>> {
    rows.par_iter()
        .map(|r| {
            score_row(r, thresholds).map_err(|source| RiskError::Domain {
                month: r.month,
                source,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    IncreaseFreshness { to: u32 },
    ReduceDemand { to: u64 },
    IncreaseCapacity { to: u64 },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::IncreaseFreshness { to: 1 } => f.write_str("increase freshness to 1 month"),
            Action::IncreaseFreshness { to } => write!(f, "increase freshness to {to} months"),
            Action::ReduceDemand { to } => write!(f, "reduce demand plan to {to} units"),
            Action::IncreaseCapacity { to } => write!(f, "increase retailer capacity to {to} units"),
        }
    }
}

/// Limits on how far a recommendation may move each input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionBounds {
    /// Largest allowed demand cut as a fraction of the plan.
    pub max_demand_reduction: f64,
    /// Largest allowed capacity increase as a fraction of the plan.
    pub max_capacity_increase: f64,
    /// Granularity of demand and capacity changes, in units.
    pub step: u64,
    /// Freshness may be raised up to the shelf life.
    pub allow_freshness: bool,
}

impl Default for ActionBounds {
    fn default() -> Self {
        Self {
            max_demand_reduction: 0.3,
            max_capacity_increase: 0.3,
            step: 50,
            allow_freshness: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub month: YearMonth,
    pub current_level: RiskLevel,
    pub target_level: RiskLevel,
    /// Empty when no action within bounds reaches the target.
    pub actions: Vec<Action>,
    pub resulting_score: RiskScore,
    pub feasible: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lever {
    Freshness,
    Demand,
    Capacity,
}

const LEVERS: [Lever; 3] = [Lever::Freshness, Lever::Demand, Lever::Capacity];

/// Candidate actions for one lever, smallest change first.
fn options(lever: Lever, plan: &PlanRow, bounds: &ActionBounds) -> Vec<Action> {
    let step = bounds.step.max(1);
    match lever {
        Lever::Freshness if bounds.allow_freshness => (plan.freshness_in_months + 1
            ..=plan.shelf_life_in_months)
            .map(|to| Action::IncreaseFreshness { to })
            .collect(),
        Lever::Freshness => Vec::new(),
        Lever::Demand => {
            let max_cut = (plan.demand_plan_qty as f64 * bounds.max_demand_reduction).floor() as u64;
            (1..)
                .map(|k| k * step)
                .take_while(|cut| *cut <= max_cut && *cut < plan.demand_plan_qty)
                .map(|cut| Action::ReduceDemand {
                    to: plan.demand_plan_qty - cut,
                })
                .collect()
        }
        Lever::Capacity => {
            let max_add = (plan.retailer_capacity as f64 * bounds.max_capacity_increase).floor() as u64;
            (1..)
                .map(|k| k * step)
                .take_while(|add| *add <= max_add)
                .map(|add| Action::IncreaseCapacity {
                    to: plan.retailer_capacity + add,
                })
                .collect()
        }
    }
}

fn apply(plan: &PlanRow, actions: &[Action]) -> PlanRow {
    let mut p = plan.clone();
    for a in actions {
        match *a {
            Action::IncreaseFreshness { to } => p.freshness_in_months = to,
            Action::ReduceDemand { to } => p.demand_plan_qty = to,
            Action::IncreaseCapacity { to } => p.retailer_capacity = to,
        }
    }
    p
}

/// Smallest change that brings `row` one risk level down.
///
/// Single actions are tried first in the order freshness, demand, capacity,
/// each from its smallest step upwards. Failing that, pairs of levers are
/// tried in the same priority order, preferring the fewest total steps.
pub fn recommend(row: &RiskRow, bounds: &ActionBounds, thresholds: &Thresholds) -> Result<Recommendation> {
    let month = row.plan.month;
    let target = row.risk_level.lower().ok_or(RiskError::AlreadyLow(month))?;
    let rescore = |actions: &[Action]| -> Result<RiskRow> {
        score_row(&apply(&row.plan, actions), thresholds)
            .map_err(|source| RiskError::Domain { month, source })
    };
    let done = |actions: Vec<Action>, scored: RiskRow| Recommendation {
        month,
        current_level: row.risk_level,
        target_level: target,
        actions,
        resulting_score: scored.risk_score,
        feasible: true,
    };

    for lever in LEVERS {
        for a in options(lever, &row.plan, bounds) {
            let scored = rescore(&[a])?;
            if scored.risk_level <= target {
                return Ok(done(vec![a], scored));
            }
        }
    }

    for (i, first) in LEVERS.iter().enumerate() {
        for second in &LEVERS[i + 1..] {
            let xs = options(*first, &row.plan, bounds);
            let ys = options(*second, &row.plan, bounds);
            // walk anti-diagonals so the total number of steps grows monotonically
            for total in 0..xs.len() + ys.len() {
                for (ix, x) in xs.iter().enumerate().take(total + 1) {
                    let Some(y) = ys.get(total - ix) else { continue };
                    let scored = rescore(&[*x, *y])?;
                    if scored.risk_level <= target {
                        return Ok(done(vec![*x, *y], scored));
                    }
                }
            }
        }
    }

    Ok(Recommendation {
        month,
        current_level: row.risk_level,
        target_level: target,
        actions: Vec::new(),
        resulting_score: row.risk_score,
        feasible: false,
    })
}

/// Recommendations for every Medium or High row, in month order.
pub fn recommend_all(rows: &[RiskRow], bounds: &ActionBounds, thresholds: &Thresholds) -> Result<Vec<Recommendation>> {
    rows.iter()
        .filter(|r| r.risk_level != RiskLevel::Low)
        .map(|r| recommend(r, bounds, thresholds))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub const RISK_TABLE_HEADER: &str = "date,demand_plan_qty,return_rate_pct,expected_return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months,freshness_ratio,bg_risk_score,risk_level";

pub fn emit_risk_table(rows: &[RiskRow], format: Format) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(RiskError::EmptyInput);
    }
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(rows)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = String::from(RISK_TABLE_HEADER);
            out.push('\n');
            for r in rows {
                let p = &r.plan;
                out.push_str(&format!(
                    "{},{},{:.2},{},{},{},{},{:.2},{:.3},{}\n",
                    p.month,
                    p.demand_plan_qty,
                    p.return_rate.percent(),
                    r.expected_return_qty,
                    p.retailer_capacity,
                    p.freshness_in_months,
                    p.shelf_life_in_months,
                    r.freshness_ratio.value(),
                    r.risk_score.value(),
                    r.risk_level
                ));
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn emit_recommendations(recs: &[Recommendation]) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(recs)?;
    out.push(b'\n');
    Ok(out)
}
