//! Core value types and the bad-goods risk formulas.
//!
//! Every function here is pure. The chain used to score one planning month is
//!
//! ```text
//! rate      = returns / sales
//! expected  = round(sales * rate)
//! fr        = freshness / shelf_life
//! score     = min((expected / capacity) ^ fr, 1)
//! ```
//!
//! and the score is bucketed into [`RiskLevel`]s with fixed thresholds.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("sales quantity is zero")]
    ZeroSales,
    #[error("shelf life is zero")]
    ZeroShelfLife,
    #[error("retailer capacity is zero")]
    ZeroCapacity,
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid month `{0}`: expected YYYY-MM or YYYY-MM-DD")]
    BadMonth(String),
}

pub type Result<T> = std::result::Result<T, DomainError>;

/// A calendar year-month, rendered as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) || !(0..=9999).contains(&year) {
            return Err(DomainError::BadMonth(format!("{year}-{month}")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(ord: i64) -> Self {
        Self {
            year: ord.div_euclid(12) as i32,
            month: (ord.rem_euclid(12) + 1) as u32,
        }
    }

    /// Shift by a signed number of months.
    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    pub fn succ(self) -> Self {
        self.add_months(1)
    }

    /// Number of months from `self` to `later` (negative if `later` is earlier).
    pub fn months_until(self, later: YearMonth) -> i64 {
        later.ordinal() - self.ordinal()
    }

    /// Three-letter English month name, as used in report prose.
    pub fn short_name(self) -> &'static str {
        const NAMES: [&str; 12] = [
            "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
        ];
        NAMES[self.month as usize - 1]
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = DomainError;

    /// Accepts `YYYY-MM`, or `YYYY-MM-DD` with the day validated and discarded.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || DomainError::BadMonth(s.to_string());
        match s.len() {
            7 => {
                let (y, m) = s.split_once('-').ok_or_else(bad)?;
                if y.len() != 4 || m.len() != 2 {
                    return Err(bad());
                }
                let year: i32 = y.parse().map_err(|_| bad())?;
                let month: u32 = m.parse().map_err(|_| bad())?;
                YearMonth::new(year, month).map_err(|_| bad())
            }
            10 => {
                let date = NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| bad())?;
                YearMonth::new(date.year(), date.month()).map_err(|_| bad())
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One observed month of history for a single product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyRecord {
    pub month: YearMonth,
    pub bought_qty: u64,
    pub return_qty: u64,
    pub retailer_capacity: u64,
    pub freshness_in_months: u32,
    pub shelf_life_in_months: u32,
    /// Set when the record was filled in by gap interpolation.
    #[serde(default)]
    pub synthetic: bool,
}

impl MonthlyRecord {
    /// First violated per-record rule, if any.
    pub fn violation(&self) -> Option<&'static str> {
        if self.return_qty > self.bought_qty {
            Some("return_qty <= bought_qty")
        } else if self.retailer_capacity == 0 {
            Some("retailer_capacity >= 1")
        } else if self.shelf_life_in_months == 0 {
            Some("shelf_life_in_months >= 1")
        } else if self.freshness_in_months > self.shelf_life_in_months {
            Some("freshness_in_months <= shelf_life_in_months")
        } else {
            None
        }
    }
}

fn check_unit(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(DomainError::InvalidRange(format!("{what} {value} outside [0, 1]")))
    }
}

/// Fraction of sold units that come back, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct RatePercent(f64);

impl RatePercent {
    pub fn new(value: f64) -> Result<Self> {
        check_unit(value, "return rate").map(Self)
    }

    /// From a percentage such as `18.77`.
    pub fn from_percent(pct: f64) -> Result<Self> {
        Self::new(pct / 100.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn percent(self) -> f64 {
        self.0 * 100.0
    }
}

impl TryFrom<f64> for RatePercent {
    type Error = DomainError;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RatePercent> for f64 {
    fn from(r: RatePercent) -> f64 {
        r.0
    }
}

/// Remaining freshness relative to total shelf life, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FreshnessRatio(f64);

impl FreshnessRatio {
    pub fn new(value: f64) -> Result<Self> {
        check_unit(value, "freshness ratio").map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FreshnessRatio {
    type Error = DomainError;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FreshnessRatio> for f64 {
    fn from(r: FreshnessRatio) -> f64 {
        r.0
    }
}

/// Bad-goods risk score in `[0, 1]`. `capped` records that the raw power
/// exceeded one and was clipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskScore {
    value: f64,
    capped: bool,
}

impl RiskScore {
    pub fn new(value: f64) -> Result<Self> {
        check_unit(value, "risk score").map(|value| Self {
            value,
            capped: false,
        })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn capped(self) -> bool {
        self.capped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RiskLevel {
    Low,
    Medium,
    High,
}

impl RiskLevel {
    /// The level one step down, or `None` for `Low`.
    pub fn lower(self) -> Option<RiskLevel> {
        match self {
            RiskLevel::Low => None,
            RiskLevel::Medium => Some(RiskLevel::Low),
            RiskLevel::High => Some(RiskLevel::Medium),
        }
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RiskLevel::Low => "Low",
            RiskLevel::Medium => "Medium",
            RiskLevel::High => "High",
        })
    }
}

/// Score cut points: `Low < low_upper <= Medium < high_lower <= High`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub low_upper: f64,
    pub high_lower: f64,
}

impl Thresholds {
    pub fn new(low_upper: f64, high_lower: f64) -> Result<Self> {
        if !(0.0 < low_upper && low_upper < high_lower && high_lower <= 1.0) {
            return Err(DomainError::InvalidRange(format!(
                "thresholds must satisfy 0 < {low_upper} < {high_lower} <= 1"
            )));
        }
        Ok(Self {
            low_upper,
            high_lower,
        })
    }

    pub fn classify(&self, score: RiskScore) -> RiskLevel {
        let s = score.value();
        if s < self.low_upper {
            RiskLevel::Low
        } else if s < self.high_lower {
            RiskLevel::Medium
        } else {
            RiskLevel::High
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            low_upper: 0.4,
            high_lower: 0.8,
        }
    }
}

/// One forecast-horizon month of planning inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRow {
    pub month: YearMonth,
    pub demand_plan_qty: u64,
    pub return_rate: RatePercent,
    pub retailer_capacity: u64,
    pub freshness_in_months: u32,
    pub shelf_life_in_months: u32,
}

/// A [`PlanRow`] together with its derived risk quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    #[serde(flatten)]
    pub plan: PlanRow,
    pub expected_return_qty: u64,
    pub freshness_ratio: FreshnessRatio,
    pub risk_score: RiskScore,
    pub risk_level: RiskLevel,
}

pub fn return_rate(actual_returns: u64, sales_qty: u64) -> Result<RatePercent> {
    if sales_qty == 0 {
        return Err(DomainError::ZeroSales);
    }
    if actual_returns > sales_qty {
        return Err(DomainError::InvalidRange(format!(
            "returns {actual_returns} exceed sales {sales_qty}"
        )));
    }
    RatePercent::new(actual_returns as f64 / sales_qty as f64)
}

/// `sales * rate`, rounded half away from zero.
pub fn expected_return_qty(sales_qty: u64, rate: RatePercent) -> u64 {
    (sales_qty as f64 * rate.value()).round() as u64
}

/// Space left once returned units are taken out of the sold quantity.
pub fn inventory_capacity(sales_qty: u64, return_qty: u64) -> Result<u64> {
    sales_qty.checked_sub(return_qty).ok_or_else(|| {
        DomainError::InvalidRange(format!("returns {return_qty} exceed sales {sales_qty}"))
    })
}

pub fn freshness_ratio(freshness: u32, shelf_life: u32) -> Result<FreshnessRatio> {
    if shelf_life == 0 {
        return Err(DomainError::ZeroShelfLife);
    }
    if freshness > shelf_life {
        return Err(DomainError::InvalidRange(format!(
            "freshness {freshness} exceeds shelf life {shelf_life}"
        )));
    }
    FreshnessRatio::new(freshness as f64 / shelf_life as f64)
}

/// `(expected / capacity) ^ fr`, capped at one.
///
/// Zero expected returns always score zero, including the `0^0` case.
pub fn bad_goods_risk_score(
    expected_return_qty: u64,
    capacity: u64,
    fr: FreshnessRatio,
) -> Result<RiskScore> {
    if capacity == 0 {
        return Err(DomainError::ZeroCapacity);
    }
    if expected_return_qty == 0 {
        return Ok(RiskScore {
            value: 0.0,
            capped: false,
        });
    }
    let raw = (expected_return_qty as f64 / capacity as f64).powf(fr.value());
    Ok(RiskScore {
        value: raw.min(1.0),
        capped: raw > 1.0,
    })
}

/// Classify with the default 0.4 / 0.8 thresholds.
pub fn classify_risk(score: RiskScore) -> RiskLevel {
    Thresholds::default().classify(score)
}
