//! Bad-goods risk scoring for perishable retail products.
//!
//! Monthly sales history is validated ([`ingest`]), described ([`stats`]),
//! and forecast with a from-scratch ARIMA ([`arima`]) that is checked against
//! simple smoothing baselines ([`baselines`]). Forecast return rates and
//! capacities are combined with a demand plan into a per-month risk table
//! with mitigation suggestions ([`risk`]). [`cli`] wires it all to files.

pub mod arima;
pub mod baselines;
pub mod cli;
pub mod domain;
pub mod ingest;
pub mod optim;
pub mod risk;
pub mod stats;

pub use domain::{PlanRow, RiskLevel, RiskRow, RiskScore, Thresholds, YearMonth};
pub use ingest::{Dataset, Field, GapPolicy, TimeSeries};
