//! History in, risk report out: forecast return rate and capacity for 2025
//! from the bundled history, then score the planner's demand.
//!
//! The same pipeline is available as `bgrisk report --input … --plan …`.

use bgrisk::ingest::{extract_series, parse_csv, parse_plan_csv, validate, Field, GapPolicy};
use bgrisk::risk::{build_plan, emit_risk_table, forecast_series, score_plan, Format, ScoringConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let history = validate(
        parse_csv(std::fs::File::open(format!("{dir}/history_2022_2024.csv"))?)?,
        GapPolicy::Reject,
    )?;
    // plan without return-rate or capacity columns: both come from forecasts
    let plan = parse_plan_csv(std::fs::File::open(format!("{dir}/plan_2025.csv"))?)?;
    let config = ScoringConfig::default();

    for field in [Field::RateOfReturn, Field::RetailerCapacity] {
        let f = forecast_series(&extract_series(&history, field)?, config.bounds, config.horizon)?;
        let order = f.model.as_ref().map(|m| m.order.to_string()).unwrap_or("constant".into());
        println!("{field}: {order}");
    }

    let rows = build_plan(Some(&history), &plan, &config)?;
    let scored = score_plan(&rows)?;
    print!("{}", String::from_utf8(emit_risk_table(&scored, Format::Csv)?)?);
    Ok(())
}
