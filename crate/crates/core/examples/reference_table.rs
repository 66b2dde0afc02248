//! Score the bundled 2025 plan, whose return rates and capacities are given
//! explicitly, and print the risk table.

use bgrisk::ingest::parse_plan_csv;
use bgrisk::risk::{build_plan, emit_risk_table, score_plan, Format, ScoringConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/reference_plan_2025.csv");
    let plan = parse_plan_csv(std::fs::File::open(path)?)?;
    // every row carries overrides, so no history is needed
    let rows = build_plan(None, &plan, &ScoringConfig::default())?;
    let scored = score_plan(&rows)?;
    print!("{}", String::from_utf8(emit_risk_table(&scored, Format::Csv)?)?);

    for r in scored.iter().filter(|r| r.risk_score.capped()) {
        println!("{}: raw score above 1, capped", r.plan.month);
    }
    Ok(())
}
