//! Parse a history with a missing month, see it rejected, then fill it.

use bgrisk::ingest::{extract_series, parse_csv, validate, Field, GapPolicy};

const HISTORY: &str = "\
date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months
2024-01,600,114,527,2,4
2024-02,640,125,595,1,4
2024-04,720,140,527,0,4
2024-05,760,151,595,4,4
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = parse_csv(HISTORY.as_bytes())?;
    match validate(raw.clone(), GapPolicy::Reject) {
        Err(e) => println!("reject: {e}"),
        Ok(_) => unreachable!("2024-03 is missing"),
    }

    let filled = validate(raw, GapPolicy::Interpolate)?;
    for r in filled.records() {
        let tag = if r.synthetic { " (interpolated)" } else { "" };
        println!("{} bought={} returned={}{tag}", r.month, r.bought_qty, r.return_qty);
    }

    let rate = extract_series(&filled, Field::RateOfReturn)?;
    println!("return rate from {}: {:.4?}", rate.start(), rate.values());

    let bad = "date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months\n\
               2024-01,100,-3,50,1,4\n";
    println!("bad cell: {}", parse_csv(bad.as_bytes()).unwrap_err());
    Ok(())
}
