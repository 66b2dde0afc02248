//! Autocorrelation, histogram and correlation matrix of the bundled history.

use bgrisk::ingest::{extract_series, parse_csv, validate, Field, GapPolicy};
use bgrisk::stats::{acf, correlation_matrix, default_max_lag, histogram, summary, Summary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/history_2022_2024.csv");
    let data = validate(parse_csv(std::fs::File::open(path)?)?, GapPolicy::Reject)?;

    println!("{}", Summary::CSV_HEADER);
    for f in Field::ALL {
        println!("{}", summary(&extract_series(&data, f)?).csv_line());
    }

    let cap = extract_series(&data, Field::RetailerCapacity)?;
    let a = acf(&cap, default_max_lag(cap.len()))?;
    println!("\ncapacity ACF (band ±{:.3}):", a.confidence_half_width);
    print!("{}", a.to_csv());
    println!("significant lags: {:?}", a.significant_lags());

    let bought = extract_series(&data, Field::BoughtQty)?;
    print!("\nbought_qty histogram:\n{}", histogram(bought.values(), 6)?.to_csv());

    print!("\ncorrelations:\n{}", correlation_matrix(&data).to_csv());
    Ok(())
}
