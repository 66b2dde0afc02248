//! Generate the bundled 36-month history fixture.
//!
//! Sales grow with a yearly swing, about a fifth of sales come back, retailer
//! capacity alternates between two shelf layouts, and freshness follows the
//! same five-step delivery rotation every year.
//!
//!     cargo run --example synthetic_history > fixtures/history_2022_2024.csv

use std::f64::consts::PI;

use bgrisk::domain::{MonthlyRecord, YearMonth};
use bgrisk::ingest::{write_csv, Dataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEED: u64 = 2025;
const ROTATION: [u32; 12] = [2, 1, 3, 0, 4, 2, 1, 3, 0, 4, 2, 1];

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let start = YearMonth::new(2022, 1).unwrap();

    let records = (0..36)
        .map(|t| {
            let season = (2.0 * PI * t as f64 / 12.0).sin();
            let bought = 600.0 + 25.0 * t as f64 + 90.0 * season + 30.0 * noise.sample(&mut rng);
            let rate = 0.19 + 0.01 * season + 0.005 * noise.sample(&mut rng);
            let layout = if t % 2 == 0 { 527.0 } else { 595.0 };
            let capacity = layout + 8.0 * noise.sample(&mut rng);
            let bought = bought.round().max(1.0) as u64;
            MonthlyRecord {
                month: start.add_months(t),
                bought_qty: bought,
                return_qty: ((bought as f64) * rate.clamp(0.0, 1.0)).round() as u64,
                retailer_capacity: capacity.round().max(1.0) as u64,
                freshness_in_months: ROTATION[t as usize % 12],
                shelf_life_in_months: 4,
                synthetic: false,
            }
        })
        .collect();

    let data = Dataset::new(records, "synthetic").unwrap();
    write_csv(&data, std::io::stdout().lock()).unwrap();
}
