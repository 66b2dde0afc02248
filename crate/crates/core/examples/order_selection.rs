//! AIC grid search over (p, d, q) on an AR(1) path and on a trending series.

use bgrisk::arima::{select_order_detailed, simulate, ArimaBounds, ArimaOrder, ArimaParams};
use bgrisk::ingest::TimeSeries;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ar1 = simulate(ArimaOrder::new(1, 0, 0), &ArimaParams::new(0.0, vec![0.7], vec![]), 1.0, 300, 2)?;
    let (best, table) = select_order_detailed(&ar1, ArimaBounds::default())?;
    println!("AR(1) path -> {} (AIC {:.2})", best.order, best.aic);

    let mut ranked: Vec<_> = table.iter().filter(|c| c.aic.is_some()).collect();
    ranked.sort_by(|a, b| a.aic.unwrap().total_cmp(&b.aic.unwrap()));
    for c in ranked.iter().take(5) {
        let flag = if c.boundary { "  (root near unit circle)" } else { "" };
        println!("  {} {:.2}{flag}", c.order, c.aic.unwrap());
    }

    let noise = simulate(ArimaOrder::new(0, 0, 0), &ArimaParams::new(0.0, vec![], vec![]), 0.5, 60, 4)?;
    let trend: Vec<f64> = noise.values().iter().enumerate().map(|(t, e)| 100.0 + 5.0 * t as f64 + e).collect();
    let (best, _) = select_order_detailed(&TimeSeries::from_values(trend)?, ArimaBounds::default())?;
    println!("linear trend -> {}", best.order);
    Ok(())
}
