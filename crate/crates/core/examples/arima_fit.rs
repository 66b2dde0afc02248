//! Simulate ARMA data, recover its coefficients, and forecast with intervals.

use bgrisk::arima::{fit, forecast, simulate, ArimaOrder, ArimaParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let order = ArimaOrder::new(1, 0, 1);
    let truth = ArimaParams::new(2.0, vec![0.6], vec![0.3]);
    let x = simulate(order, &truth, 1.0, 400, 7)?;

    let m = fit(&x, order)?;
    println!("{order}: true φ=0.6 θ=0.3 c=2.0");
    println!(
        "fitted φ={:.3} θ={:.3} c={:.3} σ²={:.3} AIC={:.1}",
        m.ar_coeffs[0],
        m.ma_coeffs[0],
        m.intercept.unwrap_or(0.0),
        m.sigma2,
        m.aic
    );

    let f = forecast(&m, x.values(), 6)?;
    print!("{}", f.to_csv(x.end().succ()));

    // a random walk forecasts its last value with widening bands
    let rw = simulate(ArimaOrder::new(0, 1, 0), &ArimaParams::new(0.0, vec![], vec![]), 1.0, 100, 3)?;
    let m = fit(&rw, ArimaOrder::new(0, 1, 0))?;
    let f = forecast(&m, rw.values(), 4)?;
    println!("\nrandom walk last={:.3}", rw.values()[rw.len() - 1]);
    print!("{}", f.to_csv(rw.end().succ()));
    Ok(())
}
