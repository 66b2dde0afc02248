//! Rolling-origin comparison of ARIMA against exponential smoothing.

use bgrisk::arima::{simulate, ArimaOrder, ArimaParams};
use bgrisk::baselines::{hw_fit, reports_to_csv, rolling_origin_backtest, ses_fit, ModelKind};
use bgrisk::ingest::{extract_series, parse_csv, validate, Field, GapPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = simulate(ArimaOrder::new(1, 0, 0), &ArimaParams::new(5.0, vec![0.7], vec![]), 1.0, 200, 11)?;
    let reports = [ModelKind::auto_arima(), ModelKind::Ses, ModelKind::HoltWinters]
        .into_iter()
        .map(|k| rolling_origin_backtest(&x, k, 1, 24))
        .collect::<Result<Vec<_>, _>>()?;
    print!("AR(1), one step ahead:\n{}", reports_to_csv(&reports));

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/history_2022_2024.csv");
    let data = validate(parse_csv(std::fs::File::open(path)?)?, GapPolicy::Reject)?;
    let bought = extract_series(&data, Field::BoughtQty)?;
    let ses = ses_fit(&bought)?;
    let hw = hw_fit(&bought)?;
    println!("\nbought_qty: SES α={:.2}; Holt-Winters α={:.1} β={:.1} γ={:.1}", ses.alpha, hw.alpha, hw.beta, hw.gamma);
    let reports = [ModelKind::auto_arima(), ModelKind::Ses, ModelKind::HoltWinters]
        .into_iter()
        .map(|k| rolling_origin_backtest(&bought, k, 3, 24))
        .collect::<Result<Vec<_>, _>>()?;
    print!("{}", reports_to_csv(&reports));
    Ok(())
}
