use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bgrisk::RiskRow;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bgrisk(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgrisk"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

const REFERENCE_CSV: &str = "\
date,demand_plan_qty,return_rate_pct,expected_return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months,freshness_ratio,bg_risk_score,risk_level
2025-01,500,18.77,94,527,2,4,0.50,0.422,Medium
2025-02,600,19.76,119,595,1,4,0.25,0.669,Medium
2025-03,700,20.02,140,527,3,4,0.75,0.370,Low
2025-04,800,20.09,161,595,0,4,0.00,1.000,High
2025-05,900,20.11,181,527,4,4,1.00,0.343,Low
2025-06,1000,20.12,201,595,2,4,0.50,0.581,Medium
2025-07,1200,20.12,241,527,1,4,0.25,0.822,High
2025-08,1300,20.12,262,595,3,4,0.75,0.541,Medium
2025-09,1400,20.12,282,527,0,4,0.00,1.000,High
2025-10,1450,20.12,292,595,4,4,1.00,0.491,Medium
2025-11,1500,20.12,302,527,2,4,0.50,0.757,Medium
2025-12,1500,20.12,302,595,1,4,0.25,0.844,High
";

#[test]
fn score_reference_plan() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgrisk(&["score", "--plan", &fixture("reference_plan_2025.csv")], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("risk_table.csv")).unwrap();
    assert_eq!(table, REFERENCE_CSV);

    let recs: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("recommendations.json")).unwrap()).unwrap();
    let first = &recs.as_array().unwrap()[0];
    assert_eq!(first["month"], "2025-01");
    assert_eq!(first["actions"][0]["IncreaseFreshness"]["to"], 3);
}

#[test]
fn score_json_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgrisk(&["score", "--plan", &fixture("reference_plan_2025.csv"), "--format", "json"], dir.path());
    assert!(o.status.success());
    let rows: Vec<RiskRow> = serde_json::from_slice(&std::fs::read(dir.path().join("risk_table.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[3].expected_return_qty, 161);
    // fr = 0 gives exactly one, not a clipped value
    assert_eq!(rows[3].risk_score.value(), 1.0);
    assert!(!rows[3].risk_score.capped());
}

#[test]
fn analyze_short_history_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("two.csv");
    let text = std::fs::read_to_string(fixtures().join("history_2022_2024.csv")).unwrap();
    std::fs::write(&short, text.lines().take(3).collect::<Vec<_>>().join("\n")).unwrap();
    let out = dir.path().join("out");
    let o = bgrisk(&["analyze", "--input", short.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(5));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[analysis]") && err.contains("series too short"), "{err}");
    assert!(out.join("summary.csv").exists());
    assert!(out.join("PARTIAL.txt").exists());
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("field,n,mean,std,min,max\nbought_qty,2,"));
}

#[test]
fn analyze_full_history() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgrisk(&["analyze", "--input", &fixture("history_2022_2024.csv")], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["summary.csv", "correlation.csv", "acf_return_qty.csv", "histogram_bought_qty.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    // constant shelf life has no autocorrelation, noted rather than failed
    let notes = std::fs::read_to_string(dir.path().join("notes.txt")).unwrap();
    assert!(notes.contains("shelf_life_in_months"));
    let acf = std::fs::read_to_string(dir.path().join("acf_return_qty.csv")).unwrap();
    assert!(acf.starts_with("lag,acf,lower_95,upper_95\n0,1.000000,"));
}

#[test]
fn error_lines_name_file_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months\n\
         2024-01,100,10,50,1,4\n2024-02,100,1.5,50,1,4\n",
    )
    .unwrap();
    let o = bgrisk(&["forecast", "--input", bad.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(
        err.trim_end(),
        format!("error[input] file={} row=3 column=return_qty: `1.5` is not a non-negative integer", bad.display())
    );

    let gap = dir.path().join("gap.csv");
    std::fs::write(
        &gap,
        "date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months\n\
         2024-01,100,10,50,1,4\n2024-03,100,10,50,1,4\n",
    )
    .unwrap();
    let o = bgrisk(&["analyze", "--input", gap.to_str().unwrap()], &dir.path().join("o"));
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8(o.stderr).unwrap().contains("2024-02"));
}

#[test]
fn distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgrisk(&["score"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = bgrisk(&["analyze", "--input", "/definitely/not/here.csv"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = bgrisk(&["score", "--plan", &fixture("plan_2025.csv")], dir.path());
    assert_eq!(o.status.code(), Some(7));
    let o = bgrisk(&["score", "--plan", &fixture("reference_plan_2025.csv"), "--horizon", "6"], dir.path());
    assert_eq!(o.status.code(), Some(7));
    assert!(String::from_utf8(o.stderr).unwrap().contains("plan covers 12 months, horizon is 6"));
}

#[test]
fn backtest_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "backtest",
        "--input",
        &fixture("history_2022_2024.csv"),
        "--horizon",
        "3",
        "--seed",
        "42",
    ];
    let a = bgrisk(&args, &dir.path().join("a"));
    let b = bgrisk(&args, &dir.path().join("b"));
    assert!(a.status.success() && b.status.success());
    for field in ["bought_qty", "return_qty", "rate_of_return", "retailer_capacity"] {
        let name = format!("backtest_{field}.csv");
        let x = std::fs::read(dir.path().join("a").join(&name)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(x, y, "{name}");
        let text = String::from_utf8(x).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "model,mae,rmse,mape,folds,horizon");
        assert!(lines[1].starts_with("Arima,") && lines[2].starts_with("Ses,") && lines[3].starts_with("HoltWinters,"));
        assert!(lines[1].ends_with(",10,3"));
    }
}

#[test]
fn forecast_writes_tables_and_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgrisk(
        &["forecast", "--input", &fixture("history_2022_2024.csv"), "--horizon", "4"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = std::fs::read_to_string(dir.path().join("forecast_retailer_capacity.csv")).unwrap();
    let lines: Vec<&str> = f.lines().collect();
    assert_eq!(lines[0], "date,point,lower_95,upper_95");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2025-01,"));
    let models: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("models.json")).unwrap()).unwrap();
    assert_eq!(models.as_array().unwrap().len(), 4);
    assert!(models[3][1]["aic"].is_number());
}
