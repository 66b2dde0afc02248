//! File-in, file-out front end: `analyze`, `forecast`, `score`, `backtest`
//! and `report`.
//!
//! Every failure is reported as one line on stderr of the form
//!
//! ```text
//! error[input] file=history.csv row=7 column=return_qty: `x` is not a non-negative integer
//! ```
//!
//! and mapped to its own exit code (see [`CliError::exit_code`]).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::arima::{ArimaBounds, ArimaError};
use crate::baselines::{self, BacktestReport, BaselineError, ModelKind};
use crate::domain::{RiskLevel, RiskRow, Thresholds};
use crate::ingest::{self, Dataset, Field, GapPolicy, IngestError, PlanInput};
use crate::risk::{self, ActionBounds, FieldForecast, Format, RiskError, ScoringConfig};
use crate::stats::{self, AcfResult, CorrelationMatrix, Histogram, StatsError, Summary};

/// Columns that get forecast and backtested.
pub const FORECAST_FIELDS: [Field; 4] = [
    Field::BoughtQty,
    Field::ReturnQty,
    Field::RateOfReturn,
    Field::RetailerCapacity,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GapArg {
    Reject,
    Interpolate,
}

impl From<GapArg> for GapPolicy {
    fn from(g: GapArg) -> Self {
        match g {
            GapArg::Reject => GapPolicy::Reject,
            GapArg::Interpolate => GapPolicy::Interpolate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Summary statistics, ACF, histograms and correlations of the history.
    Analyze,
    /// Per-column ARIMA forecasts with the fitted models.
    Forecast,
    /// Risk table and recommendations for a demand plan.
    Score,
    /// Rolling-origin comparison of ARIMA, SES and Holt-Winters.
    Backtest,
    /// All of the above plus a plain-text summary.
    Report,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "bgrisk", version, about = "Bad-goods risk scoring with ARIMA forecasts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// History CSV: date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Plan CSV: date,demand_plan_qty,freshness_in_months,shelf_life_in_months[,return_rate_pct][,retailer_capacity]
    #[arg(long, global = true)]
    pub plan: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 12)]
    pub horizon: usize,
    #[arg(long = "max-p", global = true, default_value_t = 3)]
    pub max_p: usize,
    #[arg(long = "max-d", global = true, default_value_t = 2)]
    pub max_d: usize,
    #[arg(long = "max-q", global = true, default_value_t = 3)]
    pub max_q: usize,
    #[arg(long = "gap-policy", global = true, value_enum, default_value_t = GapArg::Reject)]
    pub gap_policy: GapArg,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Recorded in the report; no pipeline stage draws random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Smallest training window for backtests.
    #[arg(long = "min-train", global = true, default_value_t = 24)]
    pub min_train: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub plan_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub gap_policy: GapPolicy,
    pub bounds: ArimaBounds,
    pub horizon: usize,
    pub min_train: usize,
    pub seed: u64,
    pub format: Format,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        Self {
            command: c.command,
            input_path: c.input,
            plan_path: c.plan,
            output_dir: c.out,
            gap_policy: c.gap_policy.into(),
            bounds: ArimaBounds {
                p_max: c.max_p,
                d_max: c.max_d,
                q_max: c.max_q,
            },
            horizon: c.horizon,
            min_train: c.min_train,
            seed: c.seed,
            format: c.format.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source}")]
    Input {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error("{field}: {source}; partial output: {written}")]
    Analysis {
        field: String,
        written: String,
        #[source]
        source: StatsError,
    },
    #[error("{field}: {source}")]
    Forecast {
        field: String,
        #[source]
        source: ArimaError,
    },
    #[error("{source}")]
    Risk {
        path: Option<PathBuf>,
        #[source]
        source: RiskError,
    },
    #[error("{field} {model}: {source}")]
    Backtest {
        field: String,
        model: String,
        #[source]
        source: BaselineError,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Input { .. } => 4,
            CliError::Analysis { .. } => 5,
            CliError::Forecast { .. } => 6,
            CliError::Risk { .. } => 7,
            CliError::Backtest { .. } => 8,
            CliError::Json(_) => 9,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Input { .. } => "input",
            CliError::Analysis { .. } => "analysis",
            CliError::Forecast { .. } => "forecast",
            CliError::Risk { .. } => "risk",
            CliError::Backtest { .. } => "backtest",
            CliError::Json(_) => "json",
        }
    }

    /// `error[kind] file=… row=… column=…: message`, always a single line.
    pub fn to_line(&self) -> String {
        let mut line = format!("error[{}]", self.kind());
        let file = match self {
            CliError::Io { path, .. } | CliError::Input { path, .. } => Some(path.as_path()),
            CliError::Risk { path, .. } => path.as_deref(),
            _ => None,
        };
        if let Some(f) = file {
            let _ = write!(line, " file={}", f.display());
        }
        if let CliError::Input { source, .. } = self {
            match source {
                IngestError::BadCell { row, column, .. } => {
                    let _ = write!(line, " row={row} column={column}");
                }
                IngestError::InvariantViolation { row, .. } | IngestError::Domain { row, .. } => {
                    let _ = write!(line, " row={row}");
                }
                IngestError::MissingColumn(c) => {
                    let _ = write!(line, " column={c}");
                }
                _ => {}
            }
        }
        let msg = match self {
            // the location is already in the prefix
            CliError::Input {
                source: IngestError::BadCell { reason, .. },
                ..
            } => reason.clone(),
            other => other.to_string(),
        };
        let _ = write!(line, ": {}", msg.replace(['\n', '\r'], " "));
        line
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Parse arguments, run, print any error, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", CliError::Config(first.to_string()).to_line());
            return CliError::Config(String::new()).exit_code();
        }
    };
    match run(&RunConfig::from(cli)) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("{}", e.to_line());
            e.exit_code()
        }
    }
}

/// Execute one command and return the files written, in order.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>> {
    if config.horizon == 0 {
        return Err(CliError::Config("--horizon must be at least 1".into()));
    }
    let mut out = Output::new(&config.output_dir)?;
    match config.command {
        Command::Analyze => analyze(config, &load_history(config)?, &mut out)?,
        Command::Forecast => forecast(config, &load_history(config)?, &mut out)?,
        Command::Score => {
            score(config, &mut out)?;
        }
        Command::Backtest => backtest(config, &load_history(config)?, &mut out)?,
        Command::Report => report(config, &mut out)?,
    }
    Ok(out.written)
}

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn sub(&self, name: &str) -> Result<Self> {
        Self::new(&self.dir.join(name))
    }

    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, bytes)
    }

    fn names(&self) -> String {
        self.written
            .iter()
            .filter_map(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_history(config: &RunConfig) -> Result<Dataset> {
    let path = config
        .input_path
        .as_ref()
        .ok_or_else(|| CliError::Config("--input is required".into()))?;
    let input_err = |source| CliError::Input {
        path: path.clone(),
        source,
    };
    let data = ingest::parse_csv(open(path)?).map_err(input_err)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    ingest::validate(data.with_label(label), config.gap_policy).map_err(input_err)
}

fn load_plan(config: &RunConfig) -> Result<(PathBuf, Vec<PlanInput>)> {
    let path = config
        .plan_path
        .clone()
        .ok_or_else(|| CliError::Config("--plan is required".into()))?;
    let plan = ingest::parse_plan_csv(open(&path)?).map_err(|source| CliError::Input {
        path: path.clone(),
        source,
    })?;
    Ok((path, plan))
}

/// Sturges' rule.
fn bin_count(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize + 1
}

#[derive(Serialize)]
struct Analysis {
    summaries: Vec<Summary>,
    acf: Vec<AcfResult>,
    histograms: Vec<(String, Histogram)>,
    correlation: CorrelationMatrix,
    notes: Vec<String>,
}

fn analyze(config: &RunConfig, data: &Dataset, out: &mut Output) -> Result<()> {
    let series: Vec<_> = Field::ALL
        .iter()
        .map(|&f| {
            ingest::extract_series(data, f).map_err(|source| CliError::Input {
                path: config.input_path.clone().unwrap_or_default(),
                source,
            })
        })
        .collect::<Result<_>>()?;
    let summaries: Vec<Summary> = series.iter().map(stats::summary).collect();
    let correlation = stats::correlation_matrix(data);
    let mut histograms = Vec::new();
    for s in &series {
        let h = stats::histogram(s.values(), bin_count(s.len())).map_err(|source| CliError::Analysis {
            field: s.field_name().to_string(),
            written: String::new(),
            source,
        })?;
        histograms.push((s.field_name().to_string(), h));
    }

    // summaries are written before anything that can fail on a short series
    let csv = config.format == Format::Csv;
    if csv {
        let mut text = format!("{}\n", Summary::CSV_HEADER);
        for s in &summaries {
            text.push_str(&s.csv_line());
            text.push('\n');
        }
        out.write("summary.csv", text)?;
        out.write("correlation.csv", correlation.to_csv())?;
        for (name, h) in &histograms {
            out.write(&format!("histogram_{name}.csv"), h.to_csv())?;
        }
    }

    let mut acfs = Vec::new();
    let mut notes = Vec::new();
    for s in &series {
        match stats::acf(s, stats::default_max_lag(s.len())) {
            Ok(a) => acfs.push(a),
            Err(StatsError::ZeroVariance { name }) => {
                notes.push(format!("{name}: constant, no autocorrelation"));
            }
            Err(source) => {
                if !csv {
                    out.write_json("summary.json", &summaries)?;
                }
                let note = format!(
                    "analysis incomplete: {} failed ({source}); written: {}\n",
                    s.field_name(),
                    out.names()
                );
                out.write("PARTIAL.txt", note)?;
                return Err(CliError::Analysis {
                    field: s.field_name().to_string(),
                    written: out.names(),
                    source,
                });
            }
        }
    }
    if csv {
        for a in &acfs {
            out.write(&format!("acf_{}.csv", a.field_name), a.to_csv())?;
        }
        if !notes.is_empty() {
            out.write("notes.txt", notes.join("\n") + "\n")?;
        }
    } else {
        out.write_json(
            "analysis.json",
            &Analysis {
                summaries,
                acf: acfs,
                histograms,
                correlation,
                notes,
            },
        )?;
    }
    Ok(())
}

fn forecast(config: &RunConfig, data: &Dataset, out: &mut Output) -> Result<()> {
    let mut all: Vec<FieldForecast> = Vec::new();
    for field in FORECAST_FIELDS {
        let series = ingest::extract_series(data, field).map_err(|source| CliError::Input {
            path: config.input_path.clone().unwrap_or_default(),
            source,
        })?;
        let f = risk::forecast_series(&series, config.bounds, config.horizon).map_err(|source| {
            CliError::Forecast {
                field: field.name().to_string(),
                source,
            }
        })?;
        all.push(f);
    }
    match config.format {
        Format::Csv => {
            for f in &all {
                out.write(&format!("forecast_{}.csv", f.field), f.forecast.to_csv(f.first_month))?;
            }
            let models: Vec<_> = all.iter().map(|f| (&f.field, &f.model)).collect();
            out.write_json("models.json", &models)?;
        }
        Format::Json => out.write_json("forecasts.json", &all)?,
    }
    Ok(())
}

fn score(config: &RunConfig, out: &mut Output) -> Result<Vec<RiskRow>> {
    let (plan_path, plan) = load_plan(config)?;
    let history = match &config.input_path {
        Some(_) => Some(load_history(config)?),
        None => None,
    };
    let scoring = ScoringConfig {
        horizon: config.horizon,
        bounds: config.bounds,
        ..ScoringConfig::default()
    };
    let risk_err = |source| CliError::Risk {
        path: Some(plan_path.clone()),
        source,
    };
    let rows = risk::build_plan(history.as_ref(), &plan, &scoring).map_err(risk_err)?;
    let scored = risk::score_plan_with(&rows, &scoring.thresholds).map_err(risk_err)?;
    let table = risk::emit_risk_table(&scored, config.format).map_err(risk_err)?;
    out.write(&format!("risk_table.{}", config.format.extension()), table)?;
    let recs = risk::recommend_all(&scored, &ActionBounds::default(), &scoring.thresholds).map_err(risk_err)?;
    out.write("recommendations.json", risk::emit_recommendations(&recs).map_err(risk_err)?)?;
    Ok(scored)
}

fn backtest(config: &RunConfig, data: &Dataset, out: &mut Output) -> Result<()> {
    let kinds = [
        ModelKind::Arima {
            order: None,
            bounds: config.bounds,
        },
        ModelKind::Ses,
        ModelKind::HoltWinters,
    ];
    for field in FORECAST_FIELDS {
        let series = ingest::extract_series(data, field).map_err(|source| CliError::Input {
            path: config.input_path.clone().unwrap_or_default(),
            source,
        })?;
        let reports: Vec<BacktestReport> = kinds
            .iter()
            .map(|k| {
                baselines::rolling_origin_backtest(&series, *k, config.horizon, config.min_train).map_err(
                    |source| CliError::Backtest {
                        field: field.name().to_string(),
                        model: k.label().to_string(),
                        source,
                    },
                )
            })
            .collect::<Result<_>>()?;
        match config.format {
            Format::Csv => out.write(
                &format!("backtest_{}.csv", field.name()),
                baselines::reports_to_csv(&reports),
            )?,
            Format::Json => out.write_json(&format!("backtest_{}.json", field.name()), &reports)?,
        }
    }
    Ok(())
}

fn report(config: &RunConfig, out: &mut Output) -> Result<()> {
    let data = load_history(config)?;
    let mut sub = out.sub("analyze")?;
    analyze(config, &data, &mut sub)?;
    out.written.append(&mut sub.written);
    let mut sub = out.sub("forecast")?;
    forecast(config, &data, &mut sub)?;
    out.written.append(&mut sub.written);
    let mut sub = out.sub("backtest")?;
    backtest(config, &data, &mut sub)?;
    out.written.append(&mut sub.written);
    let mut sub = out.sub("score")?;
    let scored = score(config, &mut sub)?;
    let recs = risk::recommend_all(&scored, &ActionBounds::default(), &Thresholds::default())
        .map_err(|source| CliError::Risk { path: None, source })?;
    out.written.append(&mut sub.written);

    let (first, last) = data.span();
    let mut text = String::new();
    let _ = writeln!(text, "Bad-goods risk report: {}", data.product_label());
    let _ = writeln!(text, "history: {first} to {last} ({} months)", data.len());
    let _ = writeln!(text, "horizon: {} months; seed: {}", config.horizon, config.seed);
    let _ = writeln!(text);
    for level in [RiskLevel::High, RiskLevel::Medium, RiskLevel::Low] {
        let months: Vec<String> = scored
            .iter()
            .filter(|r| r.risk_level == level)
            .map(|r| format!("{} ({:.3})", r.plan.month.short_name(), r.risk_score.value()))
            .collect();
        let _ = writeln!(text, "{level} risk: {}", if months.is_empty() { "none".into() } else { months.join(", ") });
    }
    let _ = writeln!(text);
    for r in &scored {
        if r.risk_level == RiskLevel::High {
            let _ = writeln!(
                text,
                "!! {} {}: score {:.3} (expected returns {} vs capacity {}, freshness {}/{})",
                r.plan.month.short_name(),
                r.plan.month,
                r.risk_score.value(),
                r.expected_return_qty,
                r.plan.retailer_capacity,
                r.plan.freshness_in_months,
                r.plan.shelf_life_in_months
            );
        }
    }
    let _ = writeln!(text);
    let _ = writeln!(text, "Recommendations:");
    for rec in &recs {
        let what = if rec.feasible {
            rec.actions.iter().map(ToString::to_string).collect::<Vec<_>>().join(" and ")
        } else {
            "no single or paired action within bounds".to_string()
        };
        let _ = writeln!(
            text,
            "- {} ({} -> {}): {what}; resulting score {:.3}",
            rec.month, rec.current_level, rec.target_level, rec.resulting_score.value()
        );
    }
    out.write("report.txt", text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "bgrisk", "score", "--plan", "p.csv", "--horizon", "6", "--max-p", "1", "--format", "json",
            "--gap-policy", "interpolate",
        ])
        .unwrap();
        let cfg = RunConfig::from(cli);
        assert_eq!(cfg.command, Command::Score);
        assert_eq!(cfg.horizon, 6);
        assert_eq!(cfg.bounds, ArimaBounds { p_max: 1, d_max: 2, q_max: 3 });
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.gap_policy, GapPolicy::Interpolate);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn error_lines_carry_location() {
        let e = CliError::Input {
            path: "h.csv".into(),
            source: IngestError::BadCell {
                row: 7,
                column: "return_qty".into(),
                reason: "`x` is not a non-negative integer".into(),
            },
        };
        assert_eq!(
            e.to_line(),
            "error[input] file=h.csv row=7 column=return_qty: `x` is not a non-negative integer"
        );
        assert_eq!(e.exit_code(), 4);
        let codes: Vec<i32> = [
            CliError::Config(String::new()).exit_code(),
            CliError::Io {
                path: PathBuf::new(),
                source: std::io::Error::other("x"),
            }
            .exit_code(),
            e.exit_code(),
            CliError::Forecast {
                field: String::new(),
                source: ArimaError::InvalidHorizon,
            }
            .exit_code(),
        ]
        .to_vec();
        let mut dedup = codes.clone();
        dedup.dedup();
        assert_eq!(codes, dedup);
    }

    #[test]
    fn sturges_bins() {
        assert_eq!(bin_count(1), 1);
        assert_eq!(bin_count(36), 7);
        assert_eq!(bin_count(64), 7);
    }
}
