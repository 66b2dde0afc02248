//! Descriptive statistics: autocorrelation, histograms, Pearson correlation
//! and summaries, plus plot-ready CSV/JSON renderings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{extract_series, Dataset, Field, TimeSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("series `{name}` has zero variance")]
    ZeroVariance { name: String },
    #[error("series too short: need at least {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no finite values to summarize")]
    EmptyInput,
    #[error("bin count must be at least 1")]
    InvalidBinCount,
}

pub type Result<T> = std::result::Result<T, StatsError>;

/// Two-sided 95% normal quantile used for every band in this crate.
pub const Z95: f64 = 1.96;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    pub field_name: String,
    /// `coefficients[k]` is the autocorrelation at lag `k`, starting with lag 0.
    pub coefficients: Vec<f64>,
    pub confidence_half_width: f64,
    pub n: usize,
}

impl AcfResult {
    pub fn max_lag(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Lags (excluding 0) whose coefficient falls outside the white-noise band.
    pub fn significant_lags(&self) -> Vec<usize> {
        (1..self.coefficients.len())
            .filter(|&k| self.coefficients[k].abs() > self.confidence_half_width)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,acf,lower_95,upper_95\n");
        for (k, c) in self.coefficients.iter().enumerate() {
            out.push_str(&format!(
                "{k},{c:.6},{:.6},{:.6}\n",
                -self.confidence_half_width, self.confidence_half_width
            ));
        }
        out
    }
}

/// Conventional lag count for monthly data: `min(12, n / 4)`, at least 1.
pub fn default_max_lag(n: usize) -> usize {
    (n / 4).clamp(1, 12)
}

/// Sample autocorrelation with the full-sample (biased) denominator and a
/// flat `±1.96/√n` band.
pub fn acf(series: &TimeSeries, max_lag: usize) -> Result<AcfResult> {
    let x = series.values();
    let n = x.len();
    if n < max_lag + 2 {
        return Err(StatsError::SeriesTooShort {
            needed: max_lag + 2,
            got: n,
        });
    }
    let m = mean(x);
    let dev: Vec<f64> = x.iter().map(|v| v - m).collect();
    let denom: f64 = dev.iter().map(|d| d * d).sum();
    let scale = m.abs().max(1.0);
    if denom <= (f64::EPSILON * scale).powi(2) * n as f64 {
        return Err(StatsError::ZeroVariance {
            name: series.field_name().to_string(),
        });
    }
    let mut coefficients = Vec::with_capacity(max_lag + 1);
    coefficients.push(1.0);
    for k in 1..=max_lag {
        let num: f64 = dev[..n - k].iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
        coefficients.push((num / denom).clamp(-1.0, 1.0));
    }
    Ok(AcfResult {
        field_name: series.field_name().to_string(),
        coefficients,
        confidence_half_width: Z95 / (n as f64).sqrt(),
        n,
    })
}

fn pearson_slices(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(StatsError::SeriesTooShort {
            needed: 2,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance { name: "x".into() });
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance { name: "y".into() });
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    pearson_slices(x.values(), y.values()).map_err(|e| match e {
        StatsError::ZeroVariance { name } if name == "x" => StatsError::ZeroVariance {
            name: x.field_name().to_string(),
        },
        StatsError::ZeroVariance { .. } => StatsError::ZeroVariance {
            name: y.field_name().to_string(),
        },
        other => other,
    })
}

/// Symmetric matrix of Pearson coefficients. `None` marks an undefined entry
/// (a constant or uncomputable variable), never conflated with zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub variable_names: Vec<String>,
    pub entries: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.variable_names.iter().position(|n| n == a)?;
        let j = self.variable_names.iter().position(|n| n == b)?;
        self.entries[i][j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable");
        for n in &self.variable_names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (name, row) in self.variable_names.iter().zip(&self.entries) {
            out.push_str(name);
            for e in row {
                match e {
                    Some(v) => out.push_str(&format!(",{v:.6}")),
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise correlations over every [`Field`] of the dataset.
pub fn correlation_matrix(dataset: &Dataset) -> CorrelationMatrix {
    let columns: Vec<(String, Option<Vec<f64>>)> = Field::ALL
        .iter()
        .map(|&f| {
            let values = extract_series(dataset, f).ok().map(TimeSeries::into_values);
            (f.name().to_string(), values)
        })
        .collect();
    correlation_of_columns(&columns)
}

/// Correlation matrix over arbitrary named columns; `None` columns are undefined.
pub fn correlation_of_columns(columns: &[(String, Option<Vec<f64>>)]) -> CorrelationMatrix {
    let k = columns.len();
    let usable: Vec<bool> = columns
        .iter()
        .map(|(_, v)| match v {
            Some(v) if v.len() >= 2 => v.iter().any(|x| *x != v[0]),
            _ => false,
        })
        .collect();
    let mut entries = vec![vec![None; k]; k];
    for i in 0..k {
        if !usable[i] {
            continue;
        }
        entries[i][i] = Some(1.0);
        for j in (i + 1)..k {
            if !usable[j] {
                continue;
            }
            let (Some(a), Some(b)) = (&columns[i].1, &columns[j].1) else {
                continue;
            };
            let r = pearson_slices(a, b).ok();
            entries[i][j] = r;
            entries[j][i] = r;
        }
    }
    CorrelationMatrix {
        variable_names: columns.iter().map(|(n, _)| n.clone()).collect(),
        entries,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lower,bin_upper,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!(
                "{:.6},{:.6},{c}\n",
                self.bin_edges[i],
                self.bin_edges[i + 1]
            ));
        }
        out
    }
}

/// Equal-width bins over `[min, max]` of the finite values; the maximum lands
/// in the last bin. A zero-width range is widened by ±0.5.
pub fn histogram(values: &[f64], bin_count: usize) -> Result<Histogram> {
    if bin_count == 0 {
        return Err(StatsError::InvalidBinCount);
    }
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bin_count as f64;
    let mut bin_edges: Vec<f64> = (0..bin_count).map(|i| lo + width * i as f64).collect();
    bin_edges.push(hi);
    let mut counts = vec![0usize; bin_count];
    for v in finite {
        let idx = (((v - lo) / width).floor() as usize).min(bin_count - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { bin_edges, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub field_name: String,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub const CSV_HEADER: &'static str = "field,n,mean,std,min,max";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            self.field_name, self.n, self.mean, self.std, self.min, self.max
        )
    }
}

pub fn summary(series: &TimeSeries) -> Summary {
    let x = series.values();
    let n = x.len();
    let m = mean(x);
    let std = if n >= 2 {
        (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Summary {
        field_name: series.field_name().to_string(),
        n,
        mean: m,
        std,
        min: x.iter().copied().fold(f64::INFINITY, f64::min),
        max: x.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}
