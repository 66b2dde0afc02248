//! CSV ingestion for monthly history and planning files.
//!
//! History schema (header required, case-insensitive, any column order):
//!
//! ```text
//! date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months
//! ```
//!
//! Plan schema, with the last two columns optional:
//!
//! ```text
//! date,demand_plan_qty,freshness_in_months,shelf_life_in_months[,return_rate_pct][,retailer_capacity]
//! ```

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{self, DomainError, MonthlyRecord, YearMonth};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input is empty (no header or no data rows)")]
    EmptyFile,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: {reason}")]
    BadCell {
        row: usize,
        column: String,
        reason: String,
    },
    #[error("duplicate month {0}")]
    DuplicateMonth(YearMonth),
    #[error("missing months: {}", join_months(.0))]
    GapFound(Vec<YearMonth>),
    #[error("row {row} ({month}): violates {rule}")]
    InvariantViolation {
        row: usize,
        month: YearMonth,
        rule: String,
    },
    #[error("row {row} ({month}): {source}")]
    Domain {
        row: usize,
        month: YearMonth,
        #[source]
        source: DomainError,
    },
    #[error("time series must have at least one value")]
    EmptySeries,
    #[error("time series value at index {0} is not finite")]
    NonFinite(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn join_months(months: &[YearMonth]) -> String {
    months
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// What to do with months missing from the history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GapPolicy {
    #[default]
    Reject,
    Interpolate,
}

impl FromStr for GapPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "reject" => Ok(GapPolicy::Reject),
            "interpolate" => Ok(GapPolicy::Interpolate),
            other => Err(format!("unknown gap policy `{other}`")),
        }
    }
}

/// Numeric column of a [`Dataset`] that can be projected into a [`TimeSeries`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    BoughtQty,
    ReturnQty,
    RetailerCapacity,
    RateOfReturn,
    FreshnessInMonths,
    ShelfLifeInMonths,
}

impl Field {
    pub const ALL: [Field; 6] = [
        Field::BoughtQty,
        Field::ReturnQty,
        Field::RateOfReturn,
        Field::RetailerCapacity,
        Field::FreshnessInMonths,
        Field::ShelfLifeInMonths,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::BoughtQty => "bought_qty",
            Field::ReturnQty => "return_qty",
            Field::RetailerCapacity => "retailer_capacity",
            Field::RateOfReturn => "rate_of_return",
            Field::FreshnessInMonths => "freshness_in_months",
            Field::ShelfLifeInMonths => "shelf_life_in_months",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Field::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown field `{s}`"))
    }
}

/// Ordered, gap-free monthly values of one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    start: YearMonth,
    values: Vec<f64>,
    field_name: String,
}

impl TimeSeries {
    pub fn new(start: YearMonth, values: Vec<f64>, field_name: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(IngestError::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(IngestError::NonFinite(i));
        }
        Ok(Self {
            start,
            values,
            field_name: field_name.into(),
        })
    }

    /// Series starting at an arbitrary fixed month; handy for synthetic data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(YearMonth::new(2000, 1).expect("valid month"), values, "series")
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    /// Month of the final observation.
    pub fn end(&self) -> YearMonth {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn field_name(&self) -> &str {
        &self.field_name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn month_at(&self, i: usize) -> YearMonth {
        self.start.add_months(i as i64)
    }

    /// Leading `len` observations, keeping the start month.
    pub fn head(&self, len: usize) -> Result<TimeSeries> {
        TimeSeries::new(self.start, self.values[..len.min(self.len())].to_vec(), &self.field_name)
    }
}

/// Validated history for one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    records: Vec<MonthlyRecord>,
    product_label: String,
}

impl Dataset {
    /// Sorts by month and rejects duplicates. Per-record rules are checked by [`validate`].
    pub fn new(mut records: Vec<MonthlyRecord>, product_label: impl Into<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(IngestError::EmptyFile);
        }
        records.sort_by_key(|r| r.month);
        if let Some(w) = records.windows(2).find(|w| w[0].month == w[1].month) {
            return Err(IngestError::DuplicateMonth(w[0].month));
        }
        Ok(Self {
            records,
            product_label: product_label.into(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.product_label = label.into();
        self
    }

    pub fn records(&self) -> &[MonthlyRecord] {
        &self.records
    }

    pub fn product_label(&self) -> &str {
        &self.product_label
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// First and last month.
    pub fn span(&self) -> (YearMonth, YearMonth) {
        (
            self.records[0].month,
            self.records[self.records.len() - 1].month,
        )
    }

    /// Months absent between the first and last record.
    pub fn missing_months(&self) -> Vec<YearMonth> {
        let mut missing = Vec::new();
        for w in self.records.windows(2) {
            let mut m = w[0].month.succ();
            while m < w[1].month {
                missing.push(m);
                m = m.succ();
            }
        }
        missing
    }
}

pub const HISTORY_COLUMNS: [&str; 6] = [
    "date",
    "bought_qty",
    "return_qty",
    "retailer_capacity",
    "freshness_in_months",
    "shelf_life_in_months",
];

struct Header {
    index: HashMap<String, usize>,
}

impl Header {
    fn read(headers: &csv::StringRecord) -> Self {
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase(), i))
            .collect();
        Self { index }
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    // 1-based line number of the data row, counting the header as line 1
    line: usize,
}

impl Row<'_> {
    fn cell(&self, idx: usize, column: &str) -> Result<&str> {
        self.record
            .get(idx)
            .map(str::trim)
            .ok_or_else(|| self.bad(column, "cell missing"))
    }

    fn bad(&self, column: &str, reason: impl Into<String>) -> IngestError {
        IngestError::BadCell {
            row: self.line,
            column: column.to_string(),
            reason: reason.into(),
        }
    }

    fn month(&self, idx: usize, column: &str) -> Result<YearMonth> {
        let raw = self.cell(idx, column)?;
        raw.parse().map_err(|e: DomainError| self.bad(column, e.to_string()))
    }

    /// Non-negative whole number; decimals and signs are rejected rather than truncated.
    fn quantity<T: FromStr>(&self, idx: usize, column: &str) -> Result<T> {
        let raw = self.cell(idx, column)?;
        if raw.is_empty() {
            return Err(self.bad(column, "empty cell"));
        }
        if !raw.bytes().all(|b| b.is_ascii_digit()) {
            return Err(self.bad(column, format!("`{raw}` is not a non-negative integer")));
        }
        raw.parse()
            .map_err(|_| self.bad(column, format!("`{raw}` is out of range")))
    }

    fn optional_cell(&self, idx: Option<usize>, column: &str) -> Result<Option<&str>> {
        match idx {
            None => Ok(None),
            Some(i) => {
                let raw = self.cell(i, column)?;
                Ok(if raw.is_empty() { None } else { Some(raw) })
            }
        }
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

/// Parse a history CSV. Rows may appear in any order; the result is sorted by month.
pub fn parse_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(IngestError::EmptyFile);
    }
    let header = Header::read(&headers);
    let idx: Vec<usize> = HISTORY_COLUMNS
        .iter()
        .map(|c| header.require(c))
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = Row {
            record: &rec,
            line: i + 2,
        };
        records.push(MonthlyRecord {
            month: row.month(idx[0], HISTORY_COLUMNS[0])?,
            bought_qty: row.quantity(idx[1], HISTORY_COLUMNS[1])?,
            return_qty: row.quantity(idx[2], HISTORY_COLUMNS[2])?,
            retailer_capacity: row.quantity(idx[3], HISTORY_COLUMNS[3])?,
            freshness_in_months: row.quantity(idx[4], HISTORY_COLUMNS[4])?,
            shelf_life_in_months: row.quantity(idx[5], HISTORY_COLUMNS[5])?,
            synthetic: false,
        });
    }
    Dataset::new(records, "")
}

/// Write a dataset in the canonical history schema.
pub fn write_csv<W: Write>(dataset: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HISTORY_COLUMNS)?;
    for r in dataset.records() {
        w.write_record([
            r.month.to_string(),
            r.bought_qty.to_string(),
            r.return_qty.to_string(),
            r.retailer_capacity.to_string(),
            r.freshness_in_months.to_string(),
            r.shelf_life_in_months.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn check_records(records: &[MonthlyRecord]) -> Result<()> {
    for (i, r) in records.iter().enumerate() {
        if let Some(rule) = r.violation() {
            return Err(IngestError::InvariantViolation {
                row: i + 1,
                month: r.month,
                rule: rule.to_string(),
            });
        }
    }
    Ok(())
}

fn lerp_qty(a: u64, b: u64, t: f64) -> u64 {
    (a as f64 + (b as f64 - a as f64) * t).round() as u64
}

/// Check per-record rules and month contiguity.
///
/// Under [`GapPolicy::Interpolate`] each missing month is filled by linear
/// interpolation of the quantity columns (rounded), freshness and shelf life
/// copied from the preceding record, and the record flagged `synthetic`.
pub fn validate(dataset: Dataset, gap_policy: GapPolicy) -> Result<Dataset> {
    check_records(&dataset.records)?;
    let missing = dataset.missing_months();
    if missing.is_empty() {
        return Ok(dataset);
    }
    match gap_policy {
        GapPolicy::Reject => Err(IngestError::GapFound(missing)),
        GapPolicy::Interpolate => {
            let Dataset {
                records,
                product_label,
            } = dataset;
            let mut filled = Vec::with_capacity(records.len() + missing.len());
            for w in records.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                filled.push(a.clone());
                let span = a.month.months_until(b.month) as f64;
                let mut m = a.month.succ();
                let mut k = 1.0;
                while m < b.month {
                    let t = k / span;
                    filled.push(MonthlyRecord {
                        month: m,
                        bought_qty: lerp_qty(a.bought_qty, b.bought_qty, t),
                        return_qty: lerp_qty(a.return_qty, b.return_qty, t),
                        retailer_capacity: lerp_qty(a.retailer_capacity, b.retailer_capacity, t),
                        freshness_in_months: a.freshness_in_months,
                        shelf_life_in_months: a.shelf_life_in_months,
                        synthetic: true,
                    });
                    m = m.succ();
                    k += 1.0;
                }
            }
            filled.push(records[records.len() - 1].clone());
            check_records(&filled)?;
            Ok(Dataset {
                records: filled,
                product_label,
            })
        }
    }
}

/// Project one column into a series. `RateOfReturn` is computed per record.
pub fn extract_series(dataset: &Dataset, field: Field) -> Result<TimeSeries> {
    let values = dataset
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(match field {
                Field::BoughtQty => r.bought_qty as f64,
                Field::ReturnQty => r.return_qty as f64,
                Field::RetailerCapacity => r.retailer_capacity as f64,
                Field::FreshnessInMonths => r.freshness_in_months as f64,
                Field::ShelfLifeInMonths => r.shelf_life_in_months as f64,
                Field::RateOfReturn => domain::return_rate(r.return_qty, r.bought_qty)
                    .map_err(|source| IngestError::Domain {
                        row: i + 1,
                        month: r.month,
                        source,
                    })?
                    .value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TimeSeries::new(dataset.span().0, values, field.name())
}

/// One row of a planning file. Optional overrides replace forecast values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanInput {
    pub month: YearMonth,
    pub demand_plan_qty: u64,
    pub freshness_in_months: u32,
    pub shelf_life_in_months: u32,
    /// Percentage, e.g. `18.77`.
    pub return_rate_pct: Option<f64>,
    pub retailer_capacity: Option<u64>,
}

pub fn parse_plan_csv<R: Read>(input: R) -> Result<Vec<PlanInput>> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(IngestError::EmptyFile);
    }
    let header = Header::read(&headers);
    let date = header.require("date")?;
    let demand = header.require("demand_plan_qty")?;
    let fresh = header.require("freshness_in_months")?;
    let shelf = header.require("shelf_life_in_months")?;
    let rate = header.optional("return_rate_pct");
    let cap = header.optional("retailer_capacity");

    let mut rows: Vec<PlanInput> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = Row {
            record: &rec,
            line: i + 2,
        };
        let return_rate_pct = match row.optional_cell(rate, "return_rate_pct")? {
            None => None,
            Some(raw) => {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| row.bad("return_rate_pct", format!("`{raw}` is not a number")))?;
                if !(0.0..=100.0).contains(&v) {
                    return Err(row.bad("return_rate_pct", format!("{v} outside [0, 100]")));
                }
                Some(v)
            }
        };
        let retailer_capacity = match cap {
            Some(c) if row.optional_cell(Some(c), "retailer_capacity")?.is_some() => {
                Some(row.quantity(c, "retailer_capacity")?)
            }
            _ => None,
        };
        let input = PlanInput {
            month: row.month(date, "date")?,
            demand_plan_qty: row.quantity(demand, "demand_plan_qty")?,
            freshness_in_months: row.quantity(fresh, "freshness_in_months")?,
            shelf_life_in_months: row.quantity(shelf, "shelf_life_in_months")?,
            return_rate_pct,
            retailer_capacity,
        };
        if input.shelf_life_in_months == 0 {
            return Err(row.bad("shelf_life_in_months", "must be at least 1"));
        }
        if input.freshness_in_months > input.shelf_life_in_months {
            return Err(row.bad("freshness_in_months", "exceeds shelf_life_in_months"));
        }
        if input.retailer_capacity == Some(0) {
            return Err(row.bad("retailer_capacity", "must be at least 1"));
        }
        rows.push(input);
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyFile);
    }
    rows.sort_by_key(|r| r.month);
    if let Some(w) = rows.windows(2).find(|w| w[0].month == w[1].month) {
        return Err(IngestError::DuplicateMonth(w[0].month));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "date,bought_qty,return_qty,retailer_capacity,freshness_in_months,shelf_life_in_months\n";

    fn parse(body: &str) -> Result<Dataset> {
        parse_csv(format!("{HEADER}{body}").as_bytes())
    }

    fn record(month: &str, bought: u64, ret: u64) -> MonthlyRecord {
        MonthlyRecord {
            month: month.parse().unwrap(),
            bought_qty: bought,
            return_qty: ret,
            retailer_capacity: 700,
            freshness_in_months: 3,
            shelf_life_in_months: 4,
            synthetic: false,
        }
    }

    #[test]
    fn single_row() {
        let ds = parse("2022-01,600,100,700,3,4\n").unwrap();
        assert_eq!(ds.len(), 1);
        let r = &ds.records()[0];
        assert_eq!(r.bought_qty, 600);
        assert_eq!(r.return_qty, 100);
        assert_eq!(r.retailer_capacity, 700);
        assert_eq!(r.freshness_in_months, 3);
        assert_eq!(r.shelf_life_in_months, 4);
    }

    #[test]
    fn header_is_case_insensitive_and_reorderable() {
        let csv = "Return_Qty,DATE,Bought_Qty,shelf_life_in_months,retailer_capacity,FRESHNESS_IN_MONTHS\n\
                   100,2022-01-15,600,4,700,3\n";
        let ds = parse_csv(csv.as_bytes()).unwrap();
        assert_eq!(ds.records()[0].return_qty, 100);
        assert_eq!(ds.records()[0].month.to_string(), "2022-01");
    }

    #[test]
    fn rows_sorted_by_month() {
        let ds = parse("2022-03,600,100,700,3,4\n2022-01,600,100,700,3,4\n2022-02,600,100,700,3,4\n")
            .unwrap();
        let months: Vec<String> = ds.records().iter().map(|r| r.month.to_string()).collect();
        assert_eq!(months, ["2022-01", "2022-02", "2022-03"]);
    }

    #[test]
    fn duplicate_month() {
        let err = parse("2022-03,600,100,700,3,4\n2022-03-10,500,100,700,3,4\n").unwrap_err();
        assert!(matches!(err, IngestError::DuplicateMonth(m) if m.to_string() == "2022-03"));
    }

    #[test]
    fn missing_column() {
        let csv = "date,bought_qty,retailer_capacity,freshness_in_months,shelf_life_in_months\n\
                   2022-01,600,700,3,4\n";
        let err = parse_csv(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn(c) if c == "return_qty"));
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(parse_csv("".as_bytes()), Err(IngestError::EmptyFile)));
        assert!(matches!(parse(""), Err(IngestError::EmptyFile)));
    }

    #[test]
    fn non_integer_quantity_is_rejected() {
        let err = parse("2022-01,600.5,100,700,3,4\n").unwrap_err();
        match err {
            IngestError::BadCell { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "bought_qty");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("2022-01,600,-1,700,3,4\n"), Err(IngestError::BadCell { .. })));
        assert!(matches!(parse("2022-01,600,,700,3,4\n"), Err(IngestError::BadCell { .. })));
        assert!(matches!(parse("Jan 2022,600,1,700,3,4\n"), Err(IngestError::BadCell { .. })));
    }

    #[test]
    fn reject_policy_reports_gaps() {
        let ds = parse("2022-01,100,10,700,3,4\n2022-04,300,30,700,3,4\n").unwrap();
        match validate(ds, GapPolicy::Reject).unwrap_err() {
            IngestError::GapFound(m) => {
                let m: Vec<String> = m.iter().map(ToString::to_string).collect();
                assert_eq!(m, ["2022-02", "2022-03"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn contiguous_dataset_unchanged() {
        let records: Vec<_> = (0..36)
            .map(|i| {
                let mut r = record("2022-01", 600 + i, 100);
                r.month = r.month.add_months(i as i64);
                r
            })
            .collect();
        let ds = Dataset::new(records, "x").unwrap();
        assert_eq!(validate(ds.clone(), GapPolicy::Reject).unwrap(), ds);
    }

    #[test]
    fn interpolation_fills_midpoint() {
        let ds = Dataset::new(vec![record("2022-01", 100, 10), record("2022-03", 300, 30)], "")
            .unwrap();
        let out = validate(ds, GapPolicy::Interpolate).unwrap();
        assert_eq!(out.len(), 3);
        let feb = &out.records()[1];
        assert_eq!(feb.month.to_string(), "2022-02");
        assert_eq!(feb.bought_qty, 200);
        assert_eq!(feb.return_qty, 20);
        assert!(feb.synthetic);
        assert_eq!(feb.freshness_in_months, 3);
        assert!(validate(out, GapPolicy::Reject).is_ok());
    }

    #[test]
    fn invariant_violation() {
        let ds = Dataset::new(vec![record("2022-01", 100, 10), record("2022-02", 100, 101)], "")
            .unwrap();
        match validate(ds, GapPolicy::Reject).unwrap_err() {
            IngestError::InvariantViolation { row, rule, .. } => {
                assert_eq!(row, 2);
                assert!(rule.contains("return_qty"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn series_extraction() {
        let ds = Dataset::new(vec![record("2022-01", 600, 120), record("2022-02", 700, 140)], "")
            .unwrap();
        let rate = extract_series(&ds, Field::RateOfReturn).unwrap();
        assert_eq!(rate.values(), &[120.0 / 600.0, 140.0 / 700.0]);
        assert_eq!(rate.field_name(), "rate_of_return");

        let ds3 = Dataset::new(
            vec![
                record("2022-01", 1, 0),
                record("2022-02", 2, 0),
                record("2022-03", 3, 0),
            ],
            "",
        )
        .unwrap();
        let bought = extract_series(&ds3, Field::BoughtQty).unwrap();
        assert_eq!(bought.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(bought.end().to_string(), "2022-03");

        let zero = Dataset::new(vec![record("2022-01", 0, 0)], "").unwrap();
        match extract_series(&zero, Field::RateOfReturn).unwrap_err() {
            IngestError::Domain { source, .. } => assert_eq!(source, DomainError::ZeroSales),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plan_file_with_and_without_overrides() {
        let csv = "date,demand_plan_qty,freshness_in_months,shelf_life_in_months,return_rate_pct,retailer_capacity\n\
                   2025-02,600,1,4,19.76,595\n2025-01,500,2,4,18.77,527\n";
        let rows = parse_plan_csv(csv.as_bytes()).unwrap();
        assert_eq!(rows[0].month.to_string(), "2025-01");
        assert_eq!(rows[0].return_rate_pct, Some(18.77));
        assert_eq!(rows[1].retailer_capacity, Some(595));

        let bare = "date,demand_plan_qty,freshness_in_months,shelf_life_in_months\n2025-01,500,2,4\n";
        let rows = parse_plan_csv(bare.as_bytes()).unwrap();
        assert_eq!(rows[0].return_rate_pct, None);
        assert_eq!(rows[0].retailer_capacity, None);

        let blank = "date,demand_plan_qty,freshness_in_months,shelf_life_in_months,return_rate_pct,retailer_capacity\n\
                     2025-01,500,2,4,,\n";
        let rows = parse_plan_csv(blank.as_bytes()).unwrap();
        assert_eq!(rows[0].return_rate_pct, None);
    }

    #[test]
    fn plan_file_errors() {
        let bad = "date,demand_plan_qty,freshness_in_months,shelf_life_in_months\n2025-01,500,5,4\n";
        assert!(matches!(
            parse_plan_csv(bad.as_bytes()),
            Err(IngestError::BadCell { column, .. }) if column == "freshness_in_months"
        ));
        let missing = "date,freshness_in_months,shelf_life_in_months\n2025-01,2,4\n";
        assert!(matches!(
            parse_plan_csv(missing.as_bytes()),
            Err(IngestError::MissingColumn(c)) if c == "demand_plan_qty"
        ));
    }
}
