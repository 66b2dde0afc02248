use super::{ArimaError, Result};
use crate::ingest::TimeSeries;

/// Apply first differencing `d` times. Requires `x.len() > d`.
pub fn difference_values(x: &[f64], d: usize) -> Result<Vec<f64>> {
    if x.len() <= d {
        return Err(ArimaError::SeriesTooShort {
            needed: d + 1,
            got: x.len(),
        });
    }
    let mut out = x.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Differenced series; its first value is dated `d` months after the input's.
pub fn difference(series: &TimeSeries, d: usize) -> Result<TimeSeries> {
    let values = difference_values(series.values(), d)?;
    Ok(TimeSeries::new(
        series.month_at(d),
        values,
        series.field_name(),
    )?)
}

/// Undo `d` rounds of differencing.
///
/// `seeds` are the `d` level values immediately preceding the first element
/// of `diffs`; the output has the same length as `diffs` and excludes them.
pub fn integrate_values(diffs: &[f64], seeds: &[f64], d: usize) -> Result<Vec<f64>> {
    if seeds.len() != d {
        return Err(ArimaError::SeedMismatch {
            expected: d,
            got: seeds.len(),
        });
    }
    // anchors[k] is the last value of the k-th difference of the seeds
    let mut anchors = Vec::with_capacity(d);
    let mut level = seeds.to_vec();
    for _ in 0..d {
        anchors.push(*level.last().expect("non-empty while k < d"));
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let mut out = diffs.to_vec();
    for anchor in anchors.into_iter().rev() {
        let mut acc = anchor;
        for v in out.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Ok(out)
}

pub fn integrate(diffs: &TimeSeries, seeds: &[f64], d: usize) -> Result<TimeSeries> {
    let values = integrate_values(diffs.values(), seeds, d)?;
    Ok(TimeSeries::new(diffs.start(), values, diffs.field_name())?)
}
