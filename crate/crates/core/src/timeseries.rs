//! Dated observation series: CSV ingestion, transforms and calendar alignment.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered `(date, value)` observations with a label.
///
/// Dates are strictly increasing and every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedSeries<T = f64> {
    name: String,
    dates: Vec<NaiveDate>,
    values: Vec<T>,
}

impl<T: Scalar> DatedSeries<T> {
    pub fn new(name: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<T>) -> Result<Self> {
        let name = name.into();
        if dates.len() != values.len() {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("{} dates but {} values", dates.len(), values.len()),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("dates not strictly increasing at {}", w[1]),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                name,
                reason: format!("non-finite value on {}", dates[i]),
            });
        }
        Ok(Self {
            name,
            dates,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Drops the first `m` observations.
    pub fn skip(&self, m: usize) -> Self {
        let m = m.min(self.len());
        Self {
            name: self.name.clone(),
            dates: self.dates[m..].to_vec(),
            values: self.values[m..].to_vec(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, T)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }
}

/// Outcome of a CSV load besides the series itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadReport {
    pub rows_read: usize,
    pub dropped: usize,
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rows read, {} dropped", self.rows_read, self.dropped)
    }
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads one value column of a CSV file keyed by an ISO-8601 date column.
///
/// Rows with an empty value cell are dropped and counted in the report.
pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    date_column: &str,
    value_column: &str,
) -> Result<(DatedSeries<T>, LoadReport)> {
    read_csv(open(path.as_ref())?, date_column, value_column)
}

pub fn read_csv<T: Scalar, R: Read>(
    reader: R,
    date_column: &str,
    value_column: &str,
) -> Result<(DatedSeries<T>, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let di = column_index(&headers, date_column)?;
    let vi = column_index(&headers, value_column)?;

    let mut report = LoadReport::default();
    // (line, date, value)
    let mut rows: Vec<(usize, NaiveDate, T)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        report.rows_read += 1;
        let raw_date = rec.get(di).unwrap_or("");
        let date = parse_date(raw_date).ok_or_else(|| Error::BadDate {
            row: line,
            value: raw_date.to_string(),
        })?;
        let raw = rec.get(vi).unwrap_or("");
        if raw.is_empty() {
            report.dropped += 1;
            continue;
        }
        let value = raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::BadValue {
                row: line,
                value: raw.to_string(),
            })?;
        rows.push((line, date, T::lit(value)));
    }
    rows.sort_by_key(|r| r.1);
    if let Some(w) = rows.windows(2).find(|w| w[0].1 == w[1].1) {
        return Err(Error::DuplicateDate {
            row: w[0].0.max(w[1].0),
            date: w[1].1,
        });
    }
    let (dates, values) = rows.into_iter().map(|(_, d, v)| (d, v)).unzip();
    Ok((DatedSeries::new(value_column, dates, values)?, report))
}

/// Loads every non-date column of a wide CSV into an aligned table.
/// Rows with any empty cell are dropped.
pub fn load_table_csv<T: Scalar>(
    path: impl AsRef<Path>,
    date_column: &str,
) -> Result<(AlignedTable<T>, LoadReport)> {
    read_table_csv(open(path.as_ref())?, date_column)
}

pub fn read_table_csv<T: Scalar, R: Read>(
    reader: R,
    date_column: &str,
) -> Result<(AlignedTable<T>, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let di = column_index(&headers, date_column)?;
    let value_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != di)
        .map(|(i, h)| (i, h.trim().to_string()))
        .collect();

    let mut report = LoadReport::default();
    let mut rows: Vec<(usize, NaiveDate, Vec<T>)> = Vec::new();
    'records: for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        report.rows_read += 1;
        let raw_date = rec.get(di).unwrap_or("");
        let date = parse_date(raw_date).ok_or_else(|| Error::BadDate {
            row: line,
            value: raw_date.to_string(),
        })?;
        let mut vals = Vec::with_capacity(value_cols.len());
        for (ci, _) in &value_cols {
            let raw = rec.get(*ci).unwrap_or("");
            if raw.is_empty() {
                report.dropped += 1;
                continue 'records;
            }
            let v = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::BadValue {
                    row: line,
                    value: raw.to_string(),
                })?;
            vals.push(T::lit(v));
        }
        rows.push((line, date, vals));
    }
    rows.sort_by_key(|r| r.1);
    if let Some(w) = rows.windows(2).find(|w| w[0].1 == w[1].1) {
        return Err(Error::DuplicateDate {
            row: w[0].0.max(w[1].0),
            date: w[1].1,
        });
    }
    let dates: Vec<NaiveDate> = rows.iter().map(|r| r.1).collect();
    let columns = (0..value_cols.len())
        .map(|c| rows.iter().map(|r| r.2[c]).collect())
        .collect();
    let names = value_cols.into_iter().map(|(_, n)| n).collect();
    let table = AlignedTable::from_columns(dates, names, columns)?;
    Ok((table, report))
}

fn check_len<T: Scalar>(s: &DatedSeries<T>, min: usize) -> Result<()> {
    if s.len() < min {
        return Err(Error::Size(format!(
            "series `{}` has {} observations, need at least {min}",
            s.name,
            s.len()
        )));
    }
    Ok(())
}

/// `ln(P_t / P_{t-1})`, dated at `t`.
pub fn log_return<T: Scalar>(prices: &DatedSeries<T>) -> Result<DatedSeries<T>> {
    check_len(prices, 2)?;
    if let Some((d, _)) = prices.iter().find(|(_, p)| *p <= T::zero()) {
        return Err(Error::Domain {
            name: prices.name.clone(),
            date: d,
            reason: "price must be positive".into(),
        });
    }
    let values = prices
        .values
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    DatedSeries::new(prices.name.clone(), prices.dates[1..].to_vec(), values)
}

/// Log change with a series-wide `+1` shift whenever any observation is zero.
fn guarded_log_change<T: Scalar>(series: &DatedSeries<T>) -> Result<DatedSeries<T>> {
    check_len(series, 2)?;
    if let Some((d, _)) = series.iter().find(|(_, v)| *v < T::zero()) {
        return Err(Error::Domain {
            name: series.name.clone(),
            date: d,
            reason: "value must be non-negative".into(),
        });
    }
    let shift = if series.values.iter().any(|v| v.is_zero()) {
        T::one()
    } else {
        T::zero()
    };
    let values = series
        .values
        .windows(2)
        .map(|w| (w[1] + shift).ln() - (w[0] + shift).ln())
        .collect();
    DatedSeries::new(series.name.clone(), series.dates[1..].to_vec(), values)
}

/// Logarithmic growth of (daily new) counts. A zero anywhere in the sample
/// switches the whole series to `ln(C + 1)`, so an all-zero prefix grows at 0.
pub fn log_growth<T: Scalar>(counts: &DatedSeries<T>) -> Result<DatedSeries<T>> {
    guarded_log_change(counts)
}

/// Logarithmic change of an index, using `ln(I + 1)` for the whole series
/// when the index touches zero.
pub fn log_change_zero_guard<T: Scalar>(index: &DatedSeries<T>) -> Result<DatedSeries<T>> {
    guarded_log_change(index)
}

/// Regime indicator: 1 on and after `cutoff`, 0 before.
pub fn dummy<T: Scalar>(
    name: impl Into<String>,
    dates: &[NaiveDate],
    cutoff: NaiveDate,
) -> Result<DatedSeries<T>> {
    let values = dates
        .iter()
        .map(|d| if *d >= cutoff { T::one() } else { T::zero() })
        .collect();
    DatedSeries::new(name, dates.to_vec(), values)
}

/// `out_t = in_{t-k}`, dated at `t`.
pub fn lag<T: Scalar>(series: &DatedSeries<T>, k: usize) -> Result<DatedSeries<T>> {
    if k == 0 {
        return Err(Error::Size("lag order must be at least 1".into()));
    }
    if k >= series.len() {
        return Err(Error::Size(format!(
            "lag {k} needs more than {k} observations, `{}` has {}",
            series.name,
            series.len()
        )));
    }
    let n = series.len();
    DatedSeries::new(
        series.name.clone(),
        series.dates[k..].to_vec(),
        series.values[..n - k].to_vec(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    LogReturn,
    LogGrowth,
    LogChangeZeroGuard,
    Lag(usize),
    Dummy(NaiveDate),
}

impl TransformKind {
    pub fn apply<T: Scalar>(&self, series: &DatedSeries<T>) -> Result<DatedSeries<T>> {
        match *self {
            TransformKind::LogReturn => log_return(series),
            TransformKind::LogGrowth => log_growth(series),
            TransformKind::LogChangeZeroGuard => log_change_zero_guard(series),
            TransformKind::Lag(k) => lag(series, k),
            TransformKind::Dummy(cutoff) => {
                match series.dates.last() {
                    Some(last) if cutoff <= *last => {}
                    _ => {
                        return Err(Error::InvalidSeries {
                            name: series.name.clone(),
                            reason: format!("dummy cutoff {cutoff} lies after the sample"),
                        })
                    }
                }
                dummy(series.name.clone(), &series.dates, cutoff)
            }
        }
    }
}

/// Several named columns observed on one common date index.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedTable<T = f64> {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    columns: Vec<Vec<T>>,
    /// Dates discarded from each input series by the join (zero for tables
    /// built directly from columns).
    pub dropped: Vec<usize>,
}

impl<T: Scalar> AlignedTable<T> {
    pub fn from_columns(
        dates: Vec<NaiveDate>,
        names: Vec<String>,
        columns: Vec<Vec<T>>,
    ) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Alignment("column/name count mismatch".into()));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Alignment(format!(
                "dates not strictly increasing at {}",
                w[1]
            )));
        }
        let mut seen = BTreeSet::new();
        for (name, col) in names.iter().zip(&columns) {
            if !seen.insert(name.as_str()) {
                return Err(Error::Alignment(format!("duplicate column `{name}`")));
            }
            if col.len() != dates.len() {
                return Err(Error::Alignment(format!(
                    "column `{name}` has {} rows, index has {}",
                    col.len(),
                    dates.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Alignment(format!("column `{name}` has non-finite values")));
            }
        }
        let dropped = vec![0; names.len()];
        Ok(Self {
            dates,
            names,
            columns,
            dropped,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[T]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn require(&self, name: &str) -> Result<&[T]> {
        self.column(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn series(&self, name: &str) -> Result<DatedSeries<T>> {
        DatedSeries::new(name, self.dates.clone(), self.require(name)?.to_vec())
    }

    /// Appends a column computed on the table's own index.
    pub fn with_column(mut self, name: impl Into<String>, values: Vec<T>) -> Result<Self> {
        let name = name.into();
        if self.column(&name).is_some() {
            return Err(Error::Alignment(format!("duplicate column `{name}`")));
        }
        if values.len() != self.len() {
            return Err(Error::Alignment(format!(
                "column `{name}` has {} rows, index has {}",
                values.len(),
                self.len()
            )));
        }
        self.names.push(name);
        self.columns.push(values);
        self.dropped.push(0);
        Ok(self)
    }

    /// Keeps only rows whose date satisfies `keep`.
    pub fn filter_dates(&self, keep: impl Fn(NaiveDate) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(self.dates[i])).collect();
        Self {
            dates: idx.iter().map(|&i| self.dates[i]).collect(),
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| idx.iter().map(|&i| c[i]).collect())
                .collect(),
            dropped: vec![0; self.names.len()],
        }
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let columns = names
            .iter()
            .map(|n| self.require(n).map(<[T]>::to_vec))
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(
            self.dates.clone(),
            names.iter().map(|n| n.to_string()).collect(),
            columns,
        )
    }
}

/// Inner join on the dates present in every series, preserving date order.
pub fn align<'a, T, I>(series_list: I) -> Result<AlignedTable<T>>
where
    T: Scalar,
    I: IntoIterator<Item = &'a DatedSeries<T>>,
{
    let list: Vec<&DatedSeries<T>> = series_list.into_iter().collect();
    let Some(first) = list.first() else {
        return Err(Error::Alignment("no series to align".into()));
    };
    let mut common: BTreeSet<NaiveDate> = first.dates.iter().copied().collect();
    for s in &list[1..] {
        let other: BTreeSet<NaiveDate> = s.dates.iter().copied().collect();
        common = common.intersection(&other).copied().collect();
    }
    if common.is_empty() {
        return Err(Error::Alignment("series share no common dates".into()));
    }
    let dates: Vec<NaiveDate> = common.into_iter().collect();
    let mut names = Vec::with_capacity(list.len());
    let mut columns = Vec::with_capacity(list.len());
    let mut dropped = Vec::with_capacity(list.len());
    for s in &list {
        let pos: HashMap<NaiveDate, usize> =
            s.dates.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        columns.push(dates.iter().map(|d| s.values[pos[d]]).collect());
        names.push(s.name.clone());
        dropped.push(s.len() - dates.len());
    }
    let mut table = AlignedTable::from_columns(dates, names, columns)?;
    table.dropped = dropped;
    Ok(table)
}
