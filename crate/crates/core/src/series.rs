//! Univariate time series loading, validation and chronological splitting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Minimum number of observations: an 80/20 split over `n - 1` patterns
/// must leave at least one test row.
pub const MIN_SERIES_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("missing file: {0}")]
    MissingFile(PathBuf),
    #[error("unparseable value `{text}` at row {row}")]
    UnparseableValue { row: usize, text: String },
    #[error("too few rows: found {found}, need at least {MIN_SERIES_LEN}")]
    TooFewRows { found: usize },
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("labels ({labels}) and values ({values}) differ in length")]
    LengthMismatch { labels: usize, values: usize },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("cannot split {0} patterns into non-empty train and test parts")]
    DegenerateSplit(usize),
    #[error("train fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Selects the column holding observations in a CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ValueColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ValueColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ValueColumn::Index(i),
            Err(_) => ValueColumn::Name(s.to_string()),
        })
    }
}

/// An ordered, labeled sequence of finite observations.
///
/// Labels are opaque text; chronology is the order in which values are given.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self, SeriesError> {
        if labels.len() != values.len() {
            return Err(SeriesError::LengthMismatch {
                labels: labels.len(),
                values: values.len(),
            });
        }
        if values.len() < MIN_SERIES_LEN {
            return Err(SeriesError::TooFewRows {
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite(i));
        }
        Ok(Self { labels, values })
    }

    /// Builds a series labeled by 1-based position.
    pub fn from_values(values: Vec<f64>) -> Result<Self, SeriesError> {
        let labels = (1..=values.len()).map(|i| i.to_string()).collect();
        Self::new(labels, values)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes `label,value` rows with a header. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn write_csv(&self, path: &Path) -> Result<(), SeriesError> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "label,value")?;
        for (label, value) in self.labels.iter().zip(&self.values) {
            writeln!(out, "{label},{value}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Loads a series from a CSV file.
///
/// The first row is treated as a header when its value cell does not parse
/// as a number. Labels come from the first column unless that column holds
/// the values, in which case rows are labeled by position.
pub fn load_csv(path: &Path, column: &ValueColumn) -> Result<TimeSeries, SeriesError> {
    if !path.exists() {
        return Err(SeriesError::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(|cell| cell.is_empty()) {
            continue;
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(SeriesError::TooFewRows { found: 0 });
    }

    let header = &records[0];
    let (value_idx, has_header) = match column {
        ValueColumn::Last => {
            let idx = header.len().saturating_sub(1);
            (
                idx,
                header.get(idx).is_some_and(|c| c.parse::<f64>().is_err()),
            )
        }
        ValueColumn::Index(idx) => {
            if *idx >= header.len() {
                return Err(SeriesError::UnknownColumn(idx.to_string()));
            }
            (*idx, header[*idx].parse::<f64>().is_err())
        }
        ValueColumn::Name(name) => {
            let idx = header
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| SeriesError::UnknownColumn(name.clone()))?;
            (idx, true)
        }
    };

    let mut labels = Vec::new();
    let mut values = Vec::new();
    let skip = usize::from(has_header);
    for (offset, rec) in records.iter().enumerate().skip(skip) {
        let row = offset + 1;
        let cell = rec.get(value_idx).unwrap_or_default();
        let bad = || SeriesError::UnparseableValue {
            row,
            text: cell.to_string(),
        };
        let value: f64 = cell.parse().map_err(|_| bad())?;
        if !value.is_finite() {
            return Err(bad());
        }
        let label = if value_idx == 0 {
            (values.len() + 1).to_string()
        } else {
            rec.get(0).unwrap_or_default().to_string()
        };
        labels.push(label);
        values.push(value);
    }
    TimeSeries::new(labels, values)
}

const ENROLLMENT: [f64; 22] = [
    13055.0, 13563.0, 13867.0, 14696.0, 15460.0, 15311.0, 15603.0, 15861.0, 16807.0, 16919.0,
    16388.0, 15433.0, 15497.0, 15145.0, 15163.0, 15984.0, 16859.0, 18150.0, 18970.0, 19328.0,
    19337.0, 18876.0,
];

/// University of Alabama enrollments, 1971 to 1992.
pub fn builtin_enrollment() -> TimeSeries {
    let labels = (1971..=1992).map(|y: u32| y.to_string()).collect();
    TimeSeries::new(labels, ENROLLMENT.to_vec()).expect("bundled series is valid")
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["enrollment"];

pub fn builtin(name: &str) -> Option<TimeSeries> {
    match name {
        "enrollment" => Some(builtin_enrollment()),
        _ => None,
    }
}

/// Splits `n_patterns` chronologically into `(train, test)` counts.
///
/// `train = floor(train_fraction * n_patterns)`, clamped so both parts are
/// non-empty.
pub fn chronological_split(
    n_patterns: usize,
    train_fraction: f64,
) -> Result<(usize, usize), SeriesError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(SeriesError::InvalidFraction(train_fraction));
    }
    if n_patterns < 2 {
        return Err(SeriesError::DegenerateSplit(n_patterns));
    }
    let train = ((train_fraction * n_patterns as f64).floor() as usize).clamp(1, n_patterns - 1);
    Ok((train, n_patterns - train))
}
