//! Fuzzification into (interval index, membership) features, min-max scaling
//! and first-order input/target pattern construction.

use std::fmt;

use thiserror::Error;

use crate::partitioning::IntervalPartition;
use crate::series::{chronological_split, SeriesError, TimeSeries};

#[derive(Debug, Error)]
pub enum FuzzifyError {
    #[error("value {value} lies outside the universe [{lower}, {upper}]")]
    OutOfUniverse { value: f64, lower: f64, upper: f64 },
    #[error("degenerate interval [{lower}, {upper}]")]
    DegenerateInterval { lower: f64, upper: f64 },
    #[error("constant series cannot be min-max scaled")]
    ConstantSeries,
    #[error(transparent)]
    Split(#[from] SeriesError),
}

/// Location of an observation: 1-based interval index and its relative
/// position inside that interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyFeature {
    pub interval_index: usize,
    pub membership: f64,
}

impl FuzzyFeature {
    /// Regressor input `(index, membership)`; the index is passed unscaled.
    pub fn to_input(self) -> [f64; 2] {
        [self.interval_index as f64, self.membership]
    }
}

/// Index of the interval containing `y`. A value on a shared boundary goes to
/// the higher interval; the universe's upper end belongs to the last one.
pub fn locate_interval(partition: &IntervalPartition, y: f64) -> Result<usize, FuzzifyError> {
    let uod = partition.uod;
    if !uod.contains(y) {
        return Err(FuzzifyError::OutOfUniverse {
            value: y,
            lower: uod.lower,
            upper: uod.upper,
        });
    }
    let interior = &partition.boundaries[1..partition.boundaries.len() - 1];
    Ok(1 + interior.iter().filter(|&&b| b <= y).count())
}

/// `(y - lower) / (upper - lower)`.
pub fn interval_membership(lower: f64, upper: f64, y: f64) -> Result<f64, FuzzifyError> {
    if !(lower < upper) {
        return Err(FuzzifyError::DegenerateInterval { lower, upper });
    }
    if !(lower <= y && y <= upper) {
        return Err(FuzzifyError::OutOfUniverse {
            value: y,
            lower,
            upper,
        });
    }
    Ok((y - lower) / (upper - lower))
}

pub fn fuzzify(partition: &IntervalPartition, y: f64) -> Result<FuzzyFeature, FuzzifyError> {
    let interval_index = locate_interval(partition, y)?;
    let (lo, hi) = partition.interval(interval_index);
    Ok(FuzzyFeature {
        interval_index,
        membership: interval_membership(lo, hi, y)?,
    })
}

/// Min-max scaler fitted on the raw series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxScaler {
    pub min: f64,
    pub max: f64,
}

impl MinMaxScaler {
    pub fn fit(values: &[f64]) -> Result<Self, FuzzifyError> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(min < max) {
            return Err(FuzzifyError::ConstantSeries);
        }
        Ok(Self { min, max })
    }

    pub fn transform(&self, y: f64) -> f64 {
        (y - self.min) / (self.max - self.min)
    }

    /// Inverse of [`transform`](Self::transform). Not clamped.
    pub fn inverse(&self, scaled: f64) -> f64 {
        scaled * (self.max - self.min) + self.min
    }
}

pub fn normalize(series: &TimeSeries) -> Result<(Vec<f64>, MinMaxScaler), FuzzifyError> {
    let scaler = MinMaxScaler::fit(series.values())?;
    let scaled = series
        .values()
        .iter()
        .map(|&y| scaler.transform(y))
        .collect();
    Ok((scaled, scaler))
}

pub fn denormalize(value: f64, scaler: &MinMaxScaler) -> f64 {
    scaler.inverse(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
    Forecast,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Forecast => "forecast",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "forecast" => Ok(Split::Forecast),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// One supervised row: features at `t - 1`, normalized value at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    /// Label of the observation being forecast (time `t`).
    pub forecast_label: String,
    pub input: FuzzyFeature,
    pub target: f64,
}

/// Label used for the out-of-sample row that forecasts past the series end.
pub const NEXT_LABEL: &str = "next";

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    /// `n - 1` chronological rows.
    pub rows: Vec<Pattern>,
    pub train_count: usize,
    /// Features of the final observation, used to forecast one step ahead.
    pub next_input: FuzzyFeature,
    pub scaler: MinMaxScaler,
}

impl PatternSet {
    pub fn train(&self) -> &[Pattern] {
        &self.rows[..self.train_count]
    }

    pub fn test(&self) -> &[Pattern] {
        &self.rows[self.train_count..]
    }

    pub fn split_of(&self, row: usize) -> Split {
        if row < self.train_count {
            Split::Train
        } else {
            Split::Test
        }
    }

    /// `forecast_label,interval_index,membership,target_normalized,split`,
    /// one line per pattern plus the out-of-sample row with an empty target.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("forecast_label,interval_index,membership,target_normalized,split\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.forecast_label,
                row.input.interval_index,
                row.input.membership,
                row.target,
                self.split_of(i)
            ));
        }
        out.push_str(&format!(
            "{NEXT_LABEL},{},{},,{}\n",
            self.next_input.interval_index,
            self.next_input.membership,
            Split::Forecast
        ));
        out
    }
}

pub fn build_patterns(
    series: &TimeSeries,
    partition: &IntervalPartition,
    train_fraction: f64,
) -> Result<PatternSet, FuzzifyError> {
    build_patterns_from(series.labels(), series.values(), partition, train_fraction)
}

/// [`build_patterns`] over raw slices, for series shorter than a
/// [`TimeSeries`] allows.
pub fn build_patterns_from(
    labels: &[String],
    values: &[f64],
    partition: &IntervalPartition,
    train_fraction: f64,
) -> Result<PatternSet, FuzzifyError> {
    let scaler = MinMaxScaler::fit(values)?;
    let features = values
        .iter()
        .map(|&y| fuzzify(partition, y))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Pattern> = (1..values.len())
        .map(|t| Pattern {
            forecast_label: labels[t].clone(),
            input: features[t - 1],
            target: scaler.transform(values[t]),
        })
        .collect();
    let (train_count, _) = chronological_split(rows.len(), train_fraction)?;
    Ok(PatternSet {
        rows,
        train_count,
        next_input: *features.last().expect("non-empty series"),
        scaler,
    })
}
