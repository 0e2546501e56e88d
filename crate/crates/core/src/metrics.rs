//! Forecast accuracy: RMSE and symmetric MAPE (in percent).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{actual} actual values but {predicted} predictions")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("no values to evaluate")]
    EmptyInput,
    #[error("actual and predicted are both zero at index {0}")]
    ZeroDenominator(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub rmse: f64,
    pub smape_percent: f64,
    pub n: usize,
}

fn check(actual: &[f64], predicted: &[f64]) -> Result<(), MetricsError> {
    if actual.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    check(actual, predicted)?;
    let mse = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum::<f64>()
        / actual.len() as f64;
    Ok(mse.sqrt())
}

/// `100/n · Σ |y - y'| / ((|y| + |y'|) / 2)`, bounded by 200.
pub fn smape(actual: &[f64], predicted: &[f64]) -> Result<f64, MetricsError> {
    check(actual, predicted)?;
    let mut total = 0.0;
    for (i, (y, p)) in actual.iter().zip(predicted).enumerate() {
        let denom = (y.abs() + p.abs()) / 2.0;
        if denom == 0.0 {
            return Err(MetricsError::ZeroDenominator(i));
        }
        total += (y - p).abs() / denom;
    }
    Ok(100.0 * total / actual.len() as f64)
}

pub fn evaluate(actual: &[f64], predicted: &[f64]) -> Result<EvalResult, MetricsError> {
    Ok(EvalResult {
        rmse: rmse(actual, predicted)?,
        smape_percent: smape(actual, predicted)?,
        n: actual.len(),
    })
}
