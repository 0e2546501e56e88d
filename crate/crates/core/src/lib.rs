//! Fuzzy time series forecasting.
//!
//! The universe of discourse `[y_min - d, y_max + d]` is cut into unequal
//! intervals at the midpoints of fuzzy c-means centers. Each observation
//! becomes `(interval index, position inside the interval)`, and a regressor
//! (epsilon-SVR or a one-hidden-layer perceptron) learns the map from the
//! features at `t - 1` to the min-max normalized value at `t`.
//!
//! ```
//! use fuzzy_forecast::{config::RunConfig, pipeline::run_forecast, series::builtin_enrollment};
//!
//! let mut config = RunConfig::default();
//! config.set("margin_d", "8").unwrap();
//! let report = run_forecast(&builtin_enrollment(), &config).unwrap();
//! assert_eq!(report.cluster_count, 7);
//! assert_eq!(report.metrics_test.n, 5);
//! ```

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod fuzzify;
pub mod metrics;
pub mod mlp;
pub mod partitioning;
pub mod pipeline;
pub mod series;
pub mod svr;
