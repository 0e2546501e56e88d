//! End-to-end forecast run: partition, fuzzify, train, predict, evaluate.

use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::config::{RegressorKind, RunConfig};
use crate::fuzzify::{
    build_patterns, denormalize, FuzzifyError, FuzzyFeature, Pattern, PatternSet, Split, NEXT_LABEL,
};
use crate::metrics::{evaluate, EvalResult, MetricsError};
use crate::mlp::{mlp_init, mlp_train, MlpError, MlpModel};
use crate::partitioning::{
    build_intervals, define_uod, fcm_fit, suggest_cluster_count, ClusterModel, FcmParams,
    IntervalPartition, PartitionError,
};
use crate::series::TimeSeries;
use crate::svr::{scale_gamma, svr_train, SvrError, SvrModel, SvrParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Universe,
    ClusterCount,
    Clustering,
    Intervals,
    Patterns,
    Training,
    Prediction,
    Metrics,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Universe => "universe",
            Stage::ClusterCount => "cluster-count",
            Stage::Clustering => "clustering",
            Stage::Intervals => "intervals",
            Stage::Patterns => "patterns",
            Stage::Training => "training",
            Stage::Prediction => "prediction",
            Stage::Metrics => "metrics",
        })
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Fuzzify(#[from] FuzzifyError),
    #[error(transparent)]
    Svr(#[from] SvrError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Error)]
#[error("{stage} stage failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: StageError,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> Result<T, PipelineError>;
}

impl<T, E: Into<StageError>> AtStage<T> for Result<T, E> {
    fn at(self, stage: Stage) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError {
            stage,
            source: e.into(),
        })
    }
}

/// A trained relation learner of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Svr(SvrModel),
    Mlp(MlpModel),
}

impl TrainedModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64, StageError> {
        match self {
            TrainedModel::Svr(m) => Ok(m.predict(x)?),
            TrainedModel::Mlp(m) => Ok(m.predict(x)?),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            TrainedModel::Svr(m) => m.to_text(),
            TrainedModel::Mlp(m) => m.to_text(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("unknown model format `{0}`")]
    UnknownFormat(String),
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<(), ModelIoError> {
    fs::write(path, model.to_text())?;
    Ok(())
}

pub fn parse_model(text: &str) -> Result<TrainedModel, ModelIoError> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let header = lines.first().map(|h| h.trim()).unwrap_or_default();
    match header {
        "svr v1" => SvrModel::from_text_body(&lines[1..])
            .map(TrainedModel::Svr)
            .map_err(ModelIoError::CorruptFile),
        "mlp v1" => MlpModel::from_text_body(&lines[1..])
            .map(TrainedModel::Mlp)
            .map_err(ModelIoError::CorruptFile),
        other => Err(ModelIoError::UnknownFormat(other.to_string())),
    }
}

pub fn load_model(path: &Path) -> Result<TrainedModel, ModelIoError> {
    parse_model(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRecord {
    pub label: String,
    pub actual: f64,
    pub predicted: f64,
    pub split: Split,
    pub input: FuzzyFeature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NextForecast {
    pub predicted: f64,
    pub input: FuzzyFeature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastReport {
    pub config: RunConfig,
    pub cluster_count: usize,
    pub clustering: ClusterModel,
    pub partition: IntervalPartition,
    pub patterns: PatternSet,
    pub model: TrainedModel,
    pub records: Vec<ForecastRecord>,
    pub next: NextForecast,
    pub metrics_train: EvalResult,
    pub metrics_test: EvalResult,
}

impl ForecastReport {
    pub fn train_count(&self) -> usize {
        self.patterns.train_count
    }

    fn split_values(&self, split: Split) -> (Vec<f64>, Vec<f64>) {
        self.records
            .iter()
            .filter(|r| r.split == split)
            .map(|r| (r.actual, r.predicted))
            .unzip()
    }

    /// Key-value summary followed by `[config]`, `[partition]` and
    /// `[forecast]` sections. Numbers use the shortest exact representation.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# fuzzy-forecast report v1\n");
        let kv = |out: &mut String, k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv(&mut out, "regressor", self.config.regressor.to_string());
        kv(&mut out, "uod.lower", self.partition.uod.lower.to_string());
        kv(&mut out, "uod.upper", self.partition.uod.upper.to_string());
        kv(&mut out, "clusters", self.cluster_count.to_string());
        kv(
            &mut out,
            "fcm.iterations",
            self.clustering.iterations_used.to_string(),
        );
        kv(
            &mut out,
            "fcm.converged",
            self.clustering.converged.to_string(),
        );
        kv(&mut out, "fcm.sse", self.clustering.sse.to_string());
        for (name, m) in [("train", &self.metrics_train), ("test", &self.metrics_test)] {
            kv(&mut out, &format!("{name}.n"), m.n.to_string());
            kv(&mut out, &format!("{name}.rmse"), m.rmse.to_string());
            kv(
                &mut out,
                &format!("{name}.smape_percent"),
                m.smape_percent.to_string(),
            );
        }
        kv(
            &mut out,
            "next.interval_index",
            self.next.input.interval_index.to_string(),
        );
        kv(
            &mut out,
            "next.membership",
            self.next.input.membership.to_string(),
        );
        kv(&mut out, "next.predicted", self.next.predicted.to_string());

        out.push_str("\n[config]\n");
        out.push_str(&self.config.to_text());
        out.push_str("\n[partition]\n");
        out.push_str(&self.partition.to_table());
        out.push_str("\n[forecast]\nlabel,actual,predicted,split,interval_index,membership\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.label, r.actual, r.predicted, r.split, r.input.interval_index, r.input.membership
            ));
        }
        out.push_str(&format!(
            "{NEXT_LABEL},,{},{},{},{}\n",
            self.next.predicted,
            Split::Forecast,
            self.next.input.interval_index,
            self.next.input.membership
        ));
        out
    }

    /// One-line metric summary with two decimals.
    pub fn summary(&self) -> String {
        format!(
            "{}: test RMSE {:.2}, SMAPE {:.2}% (n={}); train RMSE {:.2}, SMAPE {:.2}% (n={}); next {:.2}",
            self.config.regressor,
            self.metrics_test.rmse,
            self.metrics_test.smape_percent,
            self.metrics_test.n,
            self.metrics_train.rmse,
            self.metrics_train.smape_percent,
            self.metrics_train.n,
            self.next.predicted
        )
    }
}

/// Universe, cluster count, FCM fit and interval partition for a series.
pub fn partition_series(
    series: &TimeSeries,
    config: &RunConfig,
) -> Result<(usize, ClusterModel, IntervalPartition), PipelineError> {
    let uod = define_uod(series, config.margin_d).at(Stage::Universe)?;
    let clusters = match config.clusters {
        Some(c) => c,
        None => suggest_cluster_count(series.min(), series.max()).at(Stage::ClusterCount)?,
    };
    let params = FcmParams {
        clusters,
        fuzziness: config.fuzziness,
        tol: config.fcm_tol,
        max_iter: config.fcm_max_iter,
        seed: config.fcm_seed(),
        rule: config.fcm_rule,
    };
    let model = fcm_fit(series.values(), &params).at(Stage::Clustering)?;
    let partition = build_intervals(uod, &model.centers).at(Stage::Intervals)?;
    Ok((clusters, model, partition))
}

fn inputs_and_targets(rows: &[Pattern]) -> (Vec<Vec<f64>>, Vec<f64>) {
    rows.iter()
        .map(|r| (r.input.to_input().to_vec(), r.target))
        .unzip()
}

/// Trains the configured regressor on the given rows only.
pub fn train_regressor(rows: &[Pattern], config: &RunConfig) -> Result<TrainedModel, StageError> {
    let (inputs, targets) = inputs_and_targets(rows);
    match config.regressor {
        RegressorKind::Svr => {
            let params = SvrParams {
                cost: config.svr.cost,
                epsilon: config.svr.epsilon,
                kernel: config.svr.kernel_with(scale_gamma(&inputs)),
                kkt_tol: config.svr.kkt_tol,
                max_passes: config.svr.max_passes,
                seed: config.svr_seed(),
            };
            Ok(TrainedModel::Svr(svr_train(&inputs, &targets, &params)?))
        }
        RegressorKind::Mlp => {
            let input_dim = inputs.first().map_or(2, Vec::len);
            let hidden = config.mlp.hidden.unwrap_or(input_dim);
            let init = mlp_init(input_dim, hidden, config.mlp.activation, config.mlp_seed())?;
            let trained = mlp_train(
                init,
                &inputs,
                &targets,
                config.mlp.learning_rate,
                config.mlp.epochs,
            )?;
            Ok(TrainedModel::Mlp(trained.model))
        }
    }
}

pub fn run_forecast(
    series: &TimeSeries,
    config: &RunConfig,
) -> Result<ForecastReport, PipelineError> {
    let (cluster_count, clustering, partition) = partition_series(series, config)?;
    let patterns = build_patterns(series, &partition, config.train_fraction).at(Stage::Patterns)?;
    let model = train_regressor(patterns.train(), config).at(Stage::Training)?;

    let scaler = patterns.scaler;
    let records = patterns
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let predicted = denormalize(model.predict(&row.input.to_input())?, &scaler);
            Ok(ForecastRecord {
                label: row.forecast_label.clone(),
                actual: denormalize(row.target, &scaler),
                predicted,
                split: patterns.split_of(i),
                input: row.input,
            })
        })
        .collect::<Result<Vec<_>, StageError>>()
        .at(Stage::Prediction)?;
    let next = NextForecast {
        predicted: denormalize(
            model
                .predict(&patterns.next_input.to_input())
                .at(Stage::Prediction)?,
            &scaler,
        ),
        input: patterns.next_input,
    };

    let mut report = ForecastReport {
        config: config.clone(),
        cluster_count,
        clustering,
        partition,
        patterns,
        model,
        records,
        next,
        metrics_train: EvalResult {
            rmse: 0.0,
            smape_percent: 0.0,
            n: 0,
        },
        metrics_test: EvalResult {
            rmse: 0.0,
            smape_percent: 0.0,
            n: 0,
        },
    };
    let (a, p) = report.split_values(Split::Train);
    report.metrics_train = evaluate(&a, &p).at(Stage::Metrics)?;
    let (a, p) = report.split_values(Split::Test);
    report.metrics_test = evaluate(&a, &p).at(Stage::Metrics)?;
    Ok(report)
}

/// Plot data for actual vs forecast series.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    /// Index of the first test row among the data rows.
    pub boundary: usize,
    pub rows: Vec<PlotRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub label: String,
    pub actual: Option<f64>,
    pub predicted: f64,
    pub split: Split,
}

pub const PLOT_BOUNDARY_KEY: &str = "# train_test_boundary=";

/// `label,actual,predicted,split` rows in order, then the next-step row with
/// an empty actual. The first line is a comment carrying the index of the
/// first test row.
pub fn plot_csv(report: &ForecastReport) -> String {
    let mut out = format!(
        "{PLOT_BOUNDARY_KEY}{}\nlabel,actual,predicted,split\n",
        report.train_count()
    );
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.label, r.actual, r.predicted, r.split
        ));
    }
    out.push_str(&format!(
        "{NEXT_LABEL},,{},{}\n",
        report.next.predicted,
        Split::Forecast
    ));
    out
}

pub fn emit_plot_data(report: &ForecastReport, path: &Path) -> std::io::Result<()> {
    fs::write(path, plot_csv(report))
}

pub fn read_plot_data(path: &Path) -> Result<PlotData, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let boundary = lines
        .next()
        .and_then(|l| l.strip_prefix(PLOT_BOUNDARY_KEY))
        .and_then(|v| v.trim().parse().ok())
        .ok_or("missing boundary comment")?;
    if lines.next() != Some("label,actual,predicted,split") {
        return Err("missing column header".into());
    }
    let rows = lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(format!("bad row `{line}`"));
            }
            let actual = if f[1].is_empty() {
                None
            } else {
                Some(f[1].parse().map_err(|_| format!("bad actual `{}`", f[1]))?)
            };
            Ok(PlotRow {
                label: f[0].to_string(),
                actual,
                predicted: f[2]
                    .parse()
                    .map_err(|_| format!("bad prediction `{}`", f[2]))?,
                split: f[3].parse()?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(PlotData { boundary, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::builtin_enrollment;

    fn enrollment_config() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.set("margin_d", "8").unwrap();
        cfg.set("clusters", "7").unwrap();
        cfg
    }

    #[test]
    fn stage_errors_are_tagged() {
        let flat = TimeSeries::from_values(vec![3.0; 5]).unwrap();
        let mut cfg = RunConfig::default();
        cfg.set("margin_d", "1").unwrap();
        cfg.set("clusters", "2").unwrap();
        let err = run_forecast(&flat, &cfg).unwrap_err();
        assert_eq!(err.stage, Stage::Clustering);
        assert!(err.to_string().starts_with("clustering stage failed"));
    }

    #[test]
    fn report_shape() {
        let report = run_forecast(&builtin_enrollment(), &enrollment_config()).unwrap();
        assert_eq!(report.records.len(), 21);
        assert_eq!(report.metrics_train.n, 16);
        assert_eq!(report.metrics_test.n, 5);
        assert_eq!(report.records[0].label, "1972");
        assert_eq!(report.records[0].actual, 13563.0);
        let text = report.to_text();
        assert!(text.contains("\n[config]\nmargin_d = 8\nclusters = 7\n"));
        assert!(text.contains(
            "\n[forecast]\nlabel,actual,predicted,split,interval_index,membership\n1972,13563,"
        ));
    }

    #[test]
    fn model_format_errors() {
        assert!(
            matches!(parse_model("svr v999\nlinear\n"), Err(ModelIoError::UnknownFormat(h)) if h == "svr v999")
        );
        assert!(matches!(
            parse_model("svr v1\nlinear\n"),
            Err(ModelIoError::CorruptFile(_))
        ));
        assert!(matches!(
            parse_model(""),
            Err(ModelIoError::UnknownFormat(_))
        ));
        assert!(matches!(
            parse_model("mlp v1\n2,2\ntanh\n1,2\n"),
            Err(ModelIoError::CorruptFile(_))
        ));
    }

    #[test]
    fn plot_rows() {
        let report = run_forecast(&builtin_enrollment(), &enrollment_config()).unwrap();
        let csv = plot_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# train_test_boundary=16");
        assert_eq!(lines.len(), 2 + 21 + 1);
        assert!(lines[23].starts_with("next,,"));
    }
}
