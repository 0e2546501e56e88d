//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on data or runtime errors, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::metrics::evaluate;
use crate::pipeline::{emit_plot_data, partition_series, run_forecast, save_model};
use crate::series::{builtin, load_csv, TimeSeries, ValueColumn, BUILTIN_NAMES};

#[derive(Debug, Parser)]
#[command(
    name = "fuzzy-forecast",
    version,
    about = "Fuzzy time series forecasting with FCM intervals and SVR/MLP"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write report, plot data, patterns and model.
    Forecast {
        #[command(flatten)]
        source: SourceArgs,
        /// Output directory (created if missing).
        #[arg(long, default_value = "forecast-out")]
        out: PathBuf,
    },
    /// Print cluster count, centers and the interval table.
    InspectPartition {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Compute RMSE and SMAPE for actual/predicted columns of a CSV file.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        /// Column with observed values (header name or 0-based index).
        #[arg(long, default_value = "actual")]
        actual: String,
        /// Column with forecasts (header name or 0-based index).
        #[arg(long, default_value = "predicted")]
        predicted: String,
        /// Only rows whose `split` column equals this value.
        #[arg(long)]
        split: Option<String>,
    },
    /// List bundled datasets.
    Datasets,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "series")]
pub struct SeriesSource {
    /// CSV file with one observation per row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Name of a bundled dataset.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub series: SeriesSource,
    /// Value column of the input CSV (header name or 0-based index; default last).
    #[arg(long)]
    pub column: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a config key; repeatable and applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

fn resolve(source: &SourceArgs) -> Result<(TimeSeries, RunConfig), String> {
    let series = match (&source.series.input, &source.series.builtin) {
        (Some(path), _) => {
            let column: ValueColumn = source
                .column
                .as_deref()
                .map_or(ValueColumn::Last, |c| c.parse().expect("infallible"));
            load_csv(path, &column).map_err(|e| format!("input: {e}"))?
        }
        (None, Some(name)) => builtin(name).ok_or_else(|| {
            format!(
                "input: unknown builtin dataset `{name}` (available: {})",
                BUILTIN_NAMES.join(", ")
            )
        })?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    let mut config = match &source.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| format!("config: {e}"))?,
        None => RunConfig::default(),
    };
    for assignment in &source.overrides {
        config
            .apply_override(assignment)
            .map_err(|e| format!("config: {e}"))?;
    }
    Ok((series, config))
}

fn short(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn forecast(source: &SourceArgs, out_dir: &Path, out: &mut dyn Write) -> Result<(), String> {
    let (series, config) = resolve(source)?;
    let report = run_forecast(&series, &config).map_err(|e| e.to_string())?;
    fs::create_dir_all(out_dir).map_err(|e| format!("output: {e}"))?;
    let write = |name: &str, text: String| {
        fs::write(out_dir.join(name), text).map_err(|e| format!("output: {e}"))
    };
    write("report.txt", report.to_text())?;
    write("patterns.csv", report.patterns.to_csv())?;
    emit_plot_data(&report, &out_dir.join("plot.csv")).map_err(|e| format!("output: {e}"))?;
    save_model(&report.model, &out_dir.join("model.txt")).map_err(|e| format!("output: {e}"))?;
    writeln!(out, "{}", report.summary()).map_err(|e| e.to_string())?;
    Ok(())
}

fn inspect_partition(source: &SourceArgs, out: &mut dyn Write) -> Result<(), String> {
    let (series, config) = resolve(source)?;
    let (clusters, model, partition) =
        partition_series(&series, &config).map_err(|e| e.to_string())?;
    let join = |vals: &[f64]| {
        vals.iter()
            .map(|v| short(*v))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let intervals = (1..=partition.len())
        .map(|k| {
            let (lo, hi) = partition.interval(k);
            format!("[{}, {}]", short(lo), short(hi))
        })
        .collect::<Vec<_>>()
        .join("; ");
    let text = format!(
        "clusters: {clusters}\ncenters: {}\nboundaries: {}\nintervals: {intervals}\nfcm: {} iterations, converged {}, sse {}\n\n{}",
        join(&partition.centers),
        join(&partition.boundaries),
        model.iterations_used,
        model.converged,
        model.sse,
        partition.to_table()
    );
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())
}

fn column_index(headers: &csv::StringRecord, spec: &str, fallback: usize) -> Result<usize, String> {
    if let Some(i) = headers.iter().position(|h| h == spec) {
        return Ok(i);
    }
    if let Ok(i) = spec.parse::<usize>() {
        return Ok(i);
    }
    if headers.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Ok(fallback);
    }
    Err(format!("input: unknown column `{spec}`"))
}

fn evaluate_file(
    input: &Path,
    actual: &str,
    predicted: &str,
    split: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), String> {
    if !input.exists() {
        return Err(format!("input: missing file: {}", input.display()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(input)
        .map_err(|e| format!("input: {e}"))?;
    let records = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| format!("input: {e}"))?;
    let Some(first) = records.first() else {
        return Err("input: empty file".into());
    };
    let has_header = first.iter().any(|c| c.parse::<f64>().is_err());
    let a_idx = column_index(first, actual, 0)?;
    let p_idx = column_index(first, predicted, 1)?;
    let split_idx = match split {
        Some(_) if has_header => Some(
            first
                .iter()
                .position(|h| h == "split")
                .ok_or("input: --split needs a `split` column")?,
        ),
        Some(_) => return Err("input: --split needs a header with a `split` column".into()),
        None => None,
    };

    let mut a_vals = Vec::new();
    let mut p_vals = Vec::new();
    for (row, rec) in records.iter().enumerate().skip(usize::from(has_header)) {
        if let (Some(idx), Some(want)) = (split_idx, split) {
            if rec.get(idx) != Some(want) {
                continue;
            }
        }
        let cell = |idx: usize| -> Result<Option<f64>, String> {
            match rec.get(idx).unwrap_or_default() {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .map_err(|_| format!("input: unparseable value `{s}` at row {}", row + 1)),
            }
        };
        if let Some(v) = cell(a_idx)? {
            a_vals.push(v);
        }
        if let Some(v) = cell(p_idx)? {
            p_vals.push(v);
        }
    }
    let result = evaluate(&a_vals, &p_vals).map_err(|e| format!("metrics: {e}"))?;
    writeln!(
        out,
        "n = {}\nRMSE = {:.2}\nSMAPE = {:.2}%",
        result.n, result.rmse, result.smape_percent
    )
    .map_err(|e| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Forecast { source, out: dir } => forecast(source, dir, out),
        Command::InspectPartition { source } => inspect_partition(source, out),
        Command::Evaluate {
            input,
            actual,
            predicted,
            split,
        } => evaluate_file(input, actual, predicted, split.as_deref(), out),
        Command::Datasets => {
            for name in BUILTIN_NAMES {
                let s = builtin(name).expect("listed builtin exists");
                let _ = writeln!(
                    out,
                    "{name}\t{} observations\t{}..{}",
                    s.len(),
                    s.labels()[0],
                    s.labels()[s.len() - 1]
                );
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
