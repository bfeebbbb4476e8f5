//! Command-line interface. Data goes to stdout, diagnostics and warnings to
//! stderr, and the process exit code is 0 only on full success. All output
//! is deterministic for a given store, arguments, and seed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::optimizer::{
    inverse_solve, minimize_analytic, minimize_controlled_random, minimize_grid,
    minimize_pure_random, OptimizationResult, RandomSearchParams, Range, MAX_ANALYTIC_DEGREE,
};
use crate::polyfit::{deviation_with, fit, DeviationMetric, FitReport, PolynomialModel};
use crate::reference::reference_by_label;
use crate::report::{polynomial_text, write_report, ReportOptions};
use crate::store::{
    parse_csv, parse_csv_lossy, extract_dataset, Dataset, ExperimentRecord, QueryFilter, Store,
    CSV_HEADER,
};

/// Environment variable naming the store file when `--store` is absent.
pub const STORE_ENV_VAR: &str = "ERODE_STORE";

const DEFAULT_STORE_FILE: &str = "erode.store";

#[derive(Parser)]
#[command(
    name = "erode",
    version,
    about = "Store debiting experiments, fit time-vs-power models, optimize working regimes"
)]
struct Cli {
    /// Store file (default: $ERODE_STORE, then ./erode.store)
    #[arg(long, global = true)]
    store: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct FilterArgs {
    /// Match records with this processed object (workpiece) material
    #[arg(long)]
    po_material: Option<String>,
    /// Match records with this transfer object (tool electrode) material
    #[arg(long)]
    to_material: Option<String>,
    /// Match records made on this machine
    #[arg(long)]
    machine: Option<String>,
    /// Match records of this operation
    #[arg(long)]
    operation: Option<String>,
    /// Match records of this working regime
    #[arg(long)]
    regime: Option<String>,
}

impl FilterArgs {
    fn to_filter(&self) -> QueryFilter {
        QueryFilter {
            po_material: self.po_material.clone(),
            to_material: self.to_material.clone(),
            machine: self.machine.clone(),
            operation: self.operation.clone(),
            regime: self.regime.clone(),
        }
    }
}

/// Where the model for optimize/invert comes from; exactly one must be given.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ModelSource {
    /// Load a model from an erode-model file
    #[arg(long)]
    model: Option<PathBuf>,
    /// Use a bundled reference model: linear, quadratic, or cubic
    #[arg(long)]
    reference: Option<String>,
    /// Fit this degree to the (filtered) store contents and use the result
    #[arg(long)]
    degree: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum OutputFormat {
    #[default]
    Text,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
enum MetricArg {
    #[default]
    Rmse,
    /// Root of the sum of squared errors
    Rss,
}

impl From<MetricArg> for DeviationMetric {
    fn from(value: MetricArg) -> Self {
        match value {
            MetricArg::Rmse => DeviationMetric::Rmse,
            MetricArg::Rss => DeviationMetric::RootSumSquares,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq)]
enum MethodArg {
    Analytic,
    Grid,
    PureRandom,
    ControlledRandom,
    #[default]
    All,
}

fn parse_range_arg(text: &str) -> std::result::Result<Range, String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {text:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    Range::new(lo, hi).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Validate records from a CSV file and add them to the store
    Ingest {
        /// CSV file with the standard 9-column header
        csv: PathBuf,
    },
    /// List stored records matching the filters
    Query {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Fit polynomial models to stored measurements and compare deviations
    Fit {
        #[command(flatten)]
        filter: FilterArgs,
        /// Comma-separated degrees to fit
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        degrees: Vec<usize>,
        /// CSV file of validation measurements; deviations are computed on
        /// it instead of on the training data
        #[arg(long)]
        validation: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        metric: MetricArg,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        /// Write the best model to this file in erode-model form
        #[arg(long)]
        save_model: Option<PathBuf>,
    },
    /// Minimize modeled machining time over a power range
    Optimize {
        #[command(flatten)]
        source: ModelSource,
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, value_enum, default_value_t)]
        method: MethodArg,
        /// Admissible power range, watts
        #[arg(long, value_parser = parse_range_arg, default_value = "350:7000")]
        range: Range,
        /// Grid points for the grid method
        #[arg(long, default_value_t = 66_501)]
        grid_points: usize,
        /// Sample count for the pure random method
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Samples per iteration for the controlled random method
        #[arg(long, default_value_t = 16)]
        samples_per_iteration: usize,
        /// Window shrink factor per iteration, in (0, 1)
        #[arg(long, default_value_t = 0.5)]
        shrink_factor: f64,
        /// Window width, watts, at which the controlled search stops
        #[arg(long, default_value_t = 0.1)]
        width_tolerance: f64,
        /// Iteration cap for the controlled random method
        #[arg(long, default_value_t = 64)]
        max_iterations: usize,
        /// Seed for the random methods
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Find power settings at which the model reaches a target time
    Invert {
        #[command(flatten)]
        source: ModelSource,
        #[command(flatten)]
        filter: FilterArgs,
        /// Target machining time, seconds
        #[arg(long)]
        target: f64,
        #[arg(long, value_parser = parse_range_arg, default_value = "350:7000")]
        range: Range,
    },
    /// Write plots, tables, and the discrepancy analysis to a directory
    Report {
        #[command(flatten)]
        filter: FilterArgs,
        /// Output directory, created if missing
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
        degrees: Vec<usize>,
        #[arg(long, value_parser = parse_range_arg, default_value = "350:7000")]
        range: Range,
        /// Samples per plotted curve (at least 200)
        #[arg(long, default_value_t = 256)]
        curve_samples: usize,
    },
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let store_path = resolve_store_path(&cli.store);
    match execute(cli.command, &store_path) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn resolve_store_path(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(STORE_ENV_VAR).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE_FILE))
}

fn execute(command: Command, store_path: &Path) -> Result<i32> {
    match command {
        Command::Ingest { csv } => cmd_ingest(store_path, &csv),
        Command::Query { filter, format } => cmd_query(store_path, &filter.to_filter(), format),
        Command::Fit {
            filter,
            degrees,
            validation,
            metric,
            format,
            save_model,
        } => cmd_fit(
            store_path,
            &filter.to_filter(),
            &degrees,
            validation.as_deref(),
            metric.into(),
            format,
            save_model.as_deref(),
        ),
        Command::Optimize {
            source,
            filter,
            method,
            range,
            grid_points,
            samples,
            samples_per_iteration,
            shrink_factor,
            width_tolerance,
            max_iterations,
            seed,
            format,
        } => {
            let params = RandomSearchParams {
                samples_per_iteration,
                shrink_factor,
                width_tolerance,
                max_iterations,
                seed,
            };
            cmd_optimize(
                store_path,
                &source,
                &filter.to_filter(),
                method,
                &range,
                grid_points,
                samples,
                &params,
                format,
            )
        }
        Command::Invert {
            source,
            filter,
            target,
            range,
        } => cmd_invert(store_path, &source, &filter.to_filter(), target, &range),
        Command::Report {
            filter,
            out,
            degrees,
            range,
            curve_samples,
        } => cmd_report(store_path, &filter.to_filter(), &out, degrees, range, curve_samples),
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn load_store(path: &Path) -> Result<Store> {
    Store::load(path)
}

fn load_or_new_store(path: &Path) -> Result<Store> {
    if path.exists() {
        Store::load(path)
    } else {
        Ok(Store::new())
    }
}

fn cmd_ingest(store_path: &Path, csv_path: &Path) -> Result<i32> {
    let text = read_file(csv_path)?;
    let (records, errors) = parse_csv_lossy(&text);
    if records.is_empty() {
        if let Some(first) = errors.first() {
            if matches!(first, Error::BadHeader { .. }) {
                return Err(Error::BadHeader {
                    expected: CSV_HEADER.to_string(),
                    found: match first {
                        Error::BadHeader { found, .. } => found.clone(),
                        _ => unreachable!(),
                    },
                });
            }
        }
    }

    let mut store = load_or_new_store(store_path)?;
    let mut added = 0usize;
    let mut rejected = 0usize;
    for e in &errors {
        eprintln!("rejected: {e}");
        rejected += 1;
    }
    for record in records {
        match store.add(record) {
            Ok(_) => added += 1,
            Err(e) => {
                eprintln!("rejected: {e}");
                rejected += 1;
            }
        }
    }
    store.save(store_path)?;
    println!("{added} added, {rejected} rejected");
    Ok(if rejected == 0 { 0 } else { 1 })
}

fn format_float(value: f64) -> String {
    format!("{value}")
}

fn render_record_rows(records: &[&ExperimentRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            vec![
                r.id.to_string(),
                r.po_material.clone(),
                r.to_material.clone(),
                r.machine.clone(),
                r.operation.clone(),
                r.regime.clone(),
                format_float(r.voltage_v),
                format_float(r.current_a),
                format_float(r.power_w),
                format_float(r.time_s),
            ]
        })
        .collect()
}

fn print_aligned(headers: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let render = |cells: Vec<&str>| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(&format!("{cell:<width$}", width = widths[i]));
        }
        line.trim_end().to_string()
    };
    println!("{}", render(headers.to_vec()));
    for row in rows {
        println!("{}", render(row.iter().map(String::as_str).collect()));
    }
}

fn cmd_query(store_path: &Path, filter: &QueryFilter, format: OutputFormat) -> Result<i32> {
    let store = load_store(store_path)?;
    let records = store.query(filter);
    eprintln!("matched {} of {} records", records.len(), store.len());
    match format {
        OutputFormat::Csv => {
            println!("id,{CSV_HEADER}");
            for r in &records {
                println!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.id,
                    r.po_material,
                    r.to_material,
                    r.machine,
                    r.operation,
                    r.regime,
                    r.voltage_v,
                    r.current_a,
                    r.power_w,
                    r.time_s
                );
            }
        }
        OutputFormat::Text => {
            let headers = [
                "id",
                "po_material",
                "to_material",
                "machine",
                "operation",
                "regime",
                "voltage_v",
                "current_a",
                "power_w",
                "time_s",
            ];
            print_aligned(&headers, &render_record_rows(&records));
        }
    }
    Ok(0)
}

fn load_validation(path: &Path) -> Result<Dataset> {
    let records = parse_csv(&read_file(path)?)?;
    extract_dataset(&records)
}

struct ScoredFit {
    report: FitReport,
    deviation: f64,
}

/// Fits the requested degrees, skipping (with a warning) degrees the data
/// cannot support, and scores each fit on the evaluation dataset.
fn fit_degrees(
    dataset: &Dataset,
    degrees: &[usize],
    eval_data: &Dataset,
    metric: DeviationMetric,
) -> Result<Vec<ScoredFit>> {
    let mut unique: Vec<usize> = Vec::new();
    for &d in degrees {
        if !unique.contains(&d) {
            unique.push(d);
        }
    }
    let mut scored = Vec::new();
    for degree in unique {
        match fit(dataset, degree) {
            Ok(report) => {
                let deviation = deviation_with(&report.model, eval_data, metric)?;
                scored.push(ScoredFit { report, deviation });
            }
            Err(e @ Error::TooFewPoints { .. }) => {
                eprintln!("warning: degree {degree} skipped: {e}");
            }
            Err(e) => return Err(e),
        }
    }
    if scored.is_empty() {
        return Err(Error::NoReports);
    }
    Ok(scored)
}

fn best_index(scored: &[ScoredFit]) -> usize {
    let mut best = 0;
    for (i, s) in scored.iter().enumerate().skip(1) {
        let current = (s.deviation, s.report.model.degree());
        let incumbent = (scored[best].deviation, scored[best].report.model.degree());
        if current.0.total_cmp(&incumbent.0).then(current.1.cmp(&incumbent.1))
            == std::cmp::Ordering::Less
        {
            best = i;
        }
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(
    store_path: &Path,
    filter: &QueryFilter,
    degrees: &[usize],
    validation: Option<&Path>,
    metric: DeviationMetric,
    format: OutputFormat,
    save_model: Option<&Path>,
) -> Result<i32> {
    let store = load_store(store_path)?;
    let dataset = store.dataset(filter)?;
    let validation_data = validation.map(load_validation).transpose()?;
    let eval_data = validation_data.as_ref().unwrap_or(&dataset);

    eprintln!("dataset: {} ({} points)", dataset.label, dataset.points.len());
    eprintln!(
        "deviation basis: {} ({})",
        if validation_data.is_some() {
            "validation data"
        } else {
            "training data"
        },
        match metric {
            DeviationMetric::Rmse => "rmse",
            DeviationMetric::RootSumSquares => "root sum of squares",
        }
    );

    let scored = fit_degrees(&dataset, degrees, eval_data, metric)?;
    let best = best_index(&scored);

    match format {
        OutputFormat::Text => {
            for (i, s) in scored.iter().enumerate() {
                let marker = if i == best { "  [optimal]" } else { "" };
                println!(
                    "degree {}: deviation {:.4}{marker}",
                    s.report.model.degree(),
                    s.deviation
                );
                println!("  t(P) = {}", polynomial_text(s.report.model.coefficients()));
                println!(
                    "  rss {:.4}  condition {:.4}",
                    s.report.rss, s.report.condition_estimate
                );
            }
        }
        OutputFormat::Csv => {
            let max_degree = scored
                .iter()
                .map(|s| s.report.model.degree())
                .max()
                .expect("non-empty");
            let mut header = String::from("degree,deviation_s,rss,condition_estimate,optimal");
            for k in 0..=max_degree {
                header.push_str(&format!(",c{k}"));
            }
            println!("{header}");
            for (i, s) in scored.iter().enumerate() {
                let mut line = format!(
                    "{},{},{},{},{}",
                    s.report.model.degree(),
                    s.deviation,
                    s.report.rss,
                    s.report.condition_estimate,
                    i == best
                );
                for k in 0..=max_degree {
                    match s.report.model.coefficients().get(k) {
                        Some(c) => line.push_str(&format!(",{c}")),
                        None => line.push(','),
                    }
                }
                println!("{line}");
            }
        }
    }

    if let Some(path) = save_model {
        fs::write(path, scored[best].report.model.to_text())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        eprintln!("model written to {}", path.display());
    }
    Ok(0)
}

fn resolve_model(
    store_path: &Path,
    source: &ModelSource,
    filter: &QueryFilter,
) -> Result<PolynomialModel> {
    if let Some(path) = &source.model {
        return PolynomialModel::from_text(&read_file(path)?);
    }
    if let Some(label) = &source.reference {
        return reference_by_label(label).ok_or(Error::InvalidParameter {
            parameter: "reference",
            requirement: "one of linear, quadratic, cubic",
            value: f64::NAN,
        });
    }
    let degree = source.degree.expect("clap enforces one source");
    let store = load_store(store_path)?;
    let dataset = store.dataset(filter)?;
    let report = fit(&dataset, degree)?;
    eprintln!(
        "fitted degree {} to {} ({} points), training rmse {:.4}",
        degree,
        dataset.label,
        dataset.points.len(),
        report.deviation
    );
    Ok(report.model)
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    store_path: &Path,
    source: &ModelSource,
    filter: &QueryFilter,
    method: MethodArg,
    range: &Range,
    grid_points: usize,
    samples: usize,
    params: &RandomSearchParams,
    format: OutputFormat,
) -> Result<i32> {
    let model = resolve_model(store_path, source, filter)?;

    let mut results: Vec<OptimizationResult> = Vec::new();
    let run_analytic = matches!(method, MethodArg::Analytic | MethodArg::All);
    if run_analytic {
        if model.degree() <= MAX_ANALYTIC_DEGREE {
            results.push(minimize_analytic(&model, range)?);
        } else if method == MethodArg::Analytic {
            return Err(Error::AnalyticUnsupported {
                degree: model.degree(),
            });
        } else {
            eprintln!(
                "note: analytic method skipped (degree {} exceeds {})",
                model.degree(),
                MAX_ANALYTIC_DEGREE
            );
        }
    }
    if matches!(method, MethodArg::Grid | MethodArg::All) {
        results.push(minimize_grid(&model, range, grid_points)?);
    }
    if matches!(method, MethodArg::PureRandom | MethodArg::All) {
        results.push(minimize_pure_random(&model, range, samples, params.seed)?);
    }
    if matches!(method, MethodArg::ControlledRandom | MethodArg::All) {
        results.push(minimize_controlled_random(&model, range, params)?);
    }

    match format {
        OutputFormat::Text => {
            let headers = ["method", "argmin_w", "min_s", "evaluations", "converged", "physically_valid"];
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|r| {
                    vec![
                        r.method.to_string(),
                        format!("{:.4}", r.argmin_p),
                        format!("{:.4}", r.min_value),
                        r.evaluations.to_string(),
                        yes_no(r.converged),
                        yes_no(r.physically_valid),
                    ]
                })
                .collect();
            print_aligned(&headers, &rows);
        }
        OutputFormat::Csv => {
            println!("method,argmin_w,min_s,evaluations,converged,physically_valid");
            for r in &results {
                println!(
                    "{},{},{},{},{},{}",
                    r.method, r.argmin_p, r.min_value, r.evaluations, r.converged, r.physically_valid
                );
            }
        }
    }
    for r in &results {
        if !r.physically_valid {
            eprintln!(
                "warning: {} minimum is not physically valid (non-positive time); \
                 the model is extrapolating beyond its useful range",
                r.method
            );
        }
    }
    Ok(0)
}

fn yes_no(b: bool) -> String {
    String::from(if b { "yes" } else { "no" })
}

fn cmd_invert(
    store_path: &Path,
    source: &ModelSource,
    filter: &QueryFilter,
    target: f64,
    range: &Range,
) -> Result<i32> {
    let model = resolve_model(store_path, source, filter)?;
    let solutions = inverse_solve(&model, target, range);
    eprintln!(
        "{} solution(s) for t = {} s in [{}, {}] W",
        solutions.len(),
        target,
        range.lo(),
        range.hi()
    );
    for p in &solutions {
        println!("{p:.4}");
    }
    Ok(0)
}

fn cmd_report(
    store_path: &Path,
    filter: &QueryFilter,
    out: &Path,
    degrees: Vec<usize>,
    range: Range,
    curve_samples: usize,
) -> Result<i32> {
    let store = load_store(store_path)?;
    let options = ReportOptions {
        degrees,
        range,
        curve_samples,
    };
    let summary = write_report(&store, filter, out, &options)?;
    for (degree, reason) in &summary.skipped {
        eprintln!("warning: degree {degree} skipped: {reason}");
    }
    for s in &summary.fits {
        let marker = if s.model.degree() == summary.best_degree {
            "  [optimal]"
        } else {
            ""
        };
        println!("degree {}: deviation {:.4}{marker}", s.model.degree(), s.deviation);
        println!("  t(P) = {}", polynomial_text(s.model.coefficients()));
    }
    for f in &summary.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(0)
}
