//! Report generation: comparison files, simple SVG plots, and the
//! discrepancy analysis between refitted models and the bundled reference
//! models.
//!
//! A report run writes seven files into the output directory:
//!
//! ```text
//! points.csv       extracted (power, time) points, full precision
//! points.svg       scatter plot of the points
//! curves.csv       fitted models sampled over the power range
//! curves.svg       fitted curves over the scatter
//! comparison.csv   observed vs predicted (best model) per point
//! comparison.svg   prediction error sticks per point
//! discrepancy.txt  refit vs reference coefficients and optima
//! ```
//!
//! All output is a deterministic function of the store contents and the
//! options, byte for byte; floats in CSV files use shortest round-trip
//! formatting and `read_scatter(points.csv)` reproduces the extracted
//! dataset exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::optimizer::{minimize_analytic, OptimizationResult, Range, DEFAULT_RANGE};
use crate::polyfit::{deviation, fit, select_best, FitReport, PolynomialModel};
use crate::reference::{
    reference_by_label, REFERENCE_DEVIATIONS, REFERENCE_OPTIMA,
};
use crate::store::{Dataset, QueryFilter, Store};

/// Fewest samples per fitted curve in `curves.csv`; below this the plots
/// visibly segment.
pub const MIN_CURVE_SAMPLES: usize = 200;

#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Degrees to fit and plot.
    pub degrees: Vec<usize>,
    /// Power range for curve sampling and optimum computation.
    pub range: Range,
    /// Samples per curve; at least [`MIN_CURVE_SAMPLES`].
    pub curve_samples: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            degrees: vec![1, 2, 3],
            range: DEFAULT_RANGE,
            curve_samples: 256,
        }
    }
}

/// Refit coefficients next to the reference coefficients of the same degree.
#[derive(Debug, Clone)]
pub struct CoefficientComparison {
    pub label: &'static str,
    pub degree: usize,
    /// Ascending coefficients of the model refitted from the stored data.
    pub refit: Vec<f64>,
    /// Ascending coefficients of the bundled reference model.
    pub reference: Vec<f64>,
    /// RMSE of the refit over the data it was fitted to.
    pub refit_rmse: f64,
    /// RMSE of the reference model over that same data.
    pub reference_rmse: f64,
    /// Deviation claimed for the reference model (root sum of squares over
    /// an unpublished validation series).
    pub claimed_deviation: f64,
}

/// A claimed optimum next to what the reference model actually yields.
#[derive(Debug, Clone)]
pub struct OptimumComparison {
    pub label: &'static str,
    pub claimed_power_w: f64,
    pub claimed_time_s: f64,
    /// The reference model evaluated at the claimed power.
    pub model_time_at_claimed_power: f64,
    /// Analytic minimum of the reference model over the report range.
    pub computed: OptimizationResult,
}

#[derive(Debug, Clone)]
pub struct Discrepancy {
    pub coefficients: Vec<CoefficientComparison>,
    pub optima: Vec<OptimumComparison>,
}

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub dataset: Dataset,
    pub fits: Vec<FitReport>,
    /// Degrees that could not be fitted, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub best_degree: usize,
    pub discrepancy: Discrepancy,
    pub files: Vec<PathBuf>,
}

/// Builds the discrepancy analysis: for every fitted degree with a bundled
/// reference counterpart, the coefficient comparison; for every reference
/// model, its claimed optimum against its analytically computed minimum
/// over the range.
pub fn discrepancy_report(
    fits: &[FitReport],
    data: &Dataset,
    range: &Range,
) -> Result<Discrepancy> {
    let mut coefficients = Vec::new();
    for (label, claimed_deviation) in REFERENCE_DEVIATIONS {
        let reference = reference_by_label(label).expect("label is bundled");
        let Some(report) = fits.iter().find(|f| f.model.degree() == reference.degree())
        else {
            continue;
        };
        coefficients.push(CoefficientComparison {
            label,
            degree: reference.degree(),
            refit: report.model.coefficients().to_vec(),
            reference: reference.coefficients().to_vec(),
            refit_rmse: report.deviation,
            reference_rmse: deviation(&reference, data)?,
            claimed_deviation,
        });
    }

    let mut optima = Vec::new();
    for claimed in REFERENCE_OPTIMA {
        let reference = reference_by_label(claimed.label).expect("label is bundled");
        optima.push(OptimumComparison {
            label: claimed.label,
            claimed_power_w: claimed.power_w,
            claimed_time_s: claimed.time_s,
            model_time_at_claimed_power: reference.evaluate(claimed.power_w),
            computed: minimize_analytic(&reference, range)?,
        });
    }
    Ok(Discrepancy {
        coefficients,
        optima,
    })
}

/// Coefficient display format used across the tool: 10 significant digits.
pub fn format_coefficient(value: f64) -> String {
    format!("{value:.9e}")
}

/// Renders `a0 + a1 P + a2 P^2 + ...` with explicit signs.
pub fn polynomial_text(coeffs: &[f64]) -> String {
    let mut out = String::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if k == 0 {
            out.push_str(&format_coefficient(c));
        } else if c >= 0.0 {
            let _ = write!(out, " + {}", format_coefficient(c));
        } else {
            let _ = write!(out, " - {}", format_coefficient(-c));
        }
        match k {
            0 => {}
            1 => out.push_str(" P"),
            _ => {
                let _ = write!(out, " P^{k}");
            }
        }
    }
    out
}

fn nice(value: f64) -> String {
    let s = format!("{value:.2}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

/// Renders the discrepancy analysis as the text that goes into
/// `discrepancy.txt`.
pub fn render_discrepancy(d: &Discrepancy, dataset: &Dataset, range: &Range) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "DISCREPANCY REPORT");
    let _ = writeln!(out, "==================");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "dataset: {} ({} points)",
        dataset.label,
        dataset.points.len()
    );
    let _ = writeln!(
        out,
        "admissible power range: {} .. {} W",
        nice(range.lo()),
        nice(range.hi())
    );
    let _ = writeln!(out);

    let _ = writeln!(out, "Refit vs reference coefficients");
    let _ = writeln!(out, "-------------------------------");
    for c in &d.coefficients {
        let _ = writeln!(out, "{} (degree {})", c.label, c.degree);
        let _ = writeln!(out, "  refit:     t(P) = {}", polynomial_text(&c.refit));
        let _ = writeln!(out, "  reference: t(P) = {}", polynomial_text(&c.reference));
        let _ = writeln!(
            out,
            "  RMSE over this dataset: refit {:.4} s, reference {:.4} s",
            c.refit_rmse, c.reference_rmse
        );
        let _ = writeln!(
            out,
            "  claimed validation deviation (root sum of squares): {:.4} s",
            c.claimed_deviation
        );
        let _ = writeln!(out);
    }

    let _ = writeln!(out, "Claimed optima vs computed minima");
    let _ = writeln!(out, "---------------------------------");
    for o in &d.optima {
        let _ = writeln!(out, "{}", o.label);
        let _ = writeln!(
            out,
            "  claimed:  P = {:.4} W, t = {:.4} s",
            o.claimed_power_w, o.claimed_time_s
        );
        let _ = writeln!(
            out,
            "  model value at claimed P: {:.4} s",
            o.model_time_at_claimed_power
        );
        let validity = if o.computed.physically_valid {
            ""
        } else {
            " (not physically valid)"
        };
        let _ = writeln!(
            out,
            "  computed minimum: P = {:.4} W, t = {:.4} s{}",
            o.computed.argmin_p, o.computed.min_value, validity
        );
        let _ = writeln!(out);
    }

    let _ = writeln!(
        out,
        "Note: the claimed optima do not lie on their own models; the model\n\
         value at each claimed power differs from the claimed time, and the\n\
         computed minimum sits elsewhere in the range. The claimed deviations\n\
         refer to a validation series that is not part of the bundled data,\n\
         so they cannot be recomputed here. Both sides are reported verbatim."
    );
    out
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

const SVG_W: f64 = 720.0;
const SVG_H: f64 = 480.0;
const ML: f64 = 74.0;
const MR: f64 = 24.0;
const MT: f64 = 42.0;
const MB: f64 = 54.0;

/// Minimal hand-rolled SVG line/scatter plot with fixed layout.
struct SvgPlot {
    body: String,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl SvgPlot {
    fn new(title: &str, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) -> SvgPlot {
        let pad = |lo: f64, hi: f64| -> (f64, f64) {
            if lo == hi {
                (lo - 1.0, hi + 1.0)
            } else {
                let margin = (hi - lo) * 0.04;
                (lo - margin, hi + margin)
            }
        };
        let (x0, x1) = pad(x_range.0, x_range.1);
        let (y0, y1) = pad(y_range.0, y_range.1);
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
             viewBox=\"0 0 {SVG_W} {SVG_H}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(
            body,
            "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"#ffffff\"/>"
        );
        let _ = writeln!(
            body,
            "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            SVG_W / 2.0,
            title
        );

        let mut plot = SvgPlot { body, x0, x1, y0, y1 };

        // gridlines and tick labels at 5 evenly spaced values per axis
        for i in 0..=4 {
            let fx = plot.x0 + (plot.x1 - plot.x0) * i as f64 / 4.0;
            let fy = plot.y0 + (plot.y1 - plot.y0) * i as f64 / 4.0;
            let (px, _) = plot.map(fx, plot.y0);
            let (_, py) = plot.map(plot.x0, fy);
            let _ = writeln!(
                plot.body,
                "<line x1=\"{px:.2}\" y1=\"{MT}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>",
                SVG_H - MB
            );
            let _ = writeln!(
                plot.body,
                "<line x1=\"{ML}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\"/>",
                SVG_W - MR
            );
            let _ = writeln!(
                plot.body,
                "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                SVG_H - MB + 18.0,
                nice(fx)
            );
            let _ = writeln!(
                plot.body,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                ML - 8.0,
                py + 4.0,
                nice(fy)
            );
        }

        // axes over the grid
        let _ = writeln!(
            plot.body,
            "<line x1=\"{ML}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000000\"/>",
            SVG_H - MB,
            SVG_W - MR,
            SVG_H - MB
        );
        let _ = writeln!(
            plot.body,
            "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.2}\" stroke=\"#000000\"/>",
            SVG_H - MB
        );
        let _ = writeln!(
            plot.body,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            ML + (SVG_W - ML - MR) / 2.0,
            SVG_H - 14.0,
            x_label
        );
        let _ = writeln!(
            plot.body,
            "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" \
             transform=\"rotate(-90 18 {:.2})\">{}</text>",
            MT + (SVG_H - MT - MB) / 2.0,
            MT + (SVG_H - MT - MB) / 2.0,
            y_label
        );
        plot
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = ML + (x - self.x0) / (self.x1 - self.x0) * (SVG_W - ML - MR);
        let py = SVG_H - MB - (y - self.y0) / (self.y1 - self.y0) * (SVG_H - MT - MB);
        (px, py)
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str) {
        let mut attr = String::new();
        for &(x, y) in points {
            let (px, py) = self.map(x, y);
            let _ = write!(attr, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            attr.trim_end()
        );
    }

    fn circles(&mut self, points: &[(f64, f64)], color: &str) {
        for &(x, y) in points {
            let (px, py) = self.map(x, y);
            let _ = writeln!(
                self.body,
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3.5\" fill=\"{color}\"/>"
            );
        }
    }

    fn segment(&mut self, from: (f64, f64), to: (f64, f64), color: &str) {
        let (x1, y1) = self.map(from.0, from.1);
        let (x2, y2) = self.map(to.0, to.1);
        let _ = writeln!(
            self.body,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
             stroke=\"{color}\" stroke-width=\"1\"/>"
        );
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = MT + 14.0 + 18.0 * i as f64;
            let x = SVG_W - MR - 150.0;
            let _ = writeln!(
                self.body,
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>",
                y - 10.0
            );
            let _ = writeln!(
                self.body,
                "<text x=\"{:.2}\" y=\"{y:.2}\">{label}</text>",
                x + 18.0
            );
        }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn extent<I: Iterator<Item = f64>>(values: I) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn scatter_csv(data: &Dataset) -> String {
    let mut out = format!("# label: {}\npower_w,time_s\n", data.label);
    for &(p, t) in &data.points {
        let _ = writeln!(out, "{p},{t}");
    }
    out
}

/// Reads a `points.csv` written by a report back into a dataset, exactly.
pub fn read_scatter(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut label = String::new();
    let mut points = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("# label: ") {
            label = rest.to_string();
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        if !seen_header {
            if trimmed != "power_w,time_s" {
                return Err(Error::BadHeader {
                    expected: "power_w,time_s".to_string(),
                    found: trimmed.to_string(),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::FieldCount {
                line: line_no,
                expected: 2,
                found: fields.len(),
            });
        }
        let parse = |text: &str, field: &'static str| -> Result<f64> {
            text.parse().map_err(|_| Error::NumberParse {
                line: line_no,
                field,
                text: text.to_string(),
            })
        };
        points.push((parse(fields[0], "power_w")?, parse(fields[1], "time_s")?));
    }
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset { points, label })
}

fn scatter_svg(data: &Dataset) -> String {
    let (x_lo, x_hi) = extent(data.points.iter().map(|&(p, _)| p));
    let (y_lo, y_hi) = extent(data.points.iter().map(|&(_, t)| t));
    let mut plot = SvgPlot::new(
        &format!("machining time vs power ({})", data.label),
        "power, W",
        "time, s",
        (x_lo, x_hi),
        (y_lo, y_hi),
    );
    plot.circles(&data.points, PALETTE[0]);
    plot.finish()
}

fn curve_samples(model: &PolynomialModel, range: &Range, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let p = if i == n - 1 {
                range.hi()
            } else {
                range.lo() + range.width() * i as f64 / (n - 1) as f64
            };
            (p, model.evaluate(p))
        })
        .collect()
}

fn curves_csv(fits: &[FitReport], range: &Range, n: usize) -> String {
    let mut out = String::from("power_w");
    for f in fits {
        let _ = write!(out, ",degree_{}", f.model.degree());
    }
    out.push('\n');
    for i in 0..n {
        let p = if i == n - 1 {
            range.hi()
        } else {
            range.lo() + range.width() * i as f64 / (n - 1) as f64
        };
        let _ = write!(out, "{p}");
        for f in fits {
            let _ = write!(out, ",{}", f.model.evaluate(p));
        }
        out.push('\n');
    }
    out
}

fn curves_svg(data: &Dataset, fits: &[FitReport], range: &Range, n: usize) -> String {
    let sampled: Vec<(usize, Vec<(f64, f64)>)> = fits
        .iter()
        .map(|f| (f.model.degree(), curve_samples(&f.model, range, n)))
        .collect();
    let (mut y_lo, mut y_hi) = extent(data.points.iter().map(|&(_, t)| t));
    for (_, points) in &sampled {
        let (lo, hi) = extent(points.iter().map(|&(_, t)| t));
        y_lo = y_lo.min(lo);
        y_hi = y_hi.max(hi);
    }
    let (x_lo, x_hi) = {
        let (d_lo, d_hi) = extent(data.points.iter().map(|&(p, _)| p));
        (d_lo.min(range.lo()), d_hi.max(range.hi()))
    };
    let mut plot = SvgPlot::new(
        &format!("fitted models ({})", data.label),
        "power, W",
        "time, s",
        (x_lo, x_hi),
        (y_lo, y_hi),
    );
    let mut legend = vec![("measurements".to_string(), PALETTE[0])];
    for (i, (degree, points)) in sampled.iter().enumerate() {
        let color = PALETTE[(i + 1) % PALETTE.len()];
        plot.polyline(points, color);
        legend.push((format!("degree {degree}"), color));
    }
    plot.circles(&data.points, PALETTE[0]);
    plot.legend(&legend);
    plot.finish()
}

fn comparison_csv(data: &Dataset, best: &FitReport) -> String {
    let mut out = String::from("power_w,observed_s,predicted_s,residual_s\n");
    for &(p, t) in &data.points {
        let predicted = best.model.evaluate(p);
        let _ = writeln!(out, "{p},{t},{predicted},{}", predicted - t);
    }
    out
}

fn comparison_svg(data: &Dataset, best: &FitReport) -> String {
    let predicted: Vec<(f64, f64)> = data
        .points
        .iter()
        .map(|&(p, _)| (p, best.model.evaluate(p)))
        .collect();
    let (x_lo, x_hi) = extent(data.points.iter().map(|&(p, _)| p));
    let (y_lo, y_hi) = extent(
        data.points
            .iter()
            .map(|&(_, t)| t)
            .chain(predicted.iter().map(|&(_, t)| t)),
    );
    let mut plot = SvgPlot::new(
        &format!(
            "observed vs degree {} prediction ({})",
            best.model.degree(),
            data.label
        ),
        "power, W",
        "time, s",
        (x_lo, x_hi),
        (y_lo, y_hi),
    );
    for (&(p, observed), &(_, modeled)) in data.points.iter().zip(&predicted) {
        plot.segment((p, observed), (p, modeled), "#999999");
    }
    plot.circles(&data.points, PALETTE[0]);
    plot.circles(&predicted, PALETTE[1]);
    plot.legend(&[
        ("observed".to_string(), PALETTE[0]),
        ("predicted".to_string(), PALETTE[1]),
    ]);
    plot.finish()
}

/// Fits the requested degrees to the filtered store contents and writes the
/// full report file set. Nothing is written until every computation has
/// succeeded, so an empty store (or an unfittable dataset) produces an error
/// and no files.
pub fn write_report(
    store: &Store,
    filter: &QueryFilter,
    out_dir: impl AsRef<Path>,
    options: &ReportOptions,
) -> Result<ReportSummary> {
    if options.curve_samples < MIN_CURVE_SAMPLES {
        return Err(Error::InvalidParameter {
            parameter: "curve_samples",
            requirement: "at least 200",
            value: options.curve_samples as f64,
        });
    }
    let dataset = store.dataset(filter)?;

    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for &degree in &options.degrees {
        match fit(&dataset, degree) {
            Ok(report) => fits.push(report),
            Err(e @ Error::TooFewPoints { .. }) => skipped.push((degree, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    let best = select_best(&fits, None)?;
    let best_degree = best.model.degree();
    let discrepancy = discrepancy_report(&fits, &dataset, &options.range)?;

    let rendered = [
        ("points.csv", scatter_csv(&dataset)),
        ("points.svg", scatter_svg(&dataset)),
        (
            "curves.csv",
            curves_csv(&fits, &options.range, options.curve_samples),
        ),
        (
            "curves.svg",
            curves_svg(&dataset, &fits, &options.range, options.curve_samples),
        ),
        ("comparison.csv", comparison_csv(&dataset, best)),
        ("comparison.svg", comparison_svg(&dataset, best)),
        (
            "discrepancy.txt",
            render_discrepancy(&discrepancy, &dataset, &options.range),
        ),
    ];

    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let mut files = Vec::new();
    for (name, content) in rendered {
        let path = out_dir.join(name);
        fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
        files.push(path);
    }

    Ok(ReportSummary {
        dataset,
        fits,
        skipped,
        best_degree,
        discrepancy,
        files,
    })
}
