//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for input, parse and I/O errors, 3 for domain
//! errors (degenerate class, mismatched populations).

pub mod input;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{compare, ComparisonReport, DeltaScale};
use crate::confusion::{confusion_from_labels, ConfusionMatrix};
use crate::error::Error;
use crate::heatmap::{self, DEFAULT_SIGNIFICANT_DIGITS, DEFAULT_STEPS};
use crate::metrics::{evaluate_all, MetricId, MetricReport};
use crate::repro::{self, format_fixed};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] Error),

    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: Error },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let inner = match self {
            CliError::Domain(e) | CliError::File { source: e, .. } => e,
            CliError::Io { .. } | CliError::Usage(_) => return 2,
        };
        match inner {
            Error::DegenerateClass { .. }
            | Error::MismatchedPopulation { .. }
            | Error::UndefinedSensitivity => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "hmnc",
    version,
    about = "Confusion-matrix metrics for imbalanced binary classification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every metric on one confusion matrix.
    Compute(ComputeArgs),
    /// Compare two or more classifiers evaluated on the same population.
    Compare(CompareArgs),
    /// Write a metric heat-map grid over the (TP, TN) lattice.
    Heatmap(HeatmapArgs),
    /// Regenerate the published comparison tables and heat-map data.
    Repro(ReproArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Decimal places in text output.
    #[arg(long, default_value_t = 2)]
    pub rounding: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long, default_value = "1")]
    pub positive_label: String,
    /// Defaults to the only label other than the positive one.
    #[arg(long)]
    pub negative_label: Option<String>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[arg(long, allow_negative_numbers = true, requires_all = ["tn", "fp", "fn_"], conflicts_with = "from_csv")]
    pub tp: Option<i64>,
    #[arg(long, allow_negative_numbers = true, requires = "tp")]
    pub tn: Option<i64>,
    #[arg(long, allow_negative_numbers = true, requires = "tp")]
    pub fp: Option<i64>,
    #[arg(long = "fn", allow_negative_numbers = true, requires = "tp")]
    pub fn_: Option<i64>,
    /// Prediction file with header `actual,predicted`.
    #[arg(long)]
    pub from_csv: Option<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Counts `TP,TN,FP,FN` of one method; repeat for each method.
    #[arg(
        long = "method",
        value_name = "TP,TN,FP,FN",
        conflicts_with = "from_csv"
    )]
    pub methods: Vec<String>,
    /// Prediction file of one method; repeat for each method.
    #[arg(long)]
    pub from_csv: Vec<PathBuf>,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub metric: MetricId,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub tp_steps: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub tn_steps: usize,
    /// Significant digits of grid values.
    #[arg(long, default_value_t = DEFAULT_SIGNIFICANT_DIGITS)]
    pub digits: usize,
    /// Grid file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script rendering the grid file.
    #[arg(long, requires = "out")]
    pub plot_script: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReproTarget {
    Tables,
    Figures,
    All,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    #[arg(value_enum, default_value_t = ReproTarget::All)]
    pub target: ReproTarget,
    /// Output directory.
    #[arg(long, default_value = "repro")]
    pub out: PathBuf,
    /// Decimal places in the rendered tables.
    #[arg(long, default_value_t = 2)]
    pub rounding: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_SIGNIFICANT_DIGITS)]
    pub digits: usize,
    /// Write a gnuplot script next to each grid file.
    #[arg(long)]
    pub plot_scripts: bool,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Compute(args) => run_compute(&args, stdout),
        Command::Compare(args) => run_compare(&args, stdout),
        Command::Heatmap(args) => run_heatmap(&args, stdout),
        Command::Repro(args) => run_repro(&args, stdout),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, contents),
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn matrix_from_file(path: &Path, labels: &LabelArgs) -> CliResult<ConfusionMatrix> {
    let data = input::read_predictions_file(
        path,
        &labels.positive_label,
        labels.negative_label.as_deref(),
    )?;
    confusion_from_labels(&data).map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `TP,TN,FP,FN`.
pub fn parse_counts(spec: &str) -> CliResult<ConfusionMatrix> {
    let fields: Vec<&str> = spec.split(',').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(CliError::Usage(format!(
            "expected TP,TN,FP,FN, got {spec:?}"
        )));
    }
    let mut counts = [0i64; 4];
    for (slot, field) in counts.iter_mut().zip(&fields) {
        *slot = field
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid count {field:?} in {spec:?}")))?;
    }
    Ok(ConfusionMatrix::from_signed(
        counts[0], counts[1], counts[2], counts[3],
    )?)
}

pub fn run_compute(args: &ComputeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let cm = match (&args.from_csv, args.tp, args.tn, args.fp, args.fn_) {
        (Some(path), None, ..) => matrix_from_file(path, &args.labels)?,
        (None, Some(tp), Some(tn), Some(fp), Some(fn_)) => {
            ConfusionMatrix::from_signed(tp, tn, fp, fn_)?
        }
        _ => {
            return Err(CliError::Usage(
                "give either --tp/--tn/--fp/--fn or --from-csv".into(),
            ))
        }
    };
    let report = evaluate_all(&cm);
    let rendered = match args.output.format {
        Format::Text => render_report_text(&report, args.output.rounding),
        Format::Csv => render_report_csv(&report),
        Format::Json => to_json(&report),
    };
    emit(args.output.out.as_deref(), stdout, &rendered)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_report_text(report: &MetricReport, places: usize) -> String {
    let cm = &report.matrix;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "TP = {}, TN = {}, FP = {}, FN = {}",
        cm.tp(),
        cm.tn(),
        cm.fp(),
        cm.fn_()
    );
    let _ = writeln!(
        out,
        "P = {}, N = {}, M = {}, IR = {}",
        cm.p(),
        cm.n(),
        cm.m(),
        format_fixed(report.ir, places)
    );
    out.push('\n');
    for (id, value) in report.values.iter() {
        let _ = writeln!(
            out,
            "{:<8}{:>width$}",
            id.name(),
            format_fixed(value, places),
            width = places + 4
        );
    }
    out
}

pub fn render_report_csv(report: &MetricReport) -> String {
    let mut out = String::from("metric,value\n");
    for (id, value) in report.values.iter() {
        let _ = writeln!(out, "{},{value}", id.name());
    }
    let _ = writeln!(out, "IR,{}", report.ir);
    out
}

#[derive(Debug, Serialize)]
struct ComparisonOutput<'a> {
    methods: Vec<MetricReport>,
    comparisons: Vec<PairOutput<'a>>,
}

#[derive(Debug, Serialize)]
struct PairOutput<'a> {
    left: usize,
    right: usize,
    report: &'a ComparisonReport,
}

pub fn run_compare(args: &CompareArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let matrices: Vec<ConfusionMatrix> = if !args.methods.is_empty() {
        args.methods
            .iter()
            .map(|m| parse_counts(m))
            .collect::<CliResult<_>>()?
    } else {
        args.from_csv
            .iter()
            .map(|path| matrix_from_file(path, &args.labels))
            .collect::<CliResult<_>>()?
    };
    if matrices.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two methods (--method or --from-csv, repeated)".into(),
        ));
    }
    let mut comparisons = Vec::new();
    for i in 0..matrices.len() {
        for j in i + 1..matrices.len() {
            comparisons.push((i, j, compare(&matrices[i], &matrices[j])?));
        }
    }
    let reports: Vec<MetricReport> = matrices.iter().map(evaluate_all).collect();

    let rendered = match args.output.format {
        Format::Text => {
            let first = &reports[0];
            let title = format!(
                "Comparison: P = {}, N = {}, IR = {}",
                first.matrix.p(),
                first.matrix.n(),
                format_fixed(first.ir, args.output.rounding.max(2))
            );
            let mut text = repro::render_comparison_table(
                &title,
                &reports,
                &comparisons,
                args.output.rounding,
            );
            text.push_str("MCC and Kappa deltas are measured after mapping [-1, 1] onto [0, 1].\n");
            text
        }
        Format::Csv => render_comparison_csv(&reports, &comparisons),
        Format::Json => to_json(&ComparisonOutput {
            methods: reports.clone(),
            comparisons: comparisons
                .iter()
                .map(|(left, right, report)| PairOutput {
                    left: left + 1,
                    right: right + 1,
                    report,
                })
                .collect(),
        }),
    };
    emit(args.output.out.as_deref(), stdout, &rendered)
}

fn render_comparison_csv(
    reports: &[MetricReport],
    comparisons: &[(usize, usize, ComparisonReport)],
) -> String {
    let mut out = String::from("row,metric,value,unit_delta,profile\n");
    for (i, report) in reports.iter().enumerate() {
        for (id, value) in report.values.iter() {
            let _ = writeln!(out, "M{},{},{value},,", i + 1, id.name());
        }
    }
    for (i, j, report) in comparisons {
        for id in MetricId::ALL {
            let _ = writeln!(
                out,
                "M{}-M{},{},{},{},{}",
                i + 1,
                j + 1,
                id.name(),
                report.delta(id, DeltaScale::Raw),
                report.delta(id, DeltaScale::Unit),
                report.change_profile.as_str()
            );
        }
    }
    out
}

pub fn run_heatmap(args: &HeatmapArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let grid = heatmap::generate_grid(args.metric, args.p, args.n, args.tp_steps, args.tn_steps)?;
    let table = heatmap::grid_to_table(&grid, args.digits);
    emit(args.out.as_deref(), stdout, &table)?;
    if let (Some(script), Some(data)) = (&args.plot_script, &args.out) {
        let image = data.with_extension("png");
        write_file(
            script,
            &heatmap::plot_script(&grid, &data.to_string_lossy(), &image.to_string_lossy()),
        )?;
    }
    Ok(())
}

pub fn run_repro(args: &ReproArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut written = Vec::new();
    if matches!(args.target, ReproTarget::Tables | ReproTarget::All) {
        let tables = repro::reproduce_tables()?;
        for table in &tables {
            let path = args.out.join(format!("table{}.txt", table.number));
            write_file(&path, &repro::render_table(table, args.rounding))?;
            written.push(path);
        }
        let path = args.out.join("summary.txt");
        write_file(&path, &repro::render_summary(&tables))?;
        written.push(path);
    }
    if matches!(args.target, ReproTarget::Figures | ReproTarget::All) {
        for (figure, grid) in repro::figure_grids(args.steps, args.steps)? {
            let stem = format!("figure{figure}_{}", grid.metric().name().to_lowercase());
            let data_name = format!("{stem}.csv");
            let path = args.out.join(&data_name);
            write_file(&path, &heatmap::grid_to_table(&grid, args.digits))?;
            written.push(path);
            if args.plot_scripts {
                // scripts reference files relative to the output directory
                let script = args.out.join(format!("{stem}.gp"));
                write_file(
                    &script,
                    &heatmap::plot_script(&grid, &data_name, &format!("{stem}.png")),
                )?;
                written.push(script);
            }
        }
    }
    let mut listing = String::new();
    for path in &written {
        let _ = writeln!(listing, "wrote {}", path.display());
    }
    emit(None, stdout, &listing)
}
