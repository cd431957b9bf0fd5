//! Published comparison tables and figure settings, and their regeneration.
//!
//! Each table lists four classifiers on a population of P = 1000 positives
//! (the majority class) and N negatives, followed by five pairwise delta rows.
//! Printed values are kept verbatim, two decimals as published.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{compare, ChangeProfile, ComparisonReport, DeltaScale};
use crate::confusion::ConfusionMatrix;
use crate::error::Result;
use crate::heatmap::{generate_grid, HeatmapGrid};
use crate::metrics::{evaluate_all, MetricId, MetricReport};

/// Bumped whenever the embedded table data changes.
pub const FIXTURE_VERSION: u32 = 1;

/// Agreement required between computed and printed two-decimal values.
pub const TABLE_TOLERANCE: f64 = 0.005;

/// Metrics drawn as heat-map panels, one file each per figure.
pub const FIGURE_METRICS: [MetricId; 7] = [
    MetricId::Hmnc,
    MetricId::Acc,
    MetricId::Bacc,
    MetricId::F1,
    MetricId::GMean,
    MetricId::Kappa,
    MetricId::Mcc,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedTable {
    pub number: usize,
    pub p: u64,
    pub n: u64,
    /// `(tp, tn)` of methods Ψ1..Ψ4.
    pub methods: [(u64, u64); 4],
    /// Printed values in [`MetricId::TABLE_COLUMNS`] order.
    pub method_values: [[f64; 7]; 4],
    /// Zero-based method indices of each delta row.
    pub pairs: [(usize, usize); 5],
    pub delta_values: [[f64; 7]; 5],
}

const PAIRS: [(usize, usize); 5] = [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)];

pub const TABLES: [PublishedTable; 3] = [
    PublishedTable {
        number: 1,
        p: 1000,
        n: 10,
        methods: [(500, 5), (700, 5), (700, 7), (500, 7)],
        method_values: [
            [0.5, 0.5, 0.5, 0.0, 0.66, 0.5, 0.0],
            [0.5, 0.7, 0.6, 0.04, 0.82, 0.59, 0.01],
            [0.7, 0.7, 0.7, 0.09, 0.82, 0.7, 0.03],
            [0.7, 0.5, 0.6, 0.04, 0.67, 0.59, 0.01],
        ],
        pairs: PAIRS,
        delta_values: [
            [0.0, 0.2, 0.1, 0.02, 0.16, 0.09, 0.01],
            [0.2, 0.2, 0.2, 0.04, 0.16, 0.09, 0.01],
            [0.2, 0.0, 0.1, 0.02, 0.0, 0.09, 0.0],
            [0.2, 0.0, 0.1, 0.02, 0.0, 0.11, 0.01],
            [0.0, 0.2, 0.1, 0.02, 0.16, 0.11, 0.01],
        ],
    },
    PublishedTable {
        number: 2,
        p: 1000,
        n: 100,
        methods: [(500, 50), (700, 50), (700, 70), (500, 70)],
        method_values: [
            [0.5, 0.5, 0.5, 0.0, 0.65, 0.5, 0.0],
            [0.51, 0.68, 0.6, 0.12, 0.8, 0.59, 0.09],
            [0.7, 0.7, 0.7, 0.24, 0.81, 0.7, 0.18],
            [0.68, 0.52, 0.6, 0.12, 0.65, 0.59, 0.06],
        ],
        pairs: PAIRS,
        delta_values: [
            [0.01, 0.18, 0.1, 0.06, 0.15, 0.09, 0.05],
            [0.2, 0.2, 0.2, 0.12, 0.16, 0.2, 0.09],
            [0.18, 0.02, 0.1, 0.06, 0.01, 0.09, 0.03],
            [0.19, 0.02, 0.1, 0.06, 0.01, 0.11, 0.04],
            [0.02, 0.18, 0.1, 0.06, 0.16, 0.11, 0.06],
        ],
    },
    PublishedTable {
        number: 3,
        p: 1000,
        n: 250,
        methods: [(500, 125), (700, 125), (700, 175), (500, 175)],
        method_values: [
            [0.5, 0.5, 0.5, 0.0, 0.62, 0.5, 0.0],
            [0.53, 0.66, 0.6, 0.17, 0.77, 0.59, 0.16],
            [0.7, 0.7, 0.7, 0.33, 0.79, 0.7, 0.3],
            [0.65, 0.54, 0.6, 0.16, 0.63, 0.59, 0.12],
        ],
        pairs: PAIRS,
        delta_values: [
            [0.03, 0.16, 0.1, 0.08, 0.15, 0.09, 0.08],
            [0.2, 0.2, 0.2, 0.16, 0.17, 0.2, 0.15],
            [0.15, 0.04, 0.1, 0.08, 0.02, 0.09, 0.06],
            [0.17, 0.04, 0.1, 0.08, 0.02, 0.11, 0.07],
            [0.05, 0.16, 0.1, 0.08, 0.15, 0.11, 0.09],
        ],
    },
];

impl PublishedTable {
    pub fn matrices(&self) -> [ConfusionMatrix; 4] {
        self.methods.map(|(tp, tn)| {
            ConfusionMatrix::from_totals(tp, tn, self.p, self.n).expect("fixture counts are valid")
        })
    }
}

/// Rounds to `places` decimals, as printed.
pub fn display_round(value: f64, places: usize) -> f64 {
    let scale = 10f64.powi(places as i32);
    (value * scale).round() / scale
}

/// Formats to `places` decimals without a negative sign on zero.
pub fn format_fixed(value: f64, places: usize) -> String {
    let s = format!("{value:.places$}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub table: usize,
    pub row: String,
    pub metric: MetricId,
    pub printed: f64,
    pub computed: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReproduction {
    pub number: usize,
    pub p: u64,
    pub n: u64,
    pub ir: f64,
    pub reports: Vec<MetricReport>,
    pub comparisons: Vec<(usize, usize, ComparisonReport)>,
    /// Method-row cells: unrounded value within tolerance of the printed one.
    pub method_checks: Vec<CellCheck>,
    /// Delta-row cells: unit-scale delta, rounded to two decimals, within
    /// tolerance of the printed one.
    pub delta_checks: Vec<CellCheck>,
}

impl TableReproduction {
    pub fn all_checks(&self) -> impl Iterator<Item = &CellCheck> {
        self.method_checks.iter().chain(&self.delta_checks)
    }
}

pub fn reproduce_table(table: &PublishedTable) -> Result<TableReproduction> {
    let matrices = table.matrices();
    let reports: Vec<MetricReport> = matrices.iter().map(evaluate_all).collect();
    let mut comparisons = Vec::with_capacity(table.pairs.len());
    for &(i, j) in &table.pairs {
        comparisons.push((i, j, compare(&matrices[i], &matrices[j])?));
    }

    let mut method_checks = Vec::new();
    for (i, (report, printed_row)) in reports.iter().zip(&table.method_values).enumerate() {
        for (&metric, &printed) in MetricId::TABLE_COLUMNS.iter().zip(printed_row) {
            let computed = report.values[metric];
            method_checks.push(CellCheck {
                table: table.number,
                row: format!("Ψ{}", i + 1),
                metric,
                printed,
                computed,
                pass: (computed - printed).abs() <= TABLE_TOLERANCE,
            });
        }
    }

    let mut delta_checks = Vec::new();
    for ((i, j, report), printed_row) in comparisons.iter().zip(&table.delta_values) {
        for (&metric, &printed) in MetricId::TABLE_COLUMNS.iter().zip(printed_row) {
            let computed = report.delta(metric, DeltaScale::Unit);
            delta_checks.push(CellCheck {
                table: table.number,
                row: format!("|Ψ{}−Ψ{}|", i + 1, j + 1),
                metric,
                printed,
                computed,
                pass: (display_round(computed, 2) - printed).abs() <= TABLE_TOLERANCE,
            });
        }
    }

    Ok(TableReproduction {
        number: table.number,
        p: table.p,
        n: table.n,
        ir: reports[0].ir,
        reports,
        comparisons,
        method_checks,
        delta_checks,
    })
}

pub fn reproduce_tables() -> Result<Vec<TableReproduction>> {
    TABLES.iter().map(reproduce_table).collect()
}

fn column_header(metric: MetricId) -> &'static str {
    match metric {
        MetricId::GMean => "G-m",
        MetricId::Kappa => "Kappa",
        other => other.name(),
    }
}

/// Text table in the published layout: method rows, then delta rows.
///
/// Delta rows use the unit scale, on which MCC and Kappa differences are half
/// their raw size.
pub fn render_comparison_table(
    title: &str,
    reports: &[MetricReport],
    comparisons: &[(usize, usize, ComparisonReport)],
    places: usize,
) -> String {
    let width = (places + 4).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:<12}{:>8}{:>8}", "Meth.", "TP", "TN");
    for metric in MetricId::TABLE_COLUMNS {
        let _ = write!(out, "{:>width$}", column_header(metric));
    }
    out.push('\n');
    for (i, report) in reports.iter().enumerate() {
        let _ = write!(
            out,
            "{:<12}{:>8}{:>8}",
            format!("Ψ{}", i + 1),
            report.matrix.tp(),
            report.matrix.tn()
        );
        for metric in MetricId::TABLE_COLUMNS {
            let _ = write!(
                out,
                "{:>width$}",
                format_fixed(report.values[metric], places)
            );
        }
        out.push('\n');
    }
    let _ = writeln!(out, "Absolute value of the difference in measures");
    for (i, j, report) in comparisons {
        let _ = write!(out, "{:<28}", format!("|Ψ{}−Ψ{}|", i + 1, j + 1));
        for metric in MetricId::TABLE_COLUMNS {
            let _ = write!(
                out,
                "{:>width$}",
                format_fixed(report.delta(metric, DeltaScale::Unit), places)
            );
        }
        out.push('\n');
    }
    for (i, j, report) in comparisons {
        let _ = writeln!(
            out,
            "|Ψ{}−Ψ{}|: {}",
            i + 1,
            j + 1,
            verdict(
                report.change_profile,
                report.shared_totals.positive_is_majority()
            )
        );
    }
    out
}

pub fn verdict(profile: ChangeProfile, positive_is_majority: bool) -> String {
    let (majority, minority) = if positive_is_majority {
        ("positive", "negative")
    } else {
        ("negative", "positive")
    };
    match profile {
        ChangeProfile::MajorityOnly => {
            format!("MAJORITY_ONLY (methods differ on the majority, {majority}, class only)")
        }
        ChangeProfile::MinorityOnly => {
            format!("MINORITY_ONLY (methods differ on the minority, {minority}, class only)")
        }
        ChangeProfile::Both => "BOTH (methods differ on both classes)".to_string(),
        ChangeProfile::Neither => "NEITHER (identical correct counts)".to_string(),
    }
}

pub fn render_table(repro: &TableReproduction, places: usize) -> String {
    let title = format!(
        "Table {}: P = {}, N = {}, IR = {}",
        repro.number, repro.p, repro.n, repro.ir
    );
    render_comparison_table(&title, &repro.reports, &repro.comparisons, places)
}

/// Cell-by-cell agreement report against the printed tables.
pub fn render_summary(tables: &[TableReproduction]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Table agreement (fixture version {FIXTURE_VERSION}, tolerance ±{TABLE_TOLERANCE})"
    );
    let _ = writeln!(
        out,
        "Method rows compare unrounded values; delta rows compare unit-scale deltas rounded to 2 decimals."
    );
    let mut method_pass = 0;
    let mut method_total = 0;
    let mut delta_pass = 0;
    let mut delta_total = 0;
    for table in tables {
        let _ = writeln!(
            out,
            "\nTable {} (P = {}, N = {})",
            table.number, table.p, table.n
        );
        for check in &table.method_checks {
            method_total += 1;
            method_pass += usize::from(check.pass);
            write_check(&mut out, check);
        }
        for check in &table.delta_checks {
            delta_total += 1;
            delta_pass += usize::from(check.pass);
            write_check(&mut out, check);
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "method cells: {method_pass}/{method_total} agree");
    let _ = writeln!(out, "delta cells: {delta_pass}/{delta_total} agree");
    out
}

fn write_check(out: &mut String, check: &CellCheck) {
    let _ = writeln!(
        out,
        "{} {:<10} {:<6} printed {:>5} computed {:.6}",
        if check.pass { "PASS" } else { "FAIL" },
        check.row,
        check.metric.name(),
        format_fixed(check.printed, 2),
        check.computed
    );
}

/// Heat-map settings of the three figures: `(figure number, P, N)`.
pub const FIGURES: [(usize, u64, u64); 3] = [(1, 1000, 10), (2, 1000, 100), (3, 1000, 250)];

/// All 21 figure grids as `(figure number, grid)`.
pub fn figure_grids(tp_steps: usize, tn_steps: usize) -> Result<Vec<(usize, HeatmapGrid)>> {
    let mut grids = Vec::with_capacity(FIGURES.len() * FIGURE_METRICS.len());
    for (figure, p, n) in FIGURES {
        for metric in FIGURE_METRICS {
            grids.push((figure, generate_grid(metric, p, n, tp_steps, tn_steps)?));
        }
    }
    Ok(grids)
}
