//! Metric values over the (TP, TN) lattice for fixed class totals.
//!
//! TP runs along the abscissa and TN along the ordinate. Both axes are evenly
//! spaced in class-relative terms and rounded to the nearest whole count, so a
//! class total smaller than the step count yields repeated axis values.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, HmncSurface, Sensitivity};
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::metrics::{imbalance_ratio, MetricId};

pub const DEFAULT_STEPS: usize = 101;
pub const DEFAULT_SIGNIFICANT_DIGITS: usize = 6;

/// Metric values indexed `[tn_index][tp_index]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapGrid {
    metric: MetricId,
    p: u64,
    n: u64,
    ir: f64,
    tp_axis: Vec<u64>,
    tn_axis: Vec<u64>,
    values: Vec<Vec<f64>>,
}

impl HeatmapGrid {
    pub fn metric(&self) -> MetricId {
        self.metric
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn ir(&self) -> f64 {
        self.ir
    }

    pub fn tp_axis(&self) -> &[u64] {
        &self.tp_axis
    }

    pub fn tn_axis(&self) -> &[u64] {
        &self.tn_axis
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, tn_index: usize, tp_index: usize) -> f64 {
        self.values[tn_index][tp_index]
    }

    /// The confusion matrix a cell stands for.
    pub fn matrix_at(&self, tn_index: usize, tp_index: usize) -> ConfusionMatrix {
        ConfusionMatrix::from_totals(
            self.tp_axis[tp_index],
            self.tn_axis[tn_index],
            self.p,
            self.n,
        )
        .expect("axis values lie within the class totals")
    }

    /// Cells in row-major order as `(tp, tn, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (u64, u64, f64)> + '_ {
        self.tn_axis
            .iter()
            .zip(&self.values)
            .flat_map(move |(&tn, row)| {
                self.tp_axis
                    .iter()
                    .zip(row)
                    .map(move |(&tp, &v)| (tp, tn, v))
            })
    }
}

/// `steps` evenly spaced counts from 0 to `total`, rounded half up.
pub fn lattice_axis(total: u64, steps: usize) -> Vec<u64> {
    let intervals = (steps - 1) as u128;
    (0..steps as u128)
        .map(|i| ((2 * i * u128::from(total) + intervals) / (2 * intervals)) as u64)
        .collect()
}

fn check_params(p: u64, n: u64, tp_steps: usize, tn_steps: usize) -> Result<()> {
    if p == 0 || n == 0 {
        return Err(Error::DegenerateClass {
            positives: p,
            negatives: n,
        });
    }
    if tp_steps < 2 || tn_steps < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 steps per axis, got {tp_steps} x {tn_steps}"
        )));
    }
    Ok(())
}

/// Evaluates `metric` at every lattice point, with `fp = n − tn` and
/// `fn = p − tp`. Rows are computed in parallel.
pub fn generate_grid(
    metric: MetricId,
    p: u64,
    n: u64,
    tp_steps: usize,
    tn_steps: usize,
) -> Result<HeatmapGrid> {
    check_params(p, n, tp_steps, tn_steps)?;
    let tp_axis = lattice_axis(p, tp_steps);
    let tn_axis = lattice_axis(n, tn_steps);
    let values = tn_axis
        .par_iter()
        .map(|&tn| {
            tp_axis
                .iter()
                .map(|&tp| {
                    let cm = ConfusionMatrix::from_totals(tp, tn, p, n)
                        .expect("axis values lie within the class totals");
                    metric.evaluate(&cm)
                })
                .collect()
        })
        .collect();
    Ok(HeatmapGrid {
        metric,
        p,
        n,
        ir: imbalance_ratio(p, n)?,
        tp_axis,
        tn_axis,
        values,
    })
}

/// Per-fraction sensitivity of HMNC or G-mean at every lattice point,
/// `None` where it is undefined.
pub fn sensitivity_field(
    metric: MetricId,
    p: u64,
    n: u64,
    tp_steps: usize,
    tn_steps: usize,
) -> Result<Vec<Vec<Option<Sensitivity>>>> {
    check_params(p, n, tp_steps, tn_steps)?;
    let derivative = match metric {
        MetricId::Hmnc => analysis::hmnc_sensitivity,
        MetricId::GMean => analysis::gmean_sensitivity,
        other => {
            return Err(Error::InvalidGrid(format!(
                "no sensitivity field for {other}"
            )))
        }
    };
    let tp_axis = lattice_axis(p, tp_steps);
    Ok(lattice_axis(n, tn_steps)
        .par_iter()
        .map(|&tn| {
            tp_axis
                .iter()
                .map(|&tp| {
                    let cm = ConfusionMatrix::from_totals(tp, tn, p, n).ok()?;
                    derivative(&cm).ok()
                })
                .collect()
        })
        .collect())
}

/// Points where HMNC is equally sensitive to both correct fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    pub p: u64,
    pub n: u64,
    /// `(tp, tn)` in counts, ascending in `tn`.
    pub points: Vec<(f64, f64)>,
}

/// Samples the curve `tp = tn·√(P/N)` for `tn` from 0 to the edge of the
/// lattice: `N` itself, or `√(P·N)` when the curve leaves through `tp = P` first.
pub fn sensitivity_boundary(p: u64, n: u64, samples: usize) -> Result<BoundaryCurve> {
    check_params(p, n, samples, samples)?;
    let (pf, nf) = (p as f64, n as f64);
    let slope = (pf / nf).sqrt();
    let tn_end = nf.min((pf * nf).sqrt());
    let points = (0..samples)
        .map(|i| {
            let tn = tn_end * i as f64 / (samples - 1) as f64;
            ((tn * slope).min(pf), tn)
        })
        .collect();
    Ok(BoundaryCurve { p, n, points })
}

/// Largest `|ratio − 1|` of the HMNC sensitivity ratio over the curve's
/// points. The point at `tn = 0` has no ratio and is skipped.
pub fn boundary_ratio_deviation(curve: &BoundaryCurve) -> Result<f64> {
    let surface = HmncSurface::new(curve.p, curve.n)?;
    let mut worst: f64 = 0.0;
    for &(tp, tn) in &curve.points {
        if tn == 0.0 {
            continue;
        }
        let s = surface.sensitivity(tp / curve.p as f64, tn / curve.n as f64)?;
        if let Some(r) = s.ratio {
            worst = worst.max((r - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Formats `value` with `digits` significant digits in positional notation.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, value);
    let exponent: i64 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("scientific formatting has an exponent");
    let decimals = (digits as i64 - 1 - exponent).max(0) as usize;
    format!("{value:.decimals$}")
}

/// Long-format serialization: `#` metadata lines, a `tp,tn,value` header and
/// one row per cell in row-major order.
pub fn grid_to_table(grid: &HeatmapGrid, significant_digits: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# metric: {}", grid.metric);
    let _ = writeln!(out, "# p: {}", grid.p);
    let _ = writeln!(out, "# n: {}", grid.n);
    let _ = writeln!(out, "# ir: {}", grid.ir);
    let _ = writeln!(out, "# tp_steps: {}", grid.tp_axis.len());
    let _ = writeln!(out, "# tn_steps: {}", grid.tn_axis.len());
    out.push_str("tp,tn,value\n");
    for (tp, tn, value) in grid.cells() {
        let _ = writeln!(
            out,
            "{tp},{tn},{}",
            format_significant(value, significant_digits)
        );
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line: line as u64,
        message: message.into(),
    }
}

pub fn parse_grid_table(text: &str) -> Result<HeatmapGrid> {
    let mut metric = None;
    let mut p = None;
    let mut n = None;
    let mut ir = None;
    let mut tp_steps = None;
    let mut tn_steps = None;
    let mut header_seen = false;
    let mut cells: Vec<(u64, u64, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let Some((key, value)) = meta.split_once(':') else {
                continue;
            };
            let value = value.trim();
            let bad = |what: &str| parse_err(line_no, format!("invalid {what} {value:?}"));
            match key.trim() {
                "metric" => metric = Some(value.parse::<MetricId>().map_err(|_| bad("metric"))?),
                "p" => p = Some(value.parse::<u64>().map_err(|_| bad("p"))?),
                "n" => n = Some(value.parse::<u64>().map_err(|_| bad("n"))?),
                "ir" => ir = Some(value.parse::<f64>().map_err(|_| bad("ir"))?),
                "tp_steps" => tp_steps = Some(value.parse::<usize>().map_err(|_| bad("tp_steps"))?),
                "tn_steps" => tn_steps = Some(value.parse::<usize>().map_err(|_| bad("tn_steps"))?),
                _ => {}
            }
            continue;
        }
        if !header_seen {
            if line != "tp,tn,value" {
                return Err(parse_err(line_no, "expected header `tp,tn,value`"));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let tp = fields[0]
            .trim()
            .parse::<u64>()
            .map_err(|e| parse_err(line_no, format!("tp: {e}")))?;
        let tn = fields[1]
            .trim()
            .parse::<u64>()
            .map_err(|e| parse_err(line_no, format!("tn: {e}")))?;
        let value = fields[2]
            .trim()
            .parse::<f64>()
            .map_err(|e| parse_err(line_no, format!("value: {e}")))?;
        cells.push((tp, tn, value));
    }

    let missing = |what: &str| parse_err(0, format!("missing `# {what}:` metadata"));
    let metric = metric.ok_or_else(|| missing("metric"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let tp_steps = tp_steps.ok_or_else(|| missing("tp_steps"))?;
    let tn_steps = tn_steps.ok_or_else(|| missing("tn_steps"))?;
    if !header_seen {
        return Err(parse_err(0, "missing `tp,tn,value` header"));
    }
    if cells.len() != tp_steps * tn_steps {
        return Err(parse_err(
            0,
            format!(
                "expected {} cells, found {}",
                tp_steps * tn_steps,
                cells.len()
            ),
        ));
    }

    let tp_axis: Vec<u64> = cells[..tp_steps].iter().map(|c| c.0).collect();
    let tn_axis: Vec<u64> = cells.iter().step_by(tp_steps).map(|c| c.1).collect();
    let mut values = Vec::with_capacity(tn_steps);
    for (row_idx, row) in cells.chunks(tp_steps).enumerate() {
        for (col_idx, &(tp, tn, _)) in row.iter().enumerate() {
            if tp != tp_axis[col_idx] || tn != tn_axis[row_idx] {
                return Err(parse_err(
                    0,
                    format!("cell ({tp},{tn}) breaks row-major lattice order"),
                ));
            }
        }
        values.push(row.iter().map(|c| c.2).collect());
    }
    if tp_axis.last().copied() != Some(p) || tn_axis.last().copied() != Some(n) {
        return Err(parse_err(0, "axes must end at the class totals"));
    }
    let ir = match ir {
        Some(ir) => ir,
        None => imbalance_ratio(p, n)?,
    };
    Ok(HeatmapGrid {
        metric,
        p,
        n,
        ir,
        tp_axis,
        tn_axis,
        values,
    })
}

/// A gnuplot script that renders `data_file` (written by [`grid_to_table`])
/// to `image_file`.
pub fn plot_script(grid: &HeatmapGrid, data_file: &str, image_file: &str) -> String {
    let (lo, hi) = grid.metric.range();
    format!(
        "# {metric} heat map, P = {p}, N = {n}, IR = {ir}\n\
         set terminal pngcairo size 800,640\n\
         set output '{image_file}'\n\
         set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set key autotitle columnhead\n\
         set title '{metric} (IR = {ir})'\n\
         set xlabel 'TP'\n\
         set ylabel 'TN'\n\
         set xrange [0:{p}]\n\
         set yrange [0:{n}]\n\
         set cbrange [{lo}:{hi}]\n\
         set palette rgbformulae 33,13,10\n\
         plot '{data_file}' using 1:2:3 with points pointtype 5 pointsize 1 palette notitle\n",
        metric = grid.metric,
        p = grid.p,
        n = grid.n,
        ir = grid.ir,
    )
}
