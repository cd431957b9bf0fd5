//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p hmnc --test acceptance`. Exits non-zero when any
//! criterion fails.

use std::fs::File;
use std::io::Write;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hmnc::analysis::{table_row_ranking, ChangeProfile, DeltaScale, HmncSurface};
use hmnc::cli::input::read_predictions_file;
use hmnc::heatmap::{sensitivity_boundary, HeatmapGrid};
use hmnc::metrics::{self, hmnc_harmonic_form};
use hmnc::repro::{self, TABLES};
use hmnc::{confusion_from_labels, ConfusionMatrix, MetricId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_TOLERANCE: f64 = 0.005;
const TABLE_TIME_LIMIT: Duration = Duration::from_secs(1);
const IDENTITY_TOLERANCE: f64 = 1e-12;
const IDENTITY_MAX_CLASS: u64 = 200;
const IDENTITY_TIME_LIMIT: Duration = Duration::from_secs(30);
const EQUIVALENCE_TOLERANCE: f64 = 1e-12;
const RANDOM_MATRICES: usize = 100_000;
const MAX_CLASS: u64 = 10_000;
const SENSITIVITY_REL_TOLERANCE: f64 = 1e-3;
const FD_STEP: f64 = 1e-5;
const LATTICE_STEPS: usize = 101;
const CELL_SAMPLES: usize = 1000;
const PREDICTION_FILES: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> ConfusionMatrix {
    let p = rng.gen_range(1..=MAX_CLASS);
    let n = rng.gen_range(1..=MAX_CLASS);
    // one draw in eight pins a correct count to an endpoint
    let mut pick = |total: u64| match rng.gen_range(0..16) {
        0 => 0,
        1 => total,
        _ => rng.gen_range(0..=total),
    };
    let tp = pick(p);
    let tn = pick(n);
    ConfusionMatrix::from_totals(tp, tn, p, n).unwrap()
}

fn criterion_1_tables() -> Outcome {
    let start = Instant::now();
    let tables = repro::reproduce_tables().unwrap();
    let elapsed = start.elapsed();
    let mut failures = Vec::new();
    let mut total = 0;
    for table in &tables {
        for check in &table.method_checks {
            total += 1;
            if (check.computed - check.printed).abs() > TABLE_TOLERANCE {
                failures.push(format!(
                    "T{} {} {} printed {} computed {:.4}",
                    table.number, check.row, check.metric, check.printed, check.computed
                ));
            }
        }
    }
    let pass = failures.is_empty() && total == 84 && elapsed < TABLE_TIME_LIMIT;
    outcome(
        pass,
        format!(
            "{}/{total} method cells within ±{TABLE_TOLERANCE}, {:.1?}{}",
            total - failures.len(),
            elapsed,
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join("; "))
            }
        ),
    )
}

fn criterion_2_delta_rows() -> Outcome {
    let tables = repro::reproduce_tables().unwrap();
    let mut failures = Vec::new();
    let mut total = 0;
    for table in &tables {
        for check in &table.delta_checks {
            total += 1;
            let shown = repro::display_round(check.computed, 2);
            if (shown - check.printed).abs() > TABLE_TOLERANCE {
                failures.push(format!(
                    "T{} {} {} printed {} computed {:.4}",
                    table.number, check.row, check.metric, check.printed, check.computed
                ));
            }
        }
    }
    outcome(
        failures.is_empty() && total == 105,
        format!(
            "{}/{total} delta cells match after rounding{}",
            total - failures.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join("; "))
            }
        ),
    )
}

fn criterion_3_ranking_claims() -> Outcome {
    let mut failures = Vec::new();
    for table in &TABLES {
        let repro = repro::reproduce_table(table).unwrap();
        let reports: Vec<_> = repro
            .comparisons
            .iter()
            .map(|(_, _, r)| r.clone())
            .collect();
        let rankings = table_row_ranking(&reports, &MetricId::TABLE_COLUMNS, DeltaScale::Unit);
        for ((i, j, report), ranking) in repro.comparisons.iter().zip(&rankings) {
            let label = format!("T{} |Ψ{}−Ψ{}|", table.number, i + 1, j + 1);
            match (i + 1, j + 1) {
                (1, 2) | (3, 4) => {
                    if report.change_profile != ChangeProfile::MajorityOnly {
                        failures.push(format!("{label} profile {:?}", report.change_profile));
                    }
                    if !ranking.is_strict_min(MetricId::Hmnc) {
                        failures.push(format!(
                            "{label} HMNC not the row minimum ({:?})",
                            ranking.order
                        ));
                    }
                }
                (1, 4) | (2, 3) => {
                    if report.change_profile != ChangeProfile::MinorityOnly {
                        failures.push(format!("{label} profile {:?}", report.change_profile));
                    }
                    if !ranking.is_strict_max(MetricId::Hmnc) {
                        failures.push(format!(
                            "{label} HMNC not the row maximum ({:?})",
                            ranking.order
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "HMNC is the strict minimum on 6 majority-only rows and the strict maximum on 6 minority-only rows".to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_4_identity_sweep() -> Outcome {
    let start = Instant::now();
    let mut points = 0u64;
    let mut worst: f64 = 0.0;
    for p in 1..=IDENTITY_MAX_CLASS {
        for n in 1..=IDENTITY_MAX_CLASS {
            let g = gcd(p, n);
            for k in 1..=g {
                let (tp, tn) = (k * p / g, k * n / g);
                assert_eq!(tp * n, tn * p);
                let cm = ConfusionMatrix::from_totals(tp, tn, p, n).unwrap();
                let common = tn as f64 / n as f64;
                for value in [
                    metrics::hmnc(&cm),
                    metrics::accuracy(&cm),
                    metrics::bacc(&cm),
                    metrics::g_mean(&cm),
                ] {
                    worst = worst.max((value - common).abs());
                }
                points += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= IDENTITY_TOLERANCE && elapsed < IDENTITY_TIME_LIMIT,
        format!("{points} equal-rate points, max |metric − tn/N| = {worst:.2e}, {elapsed:.1?}"),
    )
}

fn criterion_5_hmnc_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_MATRICES {
        let cm = random_matrix(&mut rng);
        worst = worst.max((metrics::hmnc(&cm) - hmnc_harmonic_form(&cm)).abs());
    }
    outcome(
        worst <= EQUIVALENCE_TOLERANCE,
        format!("{RANDOM_MATRICES} matrices, max |closed − harmonic| = {worst:.2e}"),
    )
}

fn criterion_6_ranges() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = Vec::new();
    for _ in 0..RANDOM_MATRICES {
        let cm = random_matrix(&mut rng);
        let report = metrics::evaluate_all(&cm);
        for (id, value) in report.values.iter() {
            let (lo, hi) = id.range();
            if !(lo..=hi).contains(&value) {
                violations.push(format!("{id} = {value} at {cm:?}"));
            }
        }
    }
    // zero-denominator conventions
    let conventions = [
        (
            "PRC, tp+fp = 0",
            metrics::precision(&ConfusionMatrix::new(0, 7, 0, 3).unwrap()),
        ),
        (
            "F1, PRC+REC = 0",
            metrics::f1_score(&ConfusionMatrix::new(0, 2, 5, 3).unwrap()),
        ),
        (
            "MCC, tp+fp = 0",
            metrics::mcc(&ConfusionMatrix::new(0, 7, 0, 3).unwrap()),
        ),
        (
            "MCC, tn+fn = 0",
            metrics::mcc(&ConfusionMatrix::new(3, 0, 7, 0).unwrap()),
        ),
        (
            "HMNC, tp+tn = 0",
            metrics::hmnc(&ConfusionMatrix::new(0, 0, 7, 3).unwrap()),
        ),
    ];
    for (name, value) in conventions {
        if value != 0.0 {
            violations.push(format!("{name} returned {value}"));
        }
    }
    outcome(
        violations.is_empty(),
        if violations.is_empty() {
            format!("{RANDOM_MATRICES} matrices in range; 5 zero-denominator conventions return 0")
        } else {
            violations
                .into_iter()
                .take(5)
                .collect::<Vec<_>>()
                .join("; ")
        },
    )
}

/// HMNC closed form extended to real-valued counts.
fn hmnc_real(tp: f64, tn: f64, p: f64, n: f64) -> f64 {
    if tp + tn == 0.0 {
        return 0.0;
    }
    tp * tn * (p + n) / ((tp + tn) * p * n)
}

fn criterion_7_sensitivity() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_rel: f64 = 0.0;
    let mut checked = 0;
    let mut worst_boundary_steps: f64 = 0.0;
    for (_, p, n) in repro::FIGURES {
        let (pf, nf) = (p as f64, n as f64);
        let surface = HmncSurface::new(p, n).unwrap();
        // the real extension agrees with the lattice metric on whole counts
        for (tp, tn) in [(500, n / 2), (700, n * 7 / 10), (1, 1)] {
            let exact = metrics::hmnc(&ConfusionMatrix::from_totals(tp, tn, p, n).unwrap());
            if (exact - hmnc_real(tp as f64, tn as f64, pf, nf)).abs() > 1e-14 {
                failures.push(format!("real extension disagrees at ({tp},{tn})"));
            }
        }
        let last = (LATTICE_STEPS - 1) as f64;
        for j in 1..LATTICE_STEPS - 1 {
            let sel = j as f64 / last;
            for i in 1..LATTICE_STEPS - 1 {
                let rec = i as f64 / last;
                let f = |r: f64, s: f64| hmnc_real(r * pf, s * nf, pf, nf);
                let fd_rec = (f(rec + FD_STEP, sel) - f(rec - FD_STEP, sel)) / (2.0 * FD_STEP);
                let fd_sel = (f(rec, sel + FD_STEP) - f(rec, sel - FD_STEP)) / (2.0 * FD_STEP);
                let s = surface.sensitivity(rec, sel).unwrap();
                let rel_rec = (fd_rec - s.d_rec).abs() / s.d_rec;
                let rel_sel = (fd_sel - s.d_sel).abs() / s.d_sel;
                worst_rel = worst_rel.max(rel_rec).max(rel_sel);
                checked += 1;
            }
        }

        // boundary tp = tn·√(P/N), cross-checked by where the finite-difference
        // ratio crosses 1 along each lattice row
        let step = pf / last;
        let curve = sensitivity_boundary(p, n, LATTICE_STEPS).unwrap();
        for &(tp, tn) in &curve.points {
            let expected = tn * (pf / nf).sqrt();
            if (tp - expected).abs() > step {
                failures.push(format!("boundary point ({tp},{tn}) off curve"));
            }
        }
        for j in 1..LATTICE_STEPS - 1 {
            let sel = j as f64 / last;
            let tn = sel * nf;
            let boundary_tp = tn * (pf / nf).sqrt();
            if boundary_tp >= pf - step {
                continue;
            }
            let f = |r: f64, s: f64| hmnc_real(r * pf, s * nf, pf, nf);
            let fd_ratio = |rec: f64| {
                let d_rec = (f(rec + FD_STEP, sel) - f(rec - FD_STEP, sel)) / (2.0 * FD_STEP);
                let d_sel = (f(rec, sel + FD_STEP) - f(rec, sel - FD_STEP)) / (2.0 * FD_STEP);
                d_sel / d_rec
            };
            let crossing = (1..LATTICE_STEPS).find(|&i| fd_ratio(i as f64 / last) >= 1.0);
            match crossing {
                Some(i) => {
                    let lattice_tp = i as f64 * step;
                    let off = (lattice_tp - boundary_tp).abs() / step;
                    worst_boundary_steps = worst_boundary_steps.max(off);
                    if off > 1.0 {
                        failures.push(format!(
                            "row tn={tn}: crossing at tp={lattice_tp}, boundary {boundary_tp}"
                        ));
                    }
                }
                None => failures.push(format!("row tn={tn}: no ratio crossing")),
            }
        }
    }
    if worst_rel > SENSITIVITY_REL_TOLERANCE {
        failures.push(format!("max relative derivative error {worst_rel:.2e}"));
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{checked} interior points, max relative error {worst_rel:.2e}; boundary crossings within {worst_boundary_steps:.2} lattice steps"
            )
        } else {
            failures.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    )
}

fn criterion_8_figure_grids() -> Outcome {
    let grids = repro::figure_grids(LATTICE_STEPS, LATTICE_STEPS).unwrap();
    let mut failures = Vec::new();
    if grids.len() != 21 {
        failures.push(format!("{} grids, expected 21", grids.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (figure, grid) in &grids {
        if grid.rows().len() != LATTICE_STEPS
            || grid.rows().iter().any(|r| r.len() != LATTICE_STEPS)
        {
            failures.push(format!(
                "figure {figure} {} has wrong dimensions",
                grid.metric()
            ));
        }
        let (lo, hi) = grid.metric().range();
        if grid.cells().any(|(_, _, v)| !(lo..=hi).contains(&v)) {
            failures.push(format!(
                "figure {figure} {} value out of range",
                grid.metric()
            ));
        }
        for _ in 0..CELL_SAMPLES {
            let (j, i) = (
                rng.gen_range(0..LATTICE_STEPS),
                rng.gen_range(0..LATTICE_STEPS),
            );
            let (tp, tn) = (grid.tp_axis()[i], grid.tn_axis()[j]);
            let fresh = ConfusionMatrix::new(tp, tn, grid.n() - tn, grid.p() - tp).unwrap();
            if grid.metric().evaluate(&fresh) != grid.value(j, i) {
                failures.push(format!(
                    "figure {figure} {} cell ({tp},{tn}) differs",
                    grid.metric()
                ));
                break;
            }
        }
    }

    let mut diagonal_cells = 0;
    for figure in 1..=3 {
        let find = |metric: MetricId| -> &HeatmapGrid {
            &grids
                .iter()
                .find(|(f, g)| *f == figure && g.metric() == metric)
                .unwrap()
                .1
        };
        let identity: Vec<&HeatmapGrid> = [
            MetricId::Hmnc,
            MetricId::Acc,
            MetricId::Bacc,
            MetricId::GMean,
        ]
        .map(find)
        .to_vec();
        let base = identity[0];
        for (j, &tn) in base.tn_axis().iter().enumerate() {
            for (i, &tp) in base.tp_axis().iter().enumerate() {
                if tp * base.n() != tn * base.p() {
                    continue;
                }
                diagonal_cells += 1;
                let common = tn as f64 / base.n() as f64;
                for g in &identity {
                    if (g.value(j, i) - common).abs() > IDENTITY_TOLERANCE {
                        failures.push(format!(
                            "figure {figure} {} diagonal ({tp},{tn})",
                            g.metric()
                        ));
                    }
                }
            }
        }

        let hmnc = find(MetricId::Hmnc);
        for (j, row) in hmnc.rows().iter().enumerate() {
            if hmnc.tn_axis()[j] > 0 && row.windows(2).any(|w| w[0] > w[1]) {
                failures.push(format!(
                    "figure {figure} HMNC decreases along tp at row {j}"
                ));
            }
        }
        for (i, &tp) in hmnc.tp_axis().iter().enumerate() {
            if tp > 0 && hmnc.rows().windows(2).any(|r| r[0][i] > r[1][i]) {
                failures.push(format!(
                    "figure {figure} HMNC decreases along tn at column {i}"
                ));
            }
        }
    }
    if diagonal_cells == 0 {
        failures.push("no diagonal cells found".into());
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "21 grids, {} sampled cells match fresh evaluation, {diagonal_cells} diagonal cells agree, HMNC monotone",
                21 * CELL_SAMPLES
            )
        } else {
            failures.into_iter().take(5).collect::<Vec<_>>().join("; ")
        },
    )
}

fn criterion_9_ingestion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dir = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    let mut total_rows = 0usize;
    for file_idx in 0..PREDICTION_FILES {
        let len = rng.gen_range(10..=10_000usize);
        let (pos, neg) = if file_idx % 2 == 0 {
            ("1", "0")
        } else {
            ("yes", "no")
        };
        let positive_share = rng.gen_range(0.01..0.99);
        let accuracy = rng.gen_range(0.0..1.0);
        let mut pairs: Vec<(bool, bool)> = (0..len)
            .map(|_| {
                let actual = rng.gen_bool(positive_share);
                let correct = rng.gen_bool(accuracy);
                (actual, if correct { actual } else { !actual })
            })
            .collect();
        // both classes must occur among the actual labels
        pairs[0].0 = true;
        pairs[1].0 = false;

        let path = dir.path().join(format!("preds_{file_idx}.csv"));
        let mut file = File::create(&path).unwrap();
        writeln!(file, "actual,predicted").unwrap();
        let label = |b: bool| if b { pos } else { neg };
        for &(a, p) in &pairs {
            writeln!(file, "{},{}", label(a), label(p)).unwrap();
        }
        drop(file);

        let (mut tp, mut tn, mut fp, mut fn_) = (0u64, 0u64, 0u64, 0u64);
        for &(a, p) in &pairs {
            match (a, p) {
                (true, true) => tp += 1,
                (false, false) => tn += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
            }
        }
        let data = read_predictions_file(&path, pos, None).unwrap();
        let cm = confusion_from_labels(&data).unwrap();
        if (cm.tp(), cm.tn(), cm.fp(), cm.fn_()) != (tp, tn, fp, fn_) {
            failures.push(format!("file {file_idx}: {cm:?} vs ({tp},{tn},{fp},{fn_})"));
        }
        total_rows += len;
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{PREDICTION_FILES} files ({total_rows} rows) match the brute-force tally")
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 table reproduction", criterion_1_tables),
        ("2 delta-row reproduction", criterion_2_delta_rows),
        ("3 HMNC ranking claims", criterion_3_ranking_claims),
        ("4 identity theorem sweep", criterion_4_identity_sweep),
        ("5 closed/harmonic HMNC equivalence", criterion_5_hmnc_forms),
        ("6 range invariants", criterion_6_ranges),
        ("7 sensitivity oracle", criterion_7_sensitivity),
        ("8 figure-data properties", criterion_8_figure_grids),
        ("9 ingestion oracle", criterion_9_ingestion),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "{}/{} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
