//! Pairwise classifier comparison and HMNC sensitivity.
//!
//! Two classifiers evaluated on the same test population are compared metric
//! by metric through the absolute difference of their scores. When only the
//! majority-class (or only the minority-class) correct count differs, the
//! size of each metric's difference shows how strongly that metric responds
//! to that class.

use serde::Serialize;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::metrics::{self, evaluate_all, MetricId, MetricReport, MetricValues};

/// Which class's correct count differs between two compared classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChangeProfile {
    MajorityOnly,
    MinorityOnly,
    Both,
    Neither,
}

impl ChangeProfile {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeProfile::MajorityOnly => "MAJORITY_ONLY",
            ChangeProfile::MinorityOnly => "MINORITY_ONLY",
            ChangeProfile::Both => "BOTH",
            ChangeProfile::Neither => "NEITHER",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharedTotals {
    pub p: u64,
    pub n: u64,
    pub ir: f64,
}

impl SharedTotals {
    /// True when the positive class is the majority. Balanced populations
    /// count the positive class as the majority.
    pub fn positive_is_majority(&self) -> bool {
        self.p >= self.n
    }
}

/// Scale on which per-metric differences are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaScale {
    /// `|left − right|` in the metric's own units.
    #[default]
    Raw,
    /// Differences after mapping each metric's range onto `[0, 1]`; halves the
    /// deltas of MCC and Kappa, whose range is `[−1, 1]`.
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub left: MetricReport,
    pub right: MetricReport,
    /// `|left − right|` per metric, unrounded.
    pub deltas: MetricValues,
    /// Deltas on the common `[0, 1]` scale.
    pub unit_deltas: MetricValues,
    pub change_profile: ChangeProfile,
    pub shared_totals: SharedTotals,
}

impl ComparisonReport {
    pub fn delta(&self, id: MetricId, scale: DeltaScale) -> f64 {
        match scale {
            DeltaScale::Raw => self.deltas[id],
            DeltaScale::Unit => self.unit_deltas[id],
        }
    }
}

pub fn compare(left: &ConfusionMatrix, right: &ConfusionMatrix) -> Result<ComparisonReport> {
    if left.p() != right.p() || left.n() != right.n() {
        return Err(Error::MismatchedPopulation {
            left_p: left.p(),
            left_n: left.n(),
            right_p: right.p(),
            right_n: right.n(),
        });
    }
    let (l, r) = (evaluate_all(left), evaluate_all(right));
    let shared_totals = SharedTotals {
        p: left.p(),
        n: left.n(),
        ir: l.ir,
    };

    let tp_changed = left.tp() != right.tp();
    let tn_changed = left.tn() != right.tn();
    let (majority_changed, minority_changed) = if shared_totals.positive_is_majority() {
        (tp_changed, tn_changed)
    } else {
        (tn_changed, tp_changed)
    };
    let change_profile = match (majority_changed, minority_changed) {
        (true, false) => ChangeProfile::MajorityOnly,
        (false, true) => ChangeProfile::MinorityOnly,
        (true, true) => ChangeProfile::Both,
        (false, false) => ChangeProfile::Neither,
    };

    Ok(ComparisonReport {
        deltas: MetricValues::from_fn(|id| (l.values[id] - r.values[id]).abs()),
        unit_deltas: MetricValues::from_fn(|id| {
            (id.to_unit(l.values[id]) - id.to_unit(r.values[id])).abs()
        }),
        left: l,
        right: r,
        change_profile,
        shared_totals,
    })
}

/// Outcome of testing whether HMNC, ACC, BACC and G-mean coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub holds: bool,
    /// Largest pairwise difference among the four measures.
    pub spread: f64,
    pub hmnc: f64,
    pub acc: f64,
    pub bacc: f64,
    pub g_mean: f64,
    /// `tn / N`, present when `tp / P = tn / N` holds exactly.
    pub common_value: Option<f64>,
}

pub fn identity_check(cm: &ConfusionMatrix, tol: f64) -> IdentityCheck {
    let values = [
        metrics::hmnc(cm),
        metrics::accuracy(cm),
        metrics::bacc(cm),
        metrics::g_mean(cm),
    ];
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let equal_rates =
        u128::from(cm.tp()) * u128::from(cm.n()) == u128::from(cm.tn()) * u128::from(cm.p());
    IdentityCheck {
        holds: spread <= tol,
        spread,
        hmnc: values[0],
        acc: values[1],
        bacc: values[2],
        g_mean: values[3],
        common_value: equal_rates.then(|| metrics::selectivity(cm)),
    }
}

/// Partial derivatives of a metric with respect to the correct fractions
/// `tp / P` (recall) and `tn / N` (selectivity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    pub d_rec: f64,
    pub d_sel: f64,
    /// `d_sel / d_rec`; `None` where `d_rec` vanishes.
    pub ratio: Option<f64>,
}

/// HMNC as a smooth function of the correct fractions for fixed class totals.
///
/// With `r = tp / P` and `s = tn / N`, HMNC is `r·s·M / (r·P + s·N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmncSurface {
    p: f64,
    n: f64,
}

impl HmncSurface {
    pub fn new(p: u64, n: u64) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::DegenerateClass {
                positives: p,
                negatives: n,
            });
        }
        Ok(Self {
            p: p as f64,
            n: n as f64,
        })
    }

    pub fn value(&self, rec: f64, sel: f64) -> f64 {
        let den = rec * self.p + sel * self.n;
        if den == 0.0 {
            return 0.0;
        }
        rec * sel * (self.p + self.n) / den
    }

    pub fn sensitivity(&self, rec: f64, sel: f64) -> Result<Sensitivity> {
        let den = rec * self.p + sel * self.n;
        if den == 0.0 {
            return Err(Error::UndefinedSensitivity);
        }
        let m = self.p + self.n;
        let d_rec = m * self.n * sel * sel / (den * den);
        let d_sel = m * self.p * rec * rec / (den * den);
        Ok(Sensitivity {
            d_rec,
            d_sel,
            ratio: (sel > 0.0).then(|| (rec * rec * self.p) / (sel * sel * self.n)),
        })
    }
}

/// Per-fraction partial derivatives of HMNC at `cm`.
///
/// `d_rec = M·tn² / ((tp + tn)²·N)`, `d_sel = M·tp² / ((tp + tn)²·P)` and
/// their ratio `tp²·N / (tn²·P)`, which is 1 on the curve `tp = tn·√(P/N)`.
/// The ratio is `None` when `tn = 0`.
pub fn hmnc_sensitivity(cm: &ConfusionMatrix) -> Result<Sensitivity> {
    let (tp, tn) = (cm.tp() as f64, cm.tn() as f64);
    if cm.tp() + cm.tn() == 0 {
        return Err(Error::UndefinedSensitivity);
    }
    let (p, n, m) = (cm.p() as f64, cm.n() as f64, cm.m() as f64);
    let s2 = (tp + tn) * (tp + tn);
    Ok(Sensitivity {
        d_rec: m * tn * tn / (s2 * n),
        d_sel: m * tp * tp / (s2 * p),
        ratio: (cm.tn() > 0).then(|| {
            let num = u128::from(cm.tp()).pow(2) * u128::from(cm.n());
            let den = u128::from(cm.tn()).pow(2) * u128::from(cm.p());
            num as f64 / den as f64
        }),
    })
}

/// Per-fraction partial derivatives of G-mean, `√(r·s)`. Undefined when
/// either fraction is zero. The ratio `d_sel / d_rec` is `r / s`.
pub fn gmean_sensitivity(cm: &ConfusionMatrix) -> Result<Sensitivity> {
    let (rec, sel) = (metrics::recall(cm), metrics::selectivity(cm));
    if rec == 0.0 || sel == 0.0 {
        return Err(Error::UndefinedSensitivity);
    }
    Ok(Sensitivity {
        d_rec: 0.5 * (sel / rec).sqrt(),
        d_sel: 0.5 * (rec / sel).sqrt(),
        ratio: Some(rec / sel),
    })
}

/// Metrics of one comparison ordered by the size of their delta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowRanking {
    /// Ascending by delta; equal deltas keep [`MetricId`] order.
    pub order: Vec<(MetricId, f64)>,
    /// 1-based competition rank (equal deltas share a rank), in `order` order.
    pub ranks: Vec<(MetricId, usize)>,
}

impl RowRanking {
    pub fn rank(&self, id: MetricId) -> Option<usize> {
        self.ranks.iter().find(|(m, _)| *m == id).map(|&(_, r)| r)
    }

    fn delta(&self, id: MetricId) -> Option<f64> {
        self.order.iter().find(|(m, _)| *m == id).map(|&(_, d)| d)
    }

    /// True when `id` has a strictly smaller delta than every other metric.
    pub fn is_strict_min(&self, id: MetricId) -> bool {
        self.delta(id)
            .is_some_and(|d| self.order.iter().all(|&(m, other)| m == id || d < other))
    }

    pub fn is_strict_max(&self, id: MetricId) -> bool {
        self.delta(id)
            .is_some_and(|d| self.order.iter().all(|&(m, other)| m == id || d > other))
    }
}

pub fn table_row_ranking(
    reports: &[ComparisonReport],
    metric_set: &[MetricId],
    scale: DeltaScale,
) -> Vec<RowRanking> {
    reports
        .iter()
        .map(|report| {
            let mut order: Vec<(MetricId, f64)> = metric_set
                .iter()
                .map(|&id| (id, report.delta(id, scale)))
                .collect();
            order.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            let mut ranks = Vec::with_capacity(order.len());
            for (i, &(id, delta)) in order.iter().enumerate() {
                let rank = match i {
                    0 => 1,
                    _ if delta == order[i - 1].1 => ranks.last().map_or(1, |&(_, r)| r),
                    _ => i + 1,
                };
                ranks.push((id, rank));
            }
            RowRanking { order, ranks }
        })
        .collect()
}
