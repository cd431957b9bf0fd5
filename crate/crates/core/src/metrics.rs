//! Single-value performance measures computed from a [`ConfusionMatrix`].
//!
//! Every function is total on valid matrices. Corners where a ratio has a zero
//! denominator return 0:
//!
//! | metric | returns 0 when |
//! |--------|----------------|
//! | precision | `tp + fp = 0` |
//! | F1 | precision + recall = 0 |
//! | MCC | `tp + fp = 0` or `tn + fn = 0` |
//! | HMNC | `tp + tn = 0` |
//!
//! Where a metric is a ratio of integer expressions the numerator and
//! denominator are formed exactly in 128-bit arithmetic and divided once.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

/// The ten supported measures, in a fixed order used for ties and output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricId {
    Rec,
    Prc,
    Sel,
    Acc,
    Bacc,
    F1,
    GMean,
    Mcc,
    Kappa,
    Hmnc,
}

impl MetricId {
    pub const ALL: [MetricId; 10] = [
        MetricId::Rec,
        MetricId::Prc,
        MetricId::Sel,
        MetricId::Acc,
        MetricId::Bacc,
        MetricId::F1,
        MetricId::GMean,
        MetricId::Mcc,
        MetricId::Kappa,
        MetricId::Hmnc,
    ];

    /// Columns of the published comparison tables, in their printed order.
    pub const TABLE_COLUMNS: [MetricId; 7] = [
        MetricId::Hmnc,
        MetricId::Acc,
        MetricId::Bacc,
        MetricId::Mcc,
        MetricId::F1,
        MetricId::GMean,
        MetricId::Kappa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Rec => "REC",
            MetricId::Prc => "PRC",
            MetricId::Sel => "SEL",
            MetricId::Acc => "ACC",
            MetricId::Bacc => "BACC",
            MetricId::F1 => "F1",
            MetricId::GMean => "GMEAN",
            MetricId::Mcc => "MCC",
            MetricId::Kappa => "KAPPA",
            MetricId::Hmnc => "HMNC",
        }
    }

    /// Closed interval of attainable values.
    pub fn range(self) -> (f64, f64) {
        match self {
            MetricId::Mcc | MetricId::Kappa => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// Maps a value of this metric onto `[0, 1]`.
    pub fn to_unit(self, value: f64) -> f64 {
        let (lo, hi) = self.range();
        (value - lo) / (hi - lo)
    }

    pub fn evaluate(self, cm: &ConfusionMatrix) -> f64 {
        match self {
            MetricId::Rec => recall(cm),
            MetricId::Prc => precision(cm),
            MetricId::Sel => selectivity(cm),
            MetricId::Acc => accuracy(cm),
            MetricId::Bacc => bacc(cm),
            MetricId::F1 => f1_score(cm),
            MetricId::GMean => g_mean(cm),
            MetricId::Mcc => mcc(cm),
            MetricId::Kappa => kappa(cm),
            MetricId::Hmnc => hmnc(cm),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for MetricId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        let id = match key.as_str() {
            "REC" | "RECALL" | "TPR" | "SENSITIVITY" => MetricId::Rec,
            "PRC" | "PRECISION" | "PPV" => MetricId::Prc,
            "SEL" | "SELECTIVITY" | "SPECIFICITY" | "TNR" => MetricId::Sel,
            "ACC" | "ACCURACY" => MetricId::Acc,
            "BACC" | "AUC" | "BALANCEDACCURACY" => MetricId::Bacc,
            "F1" | "F1SCORE" => MetricId::F1,
            "GMEAN" | "GM" => MetricId::GMean,
            "MCC" => MetricId::Mcc,
            "KAPPA" => MetricId::Kappa,
            "HMNC" => MetricId::Hmnc,
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("unknown metric {s:?}"),
                })
            }
        };
        Ok(id)
    }
}

fn ratio(num: u128, den: u128) -> f64 {
    num as f64 / den as f64
}

/// REC = tp / P.
pub fn recall(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tp().into(), cm.p().into())
}

/// PRC = tp / (tp + fp).
pub fn precision(cm: &ConfusionMatrix) -> f64 {
    if cm.pred_p() == 0 {
        return 0.0;
    }
    ratio(cm.tp().into(), cm.pred_p().into())
}

/// SEL = tn / N.
pub fn selectivity(cm: &ConfusionMatrix) -> f64 {
    ratio(cm.tn().into(), cm.n().into())
}

/// ACC = (tp + tn) / M.
pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    ratio((cm.tp() + cm.tn()).into(), cm.m().into())
}

/// Balanced accuracy, the mean of recall and selectivity.
pub fn bacc(cm: &ConfusionMatrix) -> f64 {
    0.5 * (recall(cm) + selectivity(cm))
}

/// For hard (thresholded) predictions the area under the ROC curve equals
/// balanced accuracy.
pub fn auc(cm: &ConfusionMatrix) -> f64 {
    bacc(cm)
}

/// F1 = 2·PRC·REC / (PRC + REC), evaluated as 2tp / (2tp + fp + fn).
pub fn f1_score(cm: &ConfusionMatrix) -> f64 {
    let tp = u128::from(cm.tp());
    if tp == 0 {
        return 0.0;
    }
    ratio(2 * tp, 2 * tp + u128::from(cm.fp()) + u128::from(cm.fn_()))
}

/// Geometric mean of recall and selectivity.
pub fn g_mean(cm: &ConfusionMatrix) -> f64 {
    (recall(cm) * selectivity(cm)).sqrt()
}

/// Matthews correlation coefficient.
pub fn mcc(cm: &ConfusionMatrix) -> f64 {
    if cm.pred_p() == 0 || cm.pred_n() == 0 {
        return 0.0;
    }
    let num =
        i128::from(cm.tp()) * i128::from(cm.tn()) - i128::from(cm.fp()) * i128::from(cm.fn_());
    let den = (u128::from(cm.pred_p())
        * u128::from(cm.p())
        * u128::from(cm.n())
        * u128::from(cm.pred_n())) as f64;
    // |num| <= sqrt(den) exactly; rounding of the square root can overshoot by an ulp.
    (num as f64 / den.sqrt()).clamp(-1.0, 1.0)
}

/// Cohen's kappa.
///
/// With chance agreement `e = (P·P̂ + N·N̂) / M²`, kappa is `(ACC − e) / (1 − e)`.
/// Multiplying through by `M²` gives an integer numerator and denominator.
/// The denominator `M² − (P·P̂ + N·N̂)` equals `P·N̂ + N·P̂`, which is positive
/// whenever both classes are non-empty.
pub fn kappa(cm: &ConfusionMatrix) -> f64 {
    let m = i128::from(cm.m());
    let chance =
        i128::from(cm.p()) * i128::from(cm.pred_p()) + i128::from(cm.n()) * i128::from(cm.pred_n());
    let num = m * i128::from(cm.tp() + cm.tn()) - chance;
    let den = m * m - chance;
    debug_assert!(den > 0);
    num as f64 / den as f64
}

/// Harmonic mean `2ab / (a + b)`, 0 when `a + b = 0`.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    if a + b == 0.0 {
        return 0.0;
    }
    2.0 * a * b / (a + b)
}

/// HMNC: the harmonic mean of recall and selectivity, each weighted by its
/// class share, normalised by the harmonic mean of the class shares.
///
/// Evaluated in closed form as `tp·tn·M / ((tp + tn)·P·N)`; see
/// [`hmnc_harmonic_form`] for the defining expression.
pub fn hmnc(cm: &ConfusionMatrix) -> f64 {
    let (tp, tn) = (u128::from(cm.tp()), u128::from(cm.tn()));
    if tp + tn == 0 {
        return 0.0;
    }
    let num = tp * tn * u128::from(cm.m());
    let den = (tp + tn) * u128::from(cm.p()) * u128::from(cm.n());
    ratio(num, den)
}

/// HMNC as `HM(REC·P/M, SEL·N/M) / HM(P/M, N/M)`.
pub fn hmnc_harmonic_form(cm: &ConfusionMatrix) -> f64 {
    let m = cm.m() as f64;
    let pos_share = cm.p() as f64 / m;
    let neg_share = cm.n() as f64 / m;
    harmonic_mean(recall(cm) * pos_share, selectivity(cm) * neg_share)
        / harmonic_mean(pos_share, neg_share)
}

/// `min(P, N) / max(P, N)`.
pub fn imbalance_ratio(p: u64, n: u64) -> Result<f64> {
    if p == 0 || n == 0 {
        return Err(Error::DegenerateClass {
            positives: p,
            negatives: n,
        });
    }
    Ok(ratio(p.min(n).into(), p.max(n).into()))
}

/// One value per [`MetricId`], indexable by id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValues([f64; 10]);

impl MetricValues {
    pub fn from_fn(mut f: impl FnMut(MetricId) -> f64) -> Self {
        MetricValues(MetricId::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (MetricId, f64)> + '_ {
        MetricId::ALL.iter().map(move |&id| (id, self[id]))
    }
}

impl Index<MetricId> for MetricValues {
    type Output = f64;

    fn index(&self, id: MetricId) -> &f64 {
        &self.0[id.index()]
    }
}

impl Serialize for MetricValues {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(10))?;
        for (id, value) in self.iter() {
            map.serialize_entry(id.name(), &value)?;
        }
        map.end()
    }
}

/// Every metric evaluated on one matrix, plus the imbalance ratio.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MetricReport {
    pub matrix: ConfusionMatrix,
    pub values: MetricValues,
    pub ir: f64,
}

pub fn evaluate_all(cm: &ConfusionMatrix) -> MetricReport {
    MetricReport {
        matrix: *cm,
        values: MetricValues::from_fn(|id| id.evaluate(cm)),
        ir: imbalance_ratio(cm.p(), cm.n()).expect("matrix classes are non-empty"),
    }
}
