//! Binary confusion matrix and its construction from counts or labelled predictions.
//!
//! Counts are kept as exact integers. Conversion to floating point happens only
//! inside the metric functions.

use serde::Serialize;

use crate::error::{Error, Result};

/// Outcome counts of a binary classifier on a test set.
///
/// Both actual classes are guaranteed non-empty (`p() >= 1`, `n() >= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ConfusionMatrix {
    tp: u64,
    tn: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Result<Self> {
        let positives = tp + fn_;
        let negatives = tn + fp;
        if positives == 0 || negatives == 0 {
            return Err(Error::DegenerateClass {
                positives,
                negatives,
            });
        }
        Ok(Self { tp, tn, fp, fn_ })
    }

    /// Same as [`ConfusionMatrix::new`] for callers holding signed counts.
    pub fn from_signed(tp: i64, tn: i64, fp: i64, fn_: i64) -> Result<Self> {
        let check = |field: &'static str, value: i64| {
            u64::try_from(value).map_err(|_| Error::NegativeCount { field, value })
        };
        Self::new(
            check("tp", tp)?,
            check("tn", tn)?,
            check("fp", fp)?,
            check("fn", fn_)?,
        )
    }

    /// Builds the matrix implied by `tp` correct positives and `tn` correct
    /// negatives out of `p` positives and `n` negatives.
    pub fn from_totals(tp: u64, tn: u64, p: u64, n: u64) -> Result<Self> {
        if tp > p || tn > n {
            return Err(Error::CountExceedsTotal { tp, tn, p, n });
        }
        Self::new(tp, tn, n - tn, p - tp)
    }

    pub fn tp(&self) -> u64 {
        self.tp
    }

    pub fn tn(&self) -> u64 {
        self.tn
    }

    pub fn fp(&self) -> u64 {
        self.fp
    }

    pub fn fn_(&self) -> u64 {
        self.fn_
    }

    /// Actual positives, `tp + fn`.
    pub fn p(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Actual negatives, `tn + fp`.
    pub fn n(&self) -> u64 {
        self.tn + self.fp
    }

    pub fn m(&self) -> u64 {
        self.p() + self.n()
    }

    /// Predicted positives, `tp + fp`.
    pub fn pred_p(&self) -> u64 {
        self.tp + self.fp
    }

    /// Predicted negatives, `tn + fn`.
    pub fn pred_n(&self) -> u64 {
        self.tn + self.fn_
    }

    /// The same classifier viewed with the class roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }
}

/// Raw `(actual, predicted)` label pairs of a binary classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPredictions<L> {
    pairs: Vec<(L, L)>,
    positive: L,
    negative: L,
}

impl<L: PartialEq + Clone + ToString> LabeledPredictions<L> {
    /// Validates that every label is either `positive` or `negative`.
    pub fn new(pairs: Vec<(L, L)>, positive: L, negative: L) -> Result<Self> {
        if positive == negative {
            return Err(Error::AmbiguousLabels(positive.to_string()));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyPredictions);
        }
        for (index, (actual, predicted)) in pairs.iter().enumerate() {
            for label in [actual, predicted] {
                if *label != positive && *label != negative {
                    return Err(Error::UnknownLabel {
                        label: label.to_string(),
                        index,
                    });
                }
            }
        }
        Ok(Self {
            pairs,
            positive,
            negative,
        })
    }

    /// Like [`LabeledPredictions::new`], taking the negative label to be the
    /// only label value other than `positive`. Fails with a degenerate-class
    /// error when every label is positive.
    pub fn with_inferred_negative(pairs: Vec<(L, L)>, positive: L) -> Result<Self> {
        let mut negative: Option<L> = None;
        for (index, (actual, predicted)) in pairs.iter().enumerate() {
            for label in [actual, predicted] {
                if *label == positive {
                    continue;
                }
                match &negative {
                    None => negative = Some(label.clone()),
                    Some(neg) if neg == label => {}
                    Some(_) => {
                        return Err(Error::UnknownLabel {
                            label: label.to_string(),
                            index,
                        })
                    }
                }
            }
        }
        match negative {
            Some(negative) => Self::new(pairs, positive, negative),
            None if pairs.is_empty() => Err(Error::EmptyPredictions),
            None => Err(Error::DegenerateClass {
                positives: pairs.len() as u64,
                negatives: 0,
            }),
        }
    }

    pub fn pairs(&self) -> &[(L, L)] {
        &self.pairs
    }

    pub fn positive(&self) -> &L {
        &self.positive
    }

    pub fn negative(&self) -> &L {
        &self.negative
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Tallies labelled predictions into a confusion matrix.
pub fn confusion_from_labels<L: PartialEq + Clone + ToString>(
    data: &LabeledPredictions<L>,
) -> Result<ConfusionMatrix> {
    let (mut tp, mut tn, mut fp, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (actual, predicted) in &data.pairs {
        let actual_pos = *actual == data.positive;
        let predicted_pos = *predicted == data.positive;
        match (actual_pos, predicted_pos) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
        }
    }
    ConfusionMatrix::new(tp, tn, fp, fn_)
}
