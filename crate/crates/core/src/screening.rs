//! Per-axis threshold accuracy and the minimum-accuracy screening statistic.
//!
//! For each Pauli axis `i` the training points are projected onto `a_i(x)`
//! and the best single-threshold split is found by exhaustive line search.
//! The largest such accuracy over all axes is the minimum accuracy.

use std::fmt;

use crate::encoding::EncodingSpec;
use crate::error::{Error, Result};
use crate::pauli::{feature_vector, pauli_label};
use crate::scalar::Scalar;
use crate::svm::LabeledDataset;

/// Which class a threshold assigns to points left of (below) it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    LeftPositive,
    LeftNegative,
}

impl Orientation {
    pub fn swapped(self) -> Self {
        match self {
            Orientation::LeftPositive => Orientation::LeftNegative,
            Orientation::LeftNegative => Orientation::LeftPositive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::LeftPositive => "left-positive",
            Orientation::LeftNegative => "left-negative",
        }
    }
}

/// Best threshold split on one axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisSplit<T> {
    pub accuracy: f64,
    pub correct: usize,
    pub threshold: T,
    pub orientation: Orientation,
    /// Gap between the projected values either side of the threshold, as a
    /// fraction of the axis spread; 0 for the all-one-side split.
    pub margin: T,
}

/// Best single-threshold accuracy on a 1-D projection.
///
/// Candidate thresholds are one value below the minimum and every midpoint
/// between consecutive distinct sorted values; both orientations are tried.
/// Among splits with the most correct points the widest relative gap wins,
/// then the first in (threshold ascending, left-positive first) order.
pub fn axis_accuracy<T: Scalar>(values: &[T], labels: &[i8]) -> Result<AxisSplit<T>> {
    if values.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            found: labels.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("axis accuracy needs at least one point".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite axis value".into()));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let total_pos = labels.iter().filter(|&&l| l == 1).count();
    let total_neg = n - total_pos;

    // everything to the right: left-positive predicts all −1, left-negative all +1
    let min = values[order[0]];
    let spread = values[order[n - 1]] - min;
    let below = min - (T::one() + min.abs());
    let mut best = AxisSplit {
        accuracy: 0.0,
        correct: total_neg,
        threshold: below,
        orientation: Orientation::LeftPositive,
        margin: T::zero(),
    };
    if total_pos > best.correct {
        best.correct = total_pos;
        best.orientation = Orientation::LeftNegative;
    }

    let (mut left_pos, mut left_neg) = (0usize, 0usize);
    let mut k = 0;
    while k < n {
        let v = values[order[k]];
        while k < n && values[order[k]] == v {
            if labels[order[k]] == 1 {
                left_pos += 1;
            } else {
                left_neg += 1;
            }
            k += 1;
        }
        if k == n {
            break;
        }
        let threshold = (v + values[order[k]]) * T::lit(0.5);
        let margin = (values[order[k]] - v) / spread;
        let right_pos = total_pos - left_pos;
        let right_neg = total_neg - left_neg;
        for (orientation, correct) in [
            (Orientation::LeftPositive, left_pos + right_neg),
            (Orientation::LeftNegative, left_neg + right_pos),
        ] {
            if correct > best.correct || (correct == best.correct && margin > best.margin) {
                best = AxisSplit {
                    accuracy: 0.0,
                    correct,
                    threshold,
                    orientation,
                    margin,
                };
            }
        }
    }
    best.accuracy = best.correct as f64 / n as f64;
    Ok(best)
}

/// Per-axis accuracies over all sixteen two-qubit Pauli axes.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisAccuracyReport<T> {
    pub axes: Vec<AxisSplit<T>>,
    pub minimum_accuracy: f64,
    pub best_axis: usize,
}

impl<T: Scalar> AxisAccuracyReport<T> {
    pub fn axis_accuracies(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.accuracy).collect()
    }

    pub fn best(&self) -> &AxisSplit<T> {
        &self.axes[self.best_axis]
    }

    /// `axis,accuracy,threshold,orientation` rows, one per Pauli axis.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,accuracy,threshold,orientation\n");
        for (i, a) in self.axes.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                pauli_label(i, 2),
                a.accuracy,
                a.threshold,
                a.orientation.as_str()
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let b = self.best();
        format!(
            "minimum_accuracy={} best_axis={} threshold={} orientation={}",
            self.minimum_accuracy,
            pauli_label(self.best_axis, 2),
            b.threshold,
            b.orientation.as_str()
        )
    }
}

impl<T: Scalar> fmt::Display for AxisAccuracyReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "axis  accuracy  threshold        orientation")?;
        for (i, a) in self.axes.iter().enumerate() {
            writeln!(
                f,
                "{:<4}  {:.4}    {:<15.8}  {}",
                pauli_label(i, 2),
                a.accuracy,
                a.threshold.as_f64(),
                a.orientation.as_str()
            )?;
        }
        write!(f, "{}", self.summary())
    }
}

/// Screens an encoding on a dataset without training any classifier.
///
/// The best axis is the one reaching the maximum accuracy with the widest
/// relative margin, lowest Pauli index first on exact ties. A constant axis
/// such as II therefore never wins a tie against an informative one.
pub fn minimum_accuracy<T: Scalar>(
    dataset: &LabeledDataset<T>,
    spec: &EncodingSpec<T>,
) -> Result<AxisAccuracyReport<T>> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("dataset is empty".into()));
    }
    let vectors = dataset
        .points()
        .iter()
        .map(|&x| feature_vector(spec, x))
        .collect::<Result<Vec<_>>>()?;
    let axes = (0..16)
        .map(|i| {
            let values: Vec<T> = vectors.iter().map(|a| a.get(i)).collect();
            axis_accuracy(&values, dataset.labels())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(report_from_axes(axes))
}

fn report_from_axes<T: Scalar>(axes: Vec<AxisSplit<T>>) -> AxisAccuracyReport<T> {
    let mut best_axis = 0;
    for (i, a) in axes.iter().enumerate() {
        let b = &axes[best_axis];
        if a.correct > b.correct || (a.correct == b.correct && a.margin > b.margin) {
            best_axis = i;
        }
    }
    AxisAccuracyReport {
        minimum_accuracy: axes[best_axis].accuracy,
        best_axis,
        axes,
    }
}

/// VC dimension `4ⁿ + 1` of the real feature space; `None` on overflow.
pub fn vc_dimension(n_qubits: u32) -> Option<u128> {
    4u128.checked_pow(n_qubits)?.checked_add(1)
}
