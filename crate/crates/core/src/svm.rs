//! Soft-margin kernel SVM over a precomputed Gram matrix.
//!
//! The dual `max Σα − ½ Σ α_i α_j y_i y_j K_ij` subject to `0 ≤ α ≤ C`,
//! `Σ α_i y_i = 0` is solved by sequential minimal optimization with
//! maximal-violating-pair working-set selection.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::GramMatrix;
use crate::linalg::{clip_negative_spectrum, symmetric_eigen, SquareMatrix};
use crate::scalar::Scalar;

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// Iteration budget per training point.
pub const MAX_PASSES: usize = 10_000;
/// Eigenvalues below `-PSD_SLACK` trigger spectral clipping before training.
pub const PSD_SLACK: f64 = 1e-6;

/// Two-class dataset with labels in `{−1, +1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    points: Vec<[T; 2]>,
    labels: Vec<i8>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(points: Vec<[T; 2]>, labels: Vec<i8>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l != 1 && l != -1) {
            return Err(Error::InvalidArgument(format!("label {bad} is not ±1")));
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[T; 2]] {
        &self.points
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn has_both_classes(&self) -> bool {
        has_both(&self.labels)
    }

    /// Fraction of `+1` labels.
    pub fn positive_fraction(&self) -> f64 {
        self.labels.iter().filter(|&&l| l == 1).count() as f64 / self.len() as f64
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

fn has_both(labels: &[i8]) -> bool {
    labels.contains(&1) && labels.contains(&-1)
}

/// Trained dual coefficients and bias.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel<T> {
    pub alphas: Vec<T>,
    pub bias: T,
    pub labels: Vec<i8>,
    /// Training points, when known; needed to evaluate new inputs.
    pub points: Vec<[T; 2]>,
    pub c: T,
    pub tolerance: T,
    pub iterations: usize,
    pub converged: bool,
    /// Free-form description of the kernel the model was trained with.
    pub kernel: String,
}

impl<T: Scalar> SvmModel<T> {
    pub fn n_support(&self) -> usize {
        self.alphas.iter().filter(|&&a| a > T::zero()).count()
    }

    /// `Σ α_i y_i`.
    pub fn label_balance(&self) -> T {
        self.alphas
            .iter()
            .zip(&self.labels)
            .map(|(&a, &y)| a * label_value::<T>(y))
            .sum()
    }

    /// `Σα − ½ Σ α_i α_j y_i y_j K_ij`.
    pub fn dual_objective(&self, gram: &GramMatrix<T>) -> T {
        dual_objective(gram.matrix(), &self.labels, &self.alphas)
    }

    /// Worst per-point KKT violation on the training Gram matrix.
    pub fn kkt_residual(&self, gram: &GramMatrix<T>) -> T {
        let n = self.alphas.len();
        let mut worst = T::zero();
        for i in 0..n {
            let row: Vec<T> = (0..n).map(|j| gram.get(i, j)).collect();
            let margin = label_value::<T>(self.labels[i]) * decide_unchecked(self, &row);
            let r = if self.alphas[i] <= T::zero() {
                (T::one() - margin).max(T::zero())
            } else if self.alphas[i] >= self.c {
                (margin - T::one()).max(T::zero())
            } else {
                (margin - T::one()).abs()
            };
            worst = worst.max(r);
        }
        worst
    }

    pub fn with_points(mut self, points: Vec<[T; 2]>) -> Self {
        self.points = points;
        self
    }

    pub fn with_kernel(mut self, kernel: impl Into<String>) -> Self {
        self.kernel = kernel.into();
        self
    }

    /// Plain-text serialization: a header, key lines, then one
    /// `alpha label x1 x2` line per training point.
    pub fn to_text(&self) -> String {
        let mut out = String::from("qfmap-svm 1\n");
        out.push_str(&format!("kernel {}\n", self.kernel));
        out.push_str(&format!("c {}\n", self.c));
        out.push_str(&format!("tolerance {}\n", self.tolerance));
        out.push_str(&format!("bias {}\n", self.bias));
        out.push_str(&format!("n {}\n", self.alphas.len()));
        for i in 0..self.alphas.len() {
            let (x1, x2) = self
                .points
                .get(i)
                .map(|p| (p[0].to_string(), p[1].to_string()))
                .unwrap_or_else(|| ("nan".into(), "nan".into()));
            out.push_str(&format!("{} {} {x1} {x2}\n", self.alphas[i], self.labels[i]));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |key: &str| -> Result<(usize, String)> {
            let (no, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("missing {key:?} line"),
            })?;
            let rest = line.strip_prefix(key).ok_or(Error::Parse {
                line: no + 1,
                message: format!("expected {key:?}"),
            })?;
            Ok((no + 1, rest.trim().to_string()))
        };
        let (no, v) = next("qfmap-svm")?;
        if v != "1" {
            return Err(Error::Parse { line: no, message: format!("unsupported version {v}") });
        }
        let kernel = next("kernel")?.1;
        let num = |(no, s): (usize, String)| -> Result<T> {
            s.parse::<f64>()
                .map(T::lit)
                .map_err(|e| Error::Parse { line: no, message: e.to_string() })
        };
        let c = num(next("c")?)?;
        let tolerance = num(next("tolerance")?)?;
        let bias = num(next("bias")?)?;
        let (no, n) = next("n")?;
        let n: usize = n.parse().map_err(|_| Error::Parse { line: no, message: "bad count".into() })?;
        let mut alphas = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        let mut points = Vec::with_capacity(n);
        for k in 0..n {
            let (no, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("expected {n} rows, found {k}"),
            })?;
            let bad = |m: &str| Error::Parse { line: no + 1, message: m.to_string() };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let p = |s: &str| s.parse::<f64>().map(T::lit).map_err(|_| bad("bad number"));
            alphas.push(p(f[0])?);
            labels.push(f[1].parse::<i8>().map_err(|_| bad("bad label"))?);
            points.push([p(f[2])?, p(f[3])?]);
        }
        Ok(Self {
            alphas,
            bias,
            labels,
            points,
            c,
            tolerance,
            iterations: 0,
            converged: true,
            kernel,
        })
    }
}

fn label_value<T: Scalar>(y: i8) -> T {
    if y > 0 {
        T::one()
    } else {
        -T::one()
    }
}

fn dual_objective<T: Scalar>(k: &SquareMatrix<T>, labels: &[i8], alphas: &[T]) -> T {
    let n = alphas.len();
    let mut quad = T::zero();
    for i in 0..n {
        if alphas[i] == T::zero() {
            continue;
        }
        for j in 0..n {
            quad = quad
                + alphas[i] * alphas[j] * label_value::<T>(labels[i]) * label_value::<T>(labels[j]) * k.get(i, j);
        }
    }
    alphas.iter().copied().sum::<T>() - T::lit(0.5) * quad
}

/// Signed decision value `Σ α_i y_i K(x_i, x) + b`.
pub fn decide<T: Scalar>(model: &SvmModel<T>, kernel_row: &[T]) -> Result<T> {
    if kernel_row.len() != model.alphas.len() {
        return Err(Error::DimensionMismatch {
            expected: model.alphas.len(),
            found: kernel_row.len(),
        });
    }
    Ok(decide_unchecked(model, kernel_row))
}

fn decide_unchecked<T: Scalar>(model: &SvmModel<T>, kernel_row: &[T]) -> T {
    model
        .alphas
        .iter()
        .zip(&model.labels)
        .zip(kernel_row)
        .filter(|((&a, _), _)| a != T::zero())
        .map(|((&a, &y), &k)| a * label_value::<T>(y) * k)
        .sum::<T>()
        + model.bias
}

/// Class of a decision value; exact zero goes to `+1`.
pub fn classify<T: Scalar>(decision: T) -> i8 {
    if decision >= T::zero() {
        1
    } else {
        -1
    }
}

/// Trains on a precomputed Gram matrix.
///
/// A matrix whose smallest eigenvalue is below `−1e-6` (possible with
/// shot-estimated kernels) is logged and replaced by its PSD projection.
pub fn train<T: Scalar>(gram: &GramMatrix<T>, labels: &[i8], c: T, tolerance: T) -> Result<SvmModel<T>> {
    let n = gram.size();
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    if !has_both(labels) {
        return Err(Error::SingleClass);
    }
    if !(c > T::zero() && c.is_finite()) {
        return Err(Error::InvalidArgument("C must be positive".into()));
    }
    if !(tolerance > T::zero() && tolerance.is_finite()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let eig = symmetric_eigen(gram.matrix());
    let min_eig = eig.values.iter().fold(T::infinity(), |a, &v| a.min(v));
    let clipped;
    let k = if min_eig < -T::lit(PSD_SLACK) {
        log::warn!("Gram matrix has eigenvalue {min_eig}; clipping negative spectrum");
        clipped = clip_negative_spectrum(gram.matrix());
        &clipped
    } else {
        gram.matrix()
    };
    Ok(Smo::new(k, labels, c, tolerance).solve())
}

struct Smo<'a, T: Scalar> {
    k: &'a SquareMatrix<T>,
    y: Vec<T>,
    labels: &'a [i8],
    alpha: Vec<T>,
    grad: Vec<T>,
    c: T,
    tol: T,
}

impl<'a, T: Scalar> Smo<'a, T> {
    fn new(k: &'a SquareMatrix<T>, labels: &'a [i8], c: T, tol: T) -> Self {
        let n = labels.len();
        Self {
            k,
            y: labels.iter().map(|&l| label_value(l)).collect(),
            labels,
            alpha: vec![T::zero(); n],
            grad: vec![-T::one(); n],
            c,
            tol,
        }
    }

    fn q(&self, i: usize, j: usize) -> T {
        self.y[i] * self.y[j] * self.k.get(i, j)
    }

    fn in_up(&self, t: usize) -> bool {
        (self.y[t] > T::zero() && self.alpha[t] < self.c) || (self.y[t] < T::zero() && self.alpha[t] > T::zero())
    }

    fn in_low(&self, t: usize) -> bool {
        (self.y[t] > T::zero() && self.alpha[t] > T::zero()) || (self.y[t] < T::zero() && self.alpha[t] < self.c)
    }

    /// Maximal violating pair, lowest index on ties; `None` once `m − M ≤ tol`.
    fn select_pair(&self) -> Option<(usize, usize)> {
        let n = self.alpha.len();
        let mut i = None;
        let mut g_max = T::neg_infinity();
        let mut j = None;
        let mut g_min = T::infinity();
        for t in 0..n {
            let v = -self.y[t] * self.grad[t];
            if self.in_up(t) && v > g_max {
                g_max = v;
                i = Some(t);
            }
            if self.in_low(t) && v < g_min {
                g_min = v;
                j = Some(t);
            }
        }
        match (i, j) {
            (Some(i), Some(j)) if g_max - g_min > self.tol => Some((i, j)),
            _ => None,
        }
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let tau = T::lit(1e-12);
        let (old_ai, old_aj) = (self.alpha[i], self.alpha[j]);
        let quad = (self.k.get(i, i) + self.k.get(j, j) - T::lit(2.0) * self.k.get(i, j)).max(tau);
        let (gi, gj) = (self.grad[i], self.grad[j]);
        let (mut ai, mut aj) = (old_ai, old_aj);
        if self.y[i] != self.y[j] {
            let delta = (-gi - gj) / quad;
            let diff = ai - aj;
            ai = ai + delta;
            aj = aj + delta;
            if diff > T::zero() {
                if aj < T::zero() {
                    aj = T::zero();
                    ai = diff;
                }
            } else if ai < T::zero() {
                ai = T::zero();
                aj = -diff;
            }
            if diff > T::zero() {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let delta = (gi - gj) / quad;
            let sum = ai + aj;
            ai = ai - delta;
            aj = aj + delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < T::zero() {
                aj = T::zero();
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < T::zero() {
                ai = T::zero();
                aj = sum;
            }
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (dai, daj) = (ai - old_ai, aj - old_aj);
        for t in 0..self.alpha.len() {
            self.grad[t] = self.grad[t] + self.q(t, i) * dai + self.q(t, j) * daj;
        }
    }

    fn bias(&self) -> T {
        let mut sum = T::zero();
        let mut n_free = 0usize;
        for t in 0..self.alpha.len() {
            if self.alpha[t] > T::zero() && self.alpha[t] < self.c {
                sum = sum + -self.y[t] * self.grad[t];
                n_free += 1;
            }
        }
        if n_free > 0 {
            return sum / T::from_count(n_free);
        }
        // no free vector: midpoint of [max over I_up, min over I_low]
        let mut lo = T::neg_infinity();
        let mut hi = T::infinity();
        for t in 0..self.alpha.len() {
            let v = -self.y[t] * self.grad[t];
            if self.in_up(t) {
                lo = lo.max(v);
            }
            if self.in_low(t) {
                hi = hi.min(v);
            }
        }
        if lo.is_finite() && hi.is_finite() {
            (lo + hi) * T::lit(0.5)
        } else if lo.is_finite() {
            lo
        } else {
            hi
        }
    }

    fn solve(mut self) -> SvmModel<T> {
        let n = self.alpha.len();
        let max_iter = MAX_PASSES.saturating_mul(n.max(1));
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            match self.select_pair() {
                Some((i, j)) => self.update(i, j),
                None => {
                    converged = true;
                    break;
                }
            }
            iterations += 1;
        }
        if !converged {
            log::warn!("SMO stopped after {iterations} iterations without meeting tolerance");
        }
        let bias = self.bias();
        SvmModel {
            alphas: self.alpha,
            bias,
            labels: self.labels.to_vec(),
            points: Vec::new(),
            c: self.c,
            tolerance: self.tol,
            iterations,
            converged,
            kernel: String::new(),
        }
    }
}

/// Fraction of rows whose predicted class equals the label.
pub fn accuracy<T: Scalar>(model: &SvmModel<T>, rows: &[Vec<T>], labels: &[i8]) -> Result<f64> {
    let mut correct = 0usize;
    for (row, &y) in rows.iter().zip(labels) {
        if classify(decide(model, row)?) == y {
            correct += 1;
        }
    }
    Ok(correct as f64 / labels.len() as f64)
}

/// Per-fold and mean accuracies of k-fold cross validation.
#[derive(Clone, Debug, PartialEq)]
pub struct CvReport {
    pub fold_train_accuracies: Vec<f64>,
    pub fold_test_accuracies: Vec<f64>,
    pub mean_train: f64,
    pub mean_test: f64,
    pub seed: u64,
}

impl CvReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fold,train_accuracy,test_accuracy\n");
        for (k, (tr, te)) in self.fold_train_accuracies.iter().zip(&self.fold_test_accuracies).enumerate() {
            out.push_str(&format!("{},{tr},{te}\n", k + 1));
        }
        out.push_str(&format!("mean,{},{}\n", self.mean_train, self.mean_test));
        out
    }
}

impl fmt::Display for CvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fold  train   test")?;
        for (k, (tr, te)) in self.fold_train_accuracies.iter().zip(&self.fold_test_accuracies).enumerate() {
            writeln!(f, "{:>4}  {tr:.4}  {te:.4}", k + 1)?;
        }
        writeln!(f, "mean  {:.4}  {:.4}", self.mean_train, self.mean_test)?;
        write!(f, "seed  {}", self.seed)
    }
}

fn shuffled_folds(labels: &[i8], folds: usize, seed: u64) -> std::result::Result<Vec<Vec<usize>>, usize> {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let size = labels.len() / folds;
    let blocks: Vec<Vec<usize>> = order.chunks(size).map(|c| c.to_vec()).collect();
    match blocks
        .iter()
        .position(|b| !has_both(&b.iter().map(|&i| labels[i]).collect::<Vec<_>>()))
    {
        Some(fold) => Err(fold),
        None => Ok(blocks),
    }
}

/// k-fold cross validation over contiguous blocks of a seeded shuffle.
///
/// `build_gram` is called once with every point in dataset order. Each test
/// block must contain both classes; if the first shuffle fails that, one
/// reshuffle with seed `seed ^ 0x9E3779B97F4A7C15` is tried before giving up.
pub fn cross_validate<T, F>(
    dataset: &LabeledDataset<T>,
    build_gram: F,
    folds: usize,
    c: T,
    tolerance: T,
    seed: u64,
) -> Result<CvReport>
where
    T: Scalar,
    F: FnOnce(&[[T; 2]]) -> Result<GramMatrix<T>>,
{
    let n = dataset.len();
    if folds < 2 || n == 0 || !n.is_multiple_of(folds) {
        return Err(Error::UnevenFolds { n, folds });
    }
    let labels = dataset.labels();
    let blocks = shuffled_folds(labels, folds, seed)
        .or_else(|_| shuffled_folds(labels, folds, seed ^ 0x9E37_79B9_7F4A_7C15))
        .map_err(|fold| Error::FoldMissingClass { fold })?;
    let gram = build_gram(dataset.points())?;
    if gram.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gram.size(),
        });
    }
    let mut train_acc = Vec::with_capacity(folds);
    let mut test_acc = Vec::with_capacity(folds);
    for (k, test_idx) in blocks.iter().enumerate() {
        let train_idx: Vec<usize> = blocks
            .iter()
            .enumerate()
            .filter(|(b, _)| *b != k)
            .flat_map(|(_, blk)| blk.iter().copied())
            .collect();
        let train_labels: Vec<i8> = train_idx.iter().map(|&i| labels[i]).collect();
        let test_labels: Vec<i8> = test_idx.iter().map(|&i| labels[i]).collect();
        let model = train(&gram.principal(&train_idx), &train_labels, c, tolerance)?;
        train_acc.push(accuracy(&model, &gram.select(&train_idx, &train_idx), &train_labels)?);
        test_acc.push(accuracy(&model, &gram.select(test_idx, &train_idx), &test_labels)?);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(CvReport {
        mean_train: mean(&train_acc),
        mean_test: mean(&test_acc),
        fold_train_accuracies: train_acc,
        fold_test_accuracies: test_acc,
        seed,
    })
}
