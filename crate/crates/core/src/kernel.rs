//! Quantum kernels and Gram matrices.
//!
//! Three routes compute the same kernel `K(x, z) = |⟨Φ(x)|Φ(z)⟩|²`:
//! directly from statevectors, from Pauli vectors as `2ⁿ Σ a_i(x) a_i(z)`,
//! and by sampling the all-zero frequency of `U†_Φ(x) U_Φ(z) |00⟩`.

use std::fmt;

use rayon::prelude::*;

use crate::encoding::{apply_feature_map, apply_feature_map_inverse, eval_encoding, feature_state, EncodingSpec};
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, SquareMatrix};
use crate::pauli::{decompose, PauliVector};
use crate::scalar::Scalar;
use crate::statevector::{inner_product, sample_measurement, StateVector};

/// How a Gram matrix was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum GramMethod<T> {
    Exact,
    Pauli,
    Shots { shots: u64, seed: u64 },
    Combined { weights: Vec<T> },
}

impl<T: Scalar> fmt::Display for GramMethod<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GramMethod::Exact => write!(f, "method=exact"),
            GramMethod::Pauli => write!(f, "method=pauli"),
            GramMethod::Shots { shots, seed } => write!(f, "method=shots,shots={shots},seed={seed}"),
            GramMethod::Combined { weights } => {
                let w: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                write!(f, "method=combined,weights={}", w.join(";"))
            }
        }
    }
}

/// Symmetric `N×N` kernel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<T: Scalar> {
    values: SquareMatrix<T>,
    method: GramMethod<T>,
}

impl<T: Scalar> GramMatrix<T> {
    /// Wraps precomputed values; `values` must be symmetric.
    pub fn from_values(values: SquareMatrix<T>, method: GramMethod<T>) -> Result<Self> {
        let g = Self { values, method };
        if !g.is_symmetric(T::lit(1e-12)) {
            return Err(Error::Numerical("Gram matrix is not symmetric".into()));
        }
        Ok(g)
    }

    pub fn size(&self) -> usize {
        self.values.n()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values.get(i, j)
    }

    pub fn method(&self) -> &GramMethod<T> {
        &self.method
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.values
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        let n = self.size();
        (0..n).all(|i| (i + 1..n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue(&self.values)
    }

    /// Sub-matrix with the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<T>> {
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c)).collect())
            .collect()
    }

    /// Principal sub-matrix on `idx`, keeping the method tag.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let n = idx.len();
        let data = idx
            .iter()
            .flat_map(|&r| idx.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Self {
            values: SquareMatrix::from_row_major(n, data),
            method: self.method.clone(),
        }
    }

    /// Header line `method=…,size=N` followed by one matrix row per line.
    pub fn to_csv(&self) -> String {
        let n = self.size();
        let mut out = format!("{},size={n}\n", self.method);
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| self.get(r, c).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Nonnegative weights `λ_i` with `Σ λ_i = m`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelWeights<T> {
    weights: Vec<T>,
}

impl<T: Scalar> KernelWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        let m = T::from_count(weights.len());
        if weights.is_empty() {
            return Err(Error::InvalidWeights("at least one weight is required".into()));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < T::zero() || w > m) {
            return Err(Error::InvalidWeights(format!("each weight must lie in [0, {m}]")));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - m).abs() > T::lit(1e-9) {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, expected {m}")));
        }
        Ok(Self { weights })
    }

    /// `λ_i = 1` for each of `m` kernels.
    pub fn equal(m: usize) -> Self {
        Self {
            weights: vec![T::one(); m],
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `|⟨Φ(x)|Φ(z)⟩|²` from statevectors.
pub fn kernel_exact<T: Scalar>(spec: &EncodingSpec<T>, x: [T; 2], z: [T; 2]) -> Result<T> {
    let a = feature_state(spec, x)?;
    let b = feature_state(spec, z)?;
    Ok(fidelity(&a, &b))
}

fn fidelity<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> T {
    inner_product(a, b)
        .expect("feature states share a width")
        .norm_sqr()
}

/// `2ⁿ Σ a_i(x) a_i(z)` from Pauli vectors.
pub fn kernel_pauli<T: Scalar>(spec: &EncodingSpec<T>, x: [T; 2], z: [T; 2]) -> Result<T> {
    let a = decompose(&feature_state(spec, x)?);
    let b = decompose(&feature_state(spec, z)?);
    Ok(pauli_kernel_value(&a, &b))
}

fn pauli_kernel_value<T: Scalar>(a: &PauliVector<T>, b: &PauliVector<T>) -> T {
    let scale = T::from_count(1usize << a.n_qubits());
    scale * a.dot(b).expect("feature vectors share a width")
}

/// Fraction of all-zero outcomes over `shots` measurements of `U†_Φ(x) U_Φ(z) |00⟩`.
pub fn kernel_shots<T: Scalar>(
    spec: &EncodingSpec<T>,
    x: [T; 2],
    z: [T; 2],
    shots: u64,
    seed: u64,
) -> Result<T> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let px = eval_encoding(spec, x)?;
    let pz = eval_encoding(spec, z)?;
    shots_from_phases(px, pz, shots, seed)
}

fn shots_from_phases<T: Scalar>(px: [T; 3], pz: [T; 3], shots: u64, seed: u64) -> Result<T> {
    let forward = apply_feature_map(&StateVector::zero(2)?, pz)?;
    let composed = apply_feature_map_inverse(&forward, px)?;
    let counts = sample_measurement(&composed, shots, seed)?;
    Ok(T::lit(counts.zero_fraction()))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sampling seed for Gram entry `(i, j)`:
/// `splitmix64(splitmix64(splitmix64(base) ^ lo) ^ hi)` with `lo = min(i, j)`, `hi = max(i, j)`.
pub fn pair_seed(base: u64, i: usize, j: usize) -> u64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    splitmix64(splitmix64(splitmix64(base) ^ lo as u64) ^ hi as u64)
}

/// Fills a symmetric matrix by evaluating each unordered pair `i ≤ j` once.
///
/// Pairs are evaluated in parallel; each entry depends only on `(i, j)`, so
/// the result does not depend on scheduling.
pub fn gram_from_fn<T, F>(n: usize, method: GramMethod<T>, kernel: F) -> Result<GramMatrix<T>>
where
    T: Scalar,
    F: Fn(usize, usize) -> Result<T> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("Gram matrix needs at least one point".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let values: Vec<T> = pairs
        .par_iter()
        .map(|&(i, j)| {
            kernel(i, j).map_err(|e| Error::PairFailed {
                i,
                j,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut m = SquareMatrix::zeros(n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        m.set(i, j, v);
        m.set(j, i, v);
    }
    Ok(GramMatrix { values: m, method })
}

/// Gram matrix of one encoding over `points`.
///
/// For `Shots` the diagonal is exactly 1 and pair `(i, j)` is sampled with
/// [`pair_seed`]`(seed, i, j)`.
pub fn gram<T: Scalar>(
    spec: &EncodingSpec<T>,
    points: &[[T; 2]],
    method: GramMethod<T>,
) -> Result<GramMatrix<T>> {
    let n = points.len();
    let per_point_err = |k: usize, e: Error| Error::PairFailed {
        i: k,
        j: k,
        source: Box::new(e),
    };
    match method {
        GramMethod::Exact => {
            let states: Vec<StateVector<T>> = points
                .iter()
                .enumerate()
                .map(|(k, &x)| feature_state(spec, x).map_err(|e| per_point_err(k, e)))
                .collect::<Result<_>>()?;
            gram_from_fn(n, GramMethod::Exact, |i, j| Ok(fidelity(&states[i], &states[j])))
        }
        GramMethod::Pauli => {
            let vecs: Vec<PauliVector<T>> = points
                .iter()
                .enumerate()
                .map(|(k, &x)| {
                    feature_state(spec, x)
                        .map(|s| decompose(&s))
                        .map_err(|e| per_point_err(k, e))
                })
                .collect::<Result<_>>()?;
            gram_from_fn(n, GramMethod::Pauli, |i, j| Ok(pauli_kernel_value(&vecs[i], &vecs[j])))
        }
        GramMethod::Shots { shots, seed } => {
            if shots == 0 {
                return Err(Error::ZeroShots);
            }
            let phases: Vec<[T; 3]> = points
                .iter()
                .enumerate()
                .map(|(k, &x)| eval_encoding(spec, x).map_err(|e| per_point_err(k, e)))
                .collect::<Result<_>>()?;
            gram_from_fn(n, GramMethod::Shots { shots, seed }, |i, j| {
                if i == j {
                    Ok(T::one())
                } else {
                    shots_from_phases(phases[i], phases[j], shots, pair_seed(seed, i, j))
                }
            })
        }
        GramMethod::Combined { .. } => Err(Error::InvalidArgument(
            "combined Gram matrices are built with `combine`".into(),
        )),
    }
}

/// Entrywise `Σ λ_i K_i`.
pub fn combine<T: Scalar>(grams: &[GramMatrix<T>], weights: &KernelWeights<T>) -> Result<GramMatrix<T>> {
    if grams.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} kernels",
            weights.len(),
            grams.len()
        )));
    }
    let n = grams[0].size();
    if let Some(g) = grams.iter().find(|g| g.size() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.size(),
        });
    }
    let mut m = SquareMatrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let v = grams
                .iter()
                .zip(weights.as_slice())
                .map(|(g, &w)| w * g.get(r, c))
                .sum();
            m.set(r, c, v);
        }
    }
    Ok(GramMatrix {
        values: m,
        method: GramMethod::Combined {
            weights: weights.as_slice().to_vec(),
        },
    })
}
