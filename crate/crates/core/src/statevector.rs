//! Pure-state simulator for the feature-map circuit family.
//!
//! Amplitudes are stored in computational-basis order with qubit 1 (index 0)
//! as the least-significant bit of the basis index, so basis state `b` has
//! qubit `k` in state `(b >> k) & 1`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance on `Σ|amplitude|² = 1` enforced at construction.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Normalized pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Scalar> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// The all-zero basis state `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector, checking length and normalization.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr().as_f64();
        if (norm - 1.0).abs() > NORM_TOLERANCE.max(1e2 * T::epsilon().as_f64()) {
            return Err(Error::Numerical(format!(
                "state is not normalized: squared norm {norm}"
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outcome probabilities `|amplitude_b|²` in basis order.
    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits >= usize::BITS as usize / 2 {
        return Err(Error::InvalidArgument(format!(
            "unsupported qubit count {n_qubits}"
        )));
    }
    Ok(())
}

/// Applies a Hadamard gate to every qubit.
pub fn apply_hadamard_all<T: Scalar>(state: &StateVector<T>) -> StateVector<T> {
    let mut amps = state.amplitudes.clone();
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    for q in 0..state.n_qubits {
        let bit = 1usize << q;
        for b in 0..amps.len() {
            if b & bit == 0 {
                let a0 = amps[b];
                let a1 = amps[b | bit];
                amps[b] = (a0 + a1).scale(inv_sqrt2);
                amps[b | bit] = (a0 - a1).scale(inv_sqrt2);
            }
        }
    }
    StateVector {
        n_qubits: state.n_qubits,
        amplitudes: amps,
    }
}

/// Pairwise `Z_k Z_l` phase coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairPhase<T> {
    pub first: usize,
    pub second: usize,
    pub phi: T,
}

impl<T> PairPhase<T> {
    pub fn new(first: usize, second: usize, phi: T) -> Self {
        Self { first, second, phi }
    }
}

/// Multiplies the amplitude of basis state `b` by
/// `exp(i (Σ_k φ_k z_k(b) + Σ φ_kl z_k(b) z_l(b)))` with `z_k(b) = (−1)^{bit k of b}`.
///
/// This is the diagonal unitary `exp(i Σ φ_k Z_k + i Σ φ_kl Z_k Z_l)`.
pub fn apply_diagonal_phase<T: Scalar>(
    state: &StateVector<T>,
    phi_single: &[T],
    phi_pairs: &[PairPhase<T>],
) -> Result<StateVector<T>> {
    let n = state.n_qubits;
    if phi_single.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phi_single.len(),
        });
    }
    for p in phi_pairs {
        for idx in [p.first, p.second] {
            if idx >= n {
                return Err(Error::QubitOutOfRange { index: idx, n_qubits: n });
            }
        }
        if p.first == p.second {
            return Err(Error::InvalidPair(p.first, p.second));
        }
    }
    let z = |b: usize, k: usize| -> T {
        if (b >> k) & 1 == 0 {
            T::one()
        } else {
            -T::one()
        }
    };
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(b, &a)| {
            let mut angle = T::zero();
            for (k, &phi) in phi_single.iter().enumerate() {
                angle = angle + phi * z(b, k);
            }
            for p in phi_pairs {
                angle = angle + p.phi * z(b, p.first) * z(b, p.second);
            }
            a * Complex::from_polar(T::one(), angle)
        })
        .collect();
    Ok(StateVector {
        n_qubits: n,
        amplitudes,
    })
}

/// `⟨a|b⟩ = Σ conj(a_k) b_k`.
pub fn inner_product<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Complex<T>> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits,
            found: b.n_qubits,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        }))
}

/// Z-basis measurement record.
///
/// Keys are bit strings written qubit 1 first, so `"01"` means qubit 1 read
/// `0` and qubit 2 read `1` (basis index 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementCounts {
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl MeasurementCounts {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn get(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    /// Number of all-zero outcomes.
    pub fn zero_count(&self) -> u64 {
        self.counts
            .iter()
            .find(|(k, _)| k.bytes().all(|c| c == b'0'))
            .map(|(_, &v)| v)
            .unwrap_or(0)
    }

    /// Fraction of shots that produced the all-zero string.
    pub fn zero_fraction(&self) -> f64 {
        self.zero_count() as f64 / self.shots as f64
    }
}

/// Renders basis index `b` as a bit string, qubit 1 first.
pub fn bit_string(b: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|k| if (b >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Draws `shots` Z-basis outcomes from `p(b) = |amplitude_b|²`.
///
/// Uses a ChaCha8 stream seeded from `seed` and inverse-CDF lookup on one
/// uniform `f64` per shot, so identical `(state, shots, seed)` give identical counts.
pub fn sample_measurement<T: Scalar>(
    state: &StateVector<T>,
    shots: u64,
    seed: u64,
) -> Result<MeasurementCounts> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0f64;
    for a in &state.amplitudes {
        acc += a.norm_sqr().as_f64();
        cdf.push(acc);
    }
    // guard against rounding so the last outcome absorbs any residue
    let total = acc;
    let mut tally = vec![0u64; state.dim()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        tally[idx] += 1;
    }
    let counts = tally
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(b, c)| (bit_string(b, state.n_qubits), c))
        .collect();
    Ok(MeasurementCounts { shots, counts })
}
