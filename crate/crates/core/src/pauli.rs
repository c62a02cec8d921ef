//! Real-vector (Pauli coefficient) representation of feature states.
//!
//! `ρ = Σ_i a_i σ_i` with `a_i = ⟨ψ|σ_i|ψ⟩ / 2ⁿ`. The index of a Pauli string
//! is `Σ_k d_k 4^k` where `d_k ∈ {I:0, X:1, Y:2, Z:3}` is the letter acting on
//! qubit `k + 1`, and labels are written qubit 1 first. For two qubits this
//! gives the order II, XI, YI, ZI, IX, …, ZZ.

use num_complex::Complex;
use rayon::prelude::*;

use crate::encoding::{eval_encoding, feature_state, EncodingSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::statevector::StateVector;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Label of Pauli index `index` on `n_qubits` qubits, qubit 1 first.
pub fn pauli_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|k| LETTERS[(index >> (2 * k)) & 3])
        .collect()
}

/// Inverse of [`pauli_label`]; case-insensitive.
pub fn pauli_index(label: &str) -> Result<usize> {
    let mut index = 0usize;
    for (k, ch) in label.chars().enumerate() {
        let d = LETTERS
            .iter()
            .position(|&l| l == ch.to_ascii_uppercase())
            .ok_or_else(|| Error::InvalidArgument(format!("bad Pauli label {label:?}")))?;
        index |= d << (2 * k);
    }
    if label.is_empty() {
        return Err(Error::InvalidArgument("empty Pauli label".into()));
    }
    Ok(index)
}

/// The `4ⁿ` real coefficients `a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVector<T> {
    n_qubits: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> PauliVector<T> {
    pub fn new(n_qubits: usize, coeffs: Vec<T>) -> Result<Self> {
        let expected = 1usize << (2 * n_qubits);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self { n_qubits, coeffs })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn get(&self, index: usize) -> T {
        self.coeffs[index]
    }

    /// `Σ a_i b_i`.
    pub fn dot(&self, other: &Self) -> Result<T> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a * b)
            .sum())
    }
}

/// `⟨ψ|σ|ψ⟩` for the Pauli string with the given index, by bit arithmetic.
pub fn expectation<T: Scalar>(state: &StateVector<T>, index: usize) -> Complex<T> {
    let n = state.n_qubits();
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    let mut n_y = 0u32;
    for k in 0..n {
        match (index >> (2 * k)) & 3 {
            1 => x_mask |= 1 << k,
            2 => {
                x_mask |= 1 << k;
                z_mask |= 1 << k;
                n_y += 1;
            }
            3 => z_mask |= 1 << k,
            _ => {}
        }
    }
    // σ|b⟩ = i^{n_y} (−1)^{popcount(b & z_mask)} |b ⊕ x_mask⟩
    let amps = state.amplitudes();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (b, &a) in amps.iter().enumerate() {
        let term = amps[b ^ x_mask].conj() * a;
        if (b & z_mask).count_ones().is_multiple_of(2) {
            acc = acc + term;
        } else {
            acc = acc - term;
        }
    }
    let i_pow = match n_y % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    };
    acc * i_pow
}

/// Pauli decomposition of a pure state.
pub fn decompose<T: Scalar>(state: &StateVector<T>) -> PauliVector<T> {
    let n = state.n_qubits();
    let scale = T::one() / T::from_count(state.dim());
    // ⟨I⟩ is the squared norm, exactly 1 for a state; taking it literally
    // would let rounding noise split the constant II axis during screening
    let coeffs = (0..1usize << (2 * n))
        .map(|i| if i == 0 { scale } else { expectation(state, i).re * scale })
        .collect();
    PauliVector { n_qubits: n, coeffs }
}

/// Closed-form two-qubit coefficients as functions of `(φ₁, φ₂, φ₁₂)`.
pub fn table1_coefficients<T: Scalar>(phi1: T, phi2: T, phi12: T) -> PauliVector<T> {
    let (s1, c1) = phi1.sin_cos();
    let (s2, c2) = phi2.sin_cos();
    let (s12, c12) = phi12.sin_cos();
    let q = T::lit(0.25);
    let sq = |v: T| v * v;
    let coeffs = vec![
        // II
        q,
        // XI
        s1 * (s2 * sq(s12) + s1 * sq(c12) + c2 * c1 * s12) * q,
        // YI
        (-s2 * c1 * sq(s12) - s1 * c1 * sq(c12) + c2 * sq(s1) * s12) * q,
        // ZI
        c1 * c12 * q,
        // IX
        s2 * (s1 * sq(s12) + s2 * sq(c12) + c1 * c2 * s12) * q,
        // XX
        (sq(s1) * sq(s2) + s12 * c1 * c2 * (s1 + s2)) * q,
        // YX
        (-sq(s2) * s1 * c1 + s12 * c2 * (s1 * s2 - sq(c1))) * q,
        // ZX
        c12 * (-s1 * c2 * s12 + c1 * sq(s2) + s2 * c2 * s12) * q,
        // IY
        (-s1 * c2 * sq(s12) - s2 * c2 * sq(c12) + c1 * sq(s2) * s12) * q,
        // XY
        (-sq(s1) * s2 * c2 + s12 * c1 * (s1 * s2 - sq(c2))) * q,
        // YY
        (s1 * c1 * s2 * c2 - s12 * (sq(c2) * s1 + s2 * sq(c1))) * q,
        // ZY
        s2 * (-s1 * s12 * c12 - c2 * c1 * c12 + s2 * c12 * s12) * q,
        // IZ
        c2 * c12 * q,
        // XZ
        c12 * (-s2 * c1 * s12 + c2 * sq(s1) + s1 * c1 * s12) * q,
        // YZ
        s1 * (-s2 * s12 * c12 - c1 * c2 * c12 + s1 * c12 * s12) * q,
        // ZZ
        c1 * c2 * q,
    ];
    PauliVector { n_qubits: 2, coeffs }
}

/// Pauli vector of `|Φ(x)⟩`.
pub fn feature_vector<T: Scalar>(spec: &EncodingSpec<T>, x: [T; 2]) -> Result<PauliVector<T>> {
    Ok(decompose(&feature_state(spec, x)?))
}

/// Square sampling of one coefficient over `range × range`.
///
/// Row `r` holds `x₂ = hi − r·step` (descending), column `c` holds
/// `x₁ = lo + c·step` (ascending).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    resolution: usize,
    range: (T, T),
    values: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn range(&self) -> (T, T) {
        self.range
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.resolution + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks(self.resolution)
    }

    /// Lattice coordinate `(x₁, x₂)` of a cell.
    pub fn point(&self, row: usize, col: usize) -> [T; 2] {
        lattice_point(self.range, self.resolution, row, col)
    }

    /// One grid row per line, comma separated, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Binary 8-bit PGM, min–max normalized; a constant grid maps to mid-gray.
    pub fn to_pgm(&self) -> Vec<u8> {
        let (lo, hi) = self.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v.as_f64()), hi.max(v.as_f64()))
        });
        let mut out = format!("P5\n{} {}\n255\n", self.resolution, self.resolution).into_bytes();
        let span = hi - lo;
        out.extend(self.values.iter().map(|v| {
            if span <= 0.0 {
                128
            } else {
                ((v.as_f64() - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
            }
        }));
        out
    }
}

fn lattice_point<T: Scalar>(range: (T, T), resolution: usize, row: usize, col: usize) -> [T; 2] {
    let (lo, hi) = range;
    let steps = T::from_count(resolution - 1);
    let at = |i: usize| lo + (hi - lo) * T::from_count(i) / steps;
    [at(col), at(resolution - 1 - row)]
}

fn check_grid_args<T: Scalar>(range: (T, T), resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
        return Err(Error::InvalidArgument("grid range must be finite with lo < hi".into()));
    }
    Ok(())
}

/// Grid of `a_{pauli_index}(x)` for a two-qubit encoding.
pub fn coefficient_grid<T: Scalar>(
    spec: &EncodingSpec<T>,
    pauli_index: usize,
    range: (T, T),
    resolution: usize,
) -> Result<Grid<T>> {
    if pauli_index >= 16 {
        return Err(Error::InvalidArgument(format!(
            "Pauli index {pauli_index} out of range for two qubits"
        )));
    }
    Ok(coefficient_grids(spec, range, resolution)?.swap_remove(pauli_index))
}

/// All sixteen coefficient grids, indexed like [`PauliVector`].
pub fn coefficient_grids<T: Scalar>(
    spec: &EncodingSpec<T>,
    range: (T, T),
    resolution: usize,
) -> Result<Vec<Grid<T>>> {
    check_grid_args(range, resolution)?;
    let rows: Vec<Vec<PauliVector<T>>> = (0..resolution)
        .into_par_iter()
        .map(|r| {
            (0..resolution)
                .map(|c| feature_vector(spec, lattice_point(range, resolution, r, c)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..16)
        .map(|i| Grid {
            resolution,
            range,
            values: rows.iter().flatten().map(|a| a.get(i)).collect(),
        })
        .collect())
}

/// Closed-form coefficients for an encoded point, for cross-checking.
pub fn closed_form_at<T: Scalar>(spec: &EncodingSpec<T>, x: [T; 2]) -> Result<PauliVector<T>> {
    let [p1, p2, p12] = eval_encoding(spec, x)?;
    Ok(table1_coefficients(p1, p2, p12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{feature_state, EncodingId};
    use crate::statevector::{apply_diagonal_phase, apply_hadamard_all, inner_product};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn spec(id: EncodingId) -> EncodingSpec<f64> {
        EncodingSpec::builtin(id).unwrap()
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector<f64> {
        let mut v: Vec<C> = (0..1 << n)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(n, v).unwrap()
    }

    /// Dense 2ⁿ×2ⁿ Pauli matrix; qubit 1 is the least-significant tensor factor.
    fn dense_pauli(index: usize, n: usize) -> Vec<Vec<C>> {
        let z = C::new(0.0, 0.0);
        let o = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        let single = |d: usize| -> [[C; 2]; 2] {
            match d {
                0 => [[o, z], [z, o]],
                1 => [[z, o], [o, z]],
                2 => [[z, -i], [i, z]],
                _ => [[o, z], [z, -o]],
            }
        };
        let dim = 1 << n;
        let mut m = vec![vec![z; dim]; dim];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let mut v = o;
                for k in 0..n {
                    let p = single((index >> (2 * k)) & 3);
                    v *= p[(r >> k) & 1][(c >> k) & 1];
                }
                *cell = v;
            }
        }
        m
    }

    #[test]
    fn labels_follow_row_order() {
        let labels: Vec<String> = (0..16).map(|i| pauli_label(i, 2)).collect();
        assert_eq!(
            labels,
            ["II", "XI", "YI", "ZI", "IX", "XX", "YX", "ZX", "IY", "XY", "YY", "ZY", "IZ", "XZ", "YZ", "ZZ"]
        );
        for (i, l) in labels.iter().enumerate() {
            assert_eq!(pauli_index(l).unwrap(), i);
        }
        assert!(pauli_index("XQ").is_err());
        assert!(pauli_index("").is_err());
    }

    #[test]
    fn expectation_matches_dense_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            let psi = random_state(n, &mut rng);
            for idx in 0..1 << (2 * n) {
                let m = dense_pauli(idx, n);
                let a = psi.amplitudes();
                let mut dense = C::new(0.0, 0.0);
                for r in 0..a.len() {
                    for c in 0..a.len() {
                        dense += a[r].conj() * m[r][c] * a[c];
                    }
                }
                let fast = expectation(&psi, idx);
                assert!((fast - dense).norm() < 1e-12, "n={n} idx={idx}");
                assert!(fast.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_state_decomposition() {
        let a = decompose(&StateVector::<f64>::zero(2).unwrap());
        for (i, &v) in a.coeffs().iter().enumerate() {
            let expect = if ["II", "ZI", "IZ", "ZZ"].contains(&pauli_label(i, 2).as_str()) { 0.25 } else { 0.0 };
            assert!((v - expect).abs() < 1e-15, "{}", pauli_label(i, 2));
        }
    }

    #[test]
    fn purity_identity_against_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let psi = random_state(2, &mut rng);
            let a = decompose(&psi);
            let sum_sq: f64 = a.coeffs().iter().map(|v| v * v).sum();
            // tr ρ² via dense ρ
            let amps = psi.amplitudes();
            let mut tr = 0.0;
            for r in 0..4 {
                for c in 0..4 {
                    let rho_rc = amps[r] * amps[c].conj();
                    let rho_cr = amps[c] * amps[r].conj();
                    tr += (rho_rc * rho_cr).re;
                }
            }
            assert!((tr - 1.0).abs() < 1e-12);
            assert!((4.0 * sum_sq - tr).abs() < 1e-9);
            assert!((a.get(0) - 0.25).abs() < 1e-10);
            for &v in a.coeffs() {
                assert!(v.abs() <= 0.25 + 1e-10);
            }
        }
    }

    #[test]
    fn closed_form_at_zero_phases() {
        let a = table1_coefficients(0.0f64, 0.0, 0.0);
        let b = decompose(&StateVector::<f64>::zero(2).unwrap());
        for i in 0..16 {
            assert!((a.get(i) - b.get(i)).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_quarter_turn() {
        let a = table1_coefficients(std::f64::consts::FRAC_PI_2, 0.0, 0.0);
        assert!(a.get(15).abs() < 1e-16);
        assert!((a.get(12) - 0.25).abs() < 1e-16);
        assert!(a.get(3).abs() < 1e-16);
    }

    #[test]
    fn closed_form_matches_simulator() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pi = std::f64::consts::PI;
        for _ in 0..1000 {
            let p: [f64; 3] = [(); 3].map(|_| rng.gen_range(-pi..pi));
            let psi = crate::encoding::apply_feature_map(&StateVector::zero(2).unwrap(), p).unwrap();
            let sim = decompose(&psi);
            let closed = table1_coefficients(p[0], p[1], p[2]);
            for i in 0..16 {
                assert!((sim.get(i) - closed.get(i)).abs() < 1e-10, "{}", pauli_label(i, 2));
            }
        }
    }

    #[test]
    fn builtin_feature_states_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for id in EncodingId::BUILTIN {
            let s = spec(id);
            for _ in 0..200 {
                let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let sim = feature_vector(&s, x).unwrap();
                let closed = closed_form_at(&s, x).unwrap();
                for i in 0..16 {
                    assert!((sim.get(i) - closed.get(i)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn kernel_reconstruction_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=3 {
            for _ in 0..20 {
                let a = random_state(n, &mut rng);
                let b = random_state(n, &mut rng);
                let lhs = (1 << n) as f64 * decompose(&a).dot(&decompose(&b)).unwrap();
                let rhs = inner_product(&a, &b).unwrap().norm_sqr();
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn general_n_states_decompose() {
        let s = apply_hadamard_all(&StateVector::<f64>::zero(3).unwrap());
        let s = apply_diagonal_phase(&s, &[0.1, 0.2, 0.3], &[]).unwrap();
        let a = decompose(&s);
        assert_eq!(a.coeffs().len(), 64);
        assert!((a.get(0) - 0.125).abs() < 1e-12);
        let sum_sq: f64 = a.coeffs().iter().map(|v| v * v).sum();
        assert!((sum_sq - 0.125).abs() < 1e-9);
    }

    #[test]
    fn grid_identity_row_is_constant() {
        let g = coefficient_grid(&spec(EncodingId::Ef4), 0, (-1.0, 1.0), 5).unwrap();
        assert!(g.rows().flatten().all(|&v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn grid_zz_follows_cosines() {
        let g = coefficient_grid(&spec(EncodingId::Ef1), 15, (-1.0, 1.0), 3).unwrap();
        let xs = [-1.0f64, 0.0, 1.0];
        for r in 0..3 {
            for c in 0..3 {
                let (x1, x2) = (xs[c], xs[2 - r]);
                assert_eq!(g.point(r, c), [x1, x2]);
                assert!((g.get(r, c) - x1.cos() * x2.cos() / 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zz_grid_independent_of_phi12() {
        let a = coefficient_grid(&spec(EncodingId::Ef1), 15, (-1.0, 1.0), 11).unwrap();
        let b = coefficient_grid(&spec(EncodingId::Ef2), 15, (-1.0, 1.0), 11).unwrap();
        for (x, y) in a.rows().flatten().zip(b.rows().flatten()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_argument_errors() {
        let s = spec(EncodingId::Ef1);
        assert!(coefficient_grid(&s, 16, (-1.0, 1.0), 3).is_err());
        assert!(coefficient_grid(&s, 0, (-1.0, 1.0), 1).is_err());
        assert!(coefficient_grid(&s, 0, (1.0, -1.0), 3).is_err());
        let bad = EncodingSpec::<f64>::from_expressions(None, None, "1/x1").unwrap();
        match coefficient_grid(&bad, 0, (-1.0, 1.0), 3) {
            Err(Error::NonFiniteEncoding { x1, .. }) => assert_eq!(x1, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serialization_formats() {
        let g = coefficient_grid(&spec(EncodingId::Ef1), 0, (-1.0, 1.0), 3).unwrap();
        assert_eq!(g.to_csv(), "0.25,0.25,0.25\n".repeat(3));
        let pgm = g.to_pgm();
        assert!(pgm.starts_with(b"P5\n3 3\n255\n"));
        assert_eq!(pgm.len(), b"P5\n3 3\n255\n".len() + 9);
        let z = coefficient_grid(&spec(EncodingId::Ef1), 15, (-1.0, 1.0), 3).unwrap().to_pgm();
        let body = &z[z.len() - 9..];
        assert_eq!(body[4], 255);
        assert_eq!(body[0], 0);
    }

    #[test]
    fn feature_state_zero_point_is_ground() {
        let psi = feature_state(&spec(EncodingId::Ef1), [0.0, 0.0]).unwrap();
        assert!((psi.amplitude(0).norm() - 1.0).abs() < 1e-14);
    }
}
