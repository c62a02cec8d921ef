//! Dense symmetric eigen-decomposition (cyclic Jacobi).

use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data must be n*n");
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.n + c] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }
}

/// Eigenvalues (unsorted) and column eigenvectors of a symmetric matrix.
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: SquareMatrix<T>,
}

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
pub fn symmetric_eigen<T: Scalar>(m: &SquareMatrix<T>) -> SymmetricEigen<T> {
    let n = m.n;
    let mut a = m.clone();
    let mut v = SquareMatrix::zeros(n);
    for i in 0..n {
        v.set(i, i, T::one());
    }
    let frob: T = a.data.iter().map(|&x| x * x).sum::<T>().sqrt();
    let target = T::epsilon() * frob.max(T::min_positive_value());
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a.get(p, q) * a.get(p, q))
            .sum::<T>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    SymmetricEigen {
        values: (0..n).map(|i| a.get(i, i)).collect(),
        vectors: v,
    }
}

pub fn min_eigenvalue<T: Scalar>(m: &SquareMatrix<T>) -> T {
    symmetric_eigen(m)
        .values
        .into_iter()
        .fold(T::infinity(), |acc, v| acc.min(v))
}

/// Rebuilds the matrix with negative eigenvalues set to zero.
pub fn clip_negative_spectrum<T: Scalar>(m: &SquareMatrix<T>) -> SquareMatrix<T> {
    let eig = symmetric_eigen(m);
    let n = m.n;
    let mut out = SquareMatrix::zeros(n);
    for r in 0..n {
        for c in r..n {
            let v: T = (0..n)
                .map(|k| eig.vectors.get(r, k) * eig.values[k].max(T::zero()) * eig.vectors.get(c, k))
                .sum();
            out.set(r, c, v);
            out.set(c, r, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> SquareMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SquareMatrix::zeros(n);
        for r in 0..n {
            for c in r..n {
                let v = rng.gen_range(-1.0..1.0);
                m.set(r, c, v);
                m.set(c, r, v);
            }
        }
        m
    }

    #[test]
    fn eigenvalues_match_nalgebra() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (12, 4), (30, 5)] {
            let m = random_symmetric(n, seed);
            let mut ours = symmetric_eigen(&m).values;
            ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let na = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice());
            let mut theirs: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eigenvectors_reconstruct() {
        let m = random_symmetric(8, 9);
        let eig = symmetric_eigen(&m);
        for r in 0..8 {
            for c in 0..8 {
                let v: f64 = (0..8).map(|k| eig.vectors.get(r, k) * eig.values[k] * eig.vectors.get(c, k)).sum();
                assert!((v - m.get(r, c)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn clipping_yields_psd() {
        let m = random_symmetric(10, 11);
        assert!(min_eigenvalue(&m) < 0.0);
        let clipped = clip_negative_spectrum(&m);
        assert!(min_eigenvalue(&clipped) > -1e-10);
    }
}
