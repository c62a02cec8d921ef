//! Encoding functions and the two-layer feature-map circuit.
//!
//! An encoding maps `x ∈ ℝ²` to three phases `(φ₁, φ₂, φ₁₂)`. The circuit is
//! `U_Φ · H⊗H · U_Φ · H⊗H` applied to `|00⟩`, where each phase layer `U_Φ` is
//! `u1(φ₁)` on qubit 1, `u1(φ₂)` on qubit 2 and `CNOT · u1(φ₁₂) · CNOT`, with
//! `u1(φ) = diag{1, e^{iφ}}`. Up to a global phase that layer is the diagonal
//! `exp(−i/2 · (φ₁ ZI + φ₂ IZ + φ₁₂ ZZ))`; with this normalization the Pauli
//! coefficients of the output state are exactly the closed forms in
//! [`crate::pauli::table1_coefficients`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::Scalar;
use crate::statevector::{apply_diagonal_phase, apply_hadamard_all, PairPhase, StateVector};

/// Which encoding a spec implements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EncodingId {
    /// `φ₁₂ = π x₁ x₂`
    Ef1,
    /// `φ₁₂ = (π/2)(1 − x₁)(1 − x₂)`
    Ef2,
    /// `φ₁₂ = exp(|x₁ − x₂|² / (8 / ln π))`
    Ef3,
    /// `φ₁₂ = π / (3 cos x₁ cos x₂)`
    Ef4,
    /// `φ₁₂ = π cos x₁ cos x₂`
    Ef5,
    Custom,
}

impl EncodingId {
    pub const BUILTIN: [EncodingId; 5] = [
        EncodingId::Ef1,
        EncodingId::Ef2,
        EncodingId::Ef3,
        EncodingId::Ef4,
        EncodingId::Ef5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EncodingId::Ef1 => "ef1",
            EncodingId::Ef2 => "ef2",
            EncodingId::Ef3 => "ef3",
            EncodingId::Ef4 => "ef4",
            EncodingId::Ef5 => "ef5",
            EncodingId::Custom => "custom",
        }
    }
}

impl fmt::Display for EncodingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncodingId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ef1" => Ok(EncodingId::Ef1),
            "ef2" => Ok(EncodingId::Ef2),
            "ef3" => Ok(EncodingId::Ef3),
            "ef4" => Ok(EncodingId::Ef4),
            "ef5" => Ok(EncodingId::Ef5),
            "custom" => Ok(EncodingId::Custom),
            other => Err(Error::InvalidArgument(format!("unknown encoding {other:?}"))),
        }
    }
}

pub type PhaseFn<T> = Arc<dyn Fn([T; 2]) -> T + Send + Sync>;

/// The triple `Φ(x) = {φ₁, φ₂, φ₁₂}` selecting one feature map.
#[derive(Clone)]
pub struct EncodingSpec<T: Scalar> {
    id: EncodingId,
    phi1: PhaseFn<T>,
    phi2: PhaseFn<T>,
    phi12: PhaseFn<T>,
}

impl<T: Scalar> fmt::Debug for EncodingSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EncodingSpec").field("id", &self.id).finish()
    }
}

fn x1<T: Scalar>() -> PhaseFn<T> {
    Arc::new(|x: [T; 2]| x[0])
}

fn x2<T: Scalar>() -> PhaseFn<T> {
    Arc::new(|x: [T; 2]| x[1])
}

impl<T: Scalar> EncodingSpec<T> {
    /// One of the five built-in encodings; all fix `φ₁ = x₁`, `φ₂ = x₂`.
    pub fn builtin(id: EncodingId) -> Result<Self> {
        let phi12: PhaseFn<T> = match id {
            EncodingId::Ef1 => Arc::new(|x: [T; 2]| T::PI() * x[0] * x[1]),
            EncodingId::Ef2 => Arc::new(|x: [T; 2]| {
                T::FRAC_PI_2() * (T::one() - x[0]) * (T::one() - x[1])
            }),
            EncodingId::Ef3 => Arc::new(|x: [T; 2]| {
                let d = (x[0] - x[1]).abs();
                (d * d / (T::lit(8.0) / T::PI().ln())).exp()
            }),
            EncodingId::Ef4 => {
                Arc::new(|x: [T; 2]| T::PI() / (T::lit(3.0) * x[0].cos() * x[1].cos()))
            }
            EncodingId::Ef5 => Arc::new(|x: [T; 2]| T::PI() * x[0].cos() * x[1].cos()),
            EncodingId::Custom => {
                return Err(Error::InvalidArgument(
                    "custom encodings need explicit phase functions".into(),
                ))
            }
        };
        Ok(Self {
            id,
            phi1: x1(),
            phi2: x2(),
            phi12,
        })
    }

    /// User-supplied phase functions.
    pub fn custom(phi1: PhaseFn<T>, phi2: PhaseFn<T>, phi12: PhaseFn<T>) -> Self {
        Self {
            id: EncodingId::Custom,
            phi1,
            phi2,
            phi12,
        }
    }

    /// Custom encoding from expression strings; `None` keeps the default
    /// `φ₁ = x₁` / `φ₂ = x₂`.
    pub fn from_expressions(phi1: Option<&str>, phi2: Option<&str>, phi12: &str) -> Result<Self> {
        fn compile<T: Scalar>(src: &str) -> Result<PhaseFn<T>> {
            let e = Expr::parse(src)?;
            Ok(Arc::new(move |x: [T; 2]| e.eval(x)))
        }
        Ok(Self::custom(
            phi1.map(compile).transpose()?.unwrap_or_else(x1),
            phi2.map(compile).transpose()?.unwrap_or_else(x2),
            compile(phi12)?,
        ))
    }

    pub fn id(&self) -> EncodingId {
        self.id
    }
}

/// Evaluates `(φ₁, φ₂, φ₁₂)` at `x`, rejecting non-finite phases.
pub fn eval_encoding<T: Scalar>(spec: &EncodingSpec<T>, x: [T; 2]) -> Result<[T; 3]> {
    let named: [(&'static str, &PhaseFn<T>); 3] =
        [("phi1", &spec.phi1), ("phi2", &spec.phi2), ("phi12", &spec.phi12)];
    let mut out = [T::zero(); 3];
    for (slot, (name, f)) in out.iter_mut().zip(named) {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteEncoding {
                function: name,
                x1: x[0].as_f64(),
                x2: x[1].as_f64(),
            });
        }
        *slot = v;
    }
    Ok(out)
}

/// Diagonal angles of one phase layer for the given encoding phases.
fn layer_angles<T: Scalar>(phases: [T; 3], sign: T) -> ([T; 2], PairPhase<T>) {
    let half = T::lit(0.5) * sign;
    (
        [-half * phases[0], -half * phases[1]],
        PairPhase::new(0, 1, -half * phases[2]),
    )
}

fn phase_layer<T: Scalar>(s: &StateVector<T>, phases: [T; 3], sign: T) -> StateVector<T> {
    let (single, pair) = layer_angles(phases, sign);
    apply_diagonal_phase(s, &single, &[pair]).expect("two-qubit layer is well-formed")
}

/// Applies `U_Φ · H⊗H · U_Φ · H⊗H` for already-evaluated phases.
pub fn apply_feature_map<T: Scalar>(state: &StateVector<T>, phases: [T; 3]) -> Result<StateVector<T>> {
    check_two_qubits(state)?;
    let s = apply_hadamard_all(state);
    let s = phase_layer(&s, phases, T::one());
    let s = apply_hadamard_all(&s);
    Ok(phase_layer(&s, phases, T::one()))
}

/// Applies the adjoint `H⊗H · U_Φ† · H⊗H · U_Φ†`.
pub fn apply_feature_map_inverse<T: Scalar>(
    state: &StateVector<T>,
    phases: [T; 3],
) -> Result<StateVector<T>> {
    check_two_qubits(state)?;
    let s = phase_layer(state, phases, -T::one());
    let s = apply_hadamard_all(&s);
    let s = phase_layer(&s, phases, -T::one());
    Ok(apply_hadamard_all(&s))
}

fn check_two_qubits<T: Scalar>(state: &StateVector<T>) -> Result<()> {
    if state.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.n_qubits(),
        });
    }
    Ok(())
}

/// `|Φ(x)⟩` for the given encoding.
pub fn feature_state<T: Scalar>(spec: &EncodingSpec<T>, x: [T; 2]) -> Result<StateVector<T>> {
    let phases = eval_encoding(spec, x)?;
    apply_feature_map(&StateVector::zero(2)?, phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::inner_product;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn spec(id: EncodingId) -> EncodingSpec<f64> {
        EncodingSpec::builtin(id).unwrap()
    }

    #[test]
    fn builtin_examples() {
        assert_eq!(eval_encoding(&spec(EncodingId::Ef1), [0.0, 0.0]).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(eval_encoding(&spec(EncodingId::Ef2), [1.0, 1.0]).unwrap(), [1.0, 1.0, 0.0]);
        let ef4 = eval_encoding(&spec(EncodingId::Ef4), [0.0, 0.0]).unwrap();
        assert_eq!(ef4[..2], [0.0, 0.0]);
        assert!((ef4[2] - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn builtins_match_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let (a, b) = (x[0], x[1]);
            let expect = [
                PI * a * b,
                PI / 2.0 * (1.0 - a) * (1.0 - b),
                ((a - b).abs().powi(2) / (8.0 / PI.ln())).exp(),
                PI / (3.0 * a.cos() * b.cos()),
                PI * a.cos() * b.cos(),
            ];
            for (id, e) in EncodingId::BUILTIN.into_iter().zip(expect) {
                let p = eval_encoding(&spec(id), x).unwrap();
                assert_eq!(p[0], a);
                assert_eq!(p[1], b);
                assert!((p[2] - e).abs() <= 1e-14 * e.abs().max(1.0), "{id}");
            }
        }
    }

    #[test]
    fn builtin_ranges_within_two_pi() {
        for id in EncodingId::BUILTIN {
            let s = spec(id);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for r in 0..=200 {
                for c in 0..=200 {
                    let x = [-1.0 + r as f64 / 100.0, -1.0 + c as f64 / 100.0];
                    let v = eval_encoding(&s, x).unwrap()[2];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            assert!(hi - lo <= 2.0 * PI, "{id}: range {}", hi - lo);
        }
    }

    #[test]
    fn non_finite_phase_is_reported() {
        let s = EncodingSpec::<f64>::from_expressions(None, None, "1/(x1-x2)").unwrap();
        match eval_encoding(&s, [0.5, 0.5]) {
            Err(Error::NonFiniteEncoding { function, .. }) => assert_eq!(function, "phi12"),
            other => panic!("unexpected {other:?}"),
        }
        let s = EncodingSpec::<f64>::from_expressions(Some("ln(x1)"), None, "0").unwrap();
        assert!(matches!(
            eval_encoding(&s, [0.0, 0.1]),
            Err(Error::NonFiniteEncoding { function: "phi1", .. })
        ));
    }

    #[test]
    fn custom_builtin_is_not_constructible() {
        assert!(EncodingSpec::<f64>::builtin(EncodingId::Custom).is_err());
    }

    #[test]
    fn zero_phases_give_zero_state() {
        let s = EncodingSpec::<f64>::from_expressions(Some("0"), Some("0"), "0").unwrap();
        let psi = feature_state(&s, [0.3, -0.2]).unwrap();
        assert!((psi.amplitude(0) - Complex::new(1.0, 0.0)).norm() < 1e-14);
        // EF1 at the origin has all phases zero as well
        let psi = feature_state(&spec(EncodingId::Ef1), [0.0, 0.0]).unwrap();
        assert!((psi.amplitude(0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn feature_state_is_deterministic_and_normalized() {
        let s = spec(EncodingId::Ef3);
        let a = feature_state(&s, [0.41, -0.93]).unwrap();
        let b = feature_state(&s, [0.41, -0.93]).unwrap();
        assert_eq!(a, b);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_undoes_feature_map() {
        let phases = [0.7, -1.3, 2.1];
        let psi = apply_feature_map(&StateVector::<f64>::zero(2).unwrap(), phases).unwrap();
        let back = apply_feature_map_inverse(&psi, phases).unwrap();
        assert!((inner_product(&StateVector::zero(2).unwrap(), &back).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn id_round_trip() {
        for id in EncodingId::BUILTIN {
            assert_eq!(id.as_str().parse::<EncodingId>().unwrap(), id);
        }
        assert!("ef6".parse::<EncodingId>().is_err());
    }
}
