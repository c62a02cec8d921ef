//! Simulation and analysis of kernel-based quantum classifiers for
//! two-dimensional data.
//!
//! The pipeline: an [`encoding`] maps `x ∈ ℝ²` to circuit phases, the
//! [`statevector`] simulator prepares `|Φ(x)⟩`, [`pauli`] exposes its real
//! Pauli-coefficient vector, [`kernel`] assembles Gram matrices (exact, via
//! Pauli vectors, or shot-sampled), [`svm`] trains a soft-margin SVM with
//! SMO, and [`screening`] computes per-axis threshold accuracies without
//! any training.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`.

pub mod cli;
pub mod datasets;
pub mod encoding;
pub mod error;
pub mod expr;
pub mod kernel;
pub mod linalg;
pub mod pauli;
pub mod scalar;
pub mod screening;
pub mod statevector;
pub mod svm;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use datasets::{DatasetKind, GeneratorConfig};
pub use encoding::{eval_encoding, feature_state, EncodingId, EncodingSpec};
pub use kernel::{combine, gram, kernel_exact, kernel_pauli, kernel_shots, GramMatrix, GramMethod, KernelWeights};
pub use pauli::{coefficient_grid, decompose, table1_coefficients, Grid, PauliVector};
pub use screening::{axis_accuracy, minimum_accuracy, vc_dimension, AxisAccuracyReport, Orientation};
pub use statevector::{MeasurementCounts, StateVector};
pub use svm::{cross_validate, decide, train, CvReport, LabeledDataset, SvmModel};

pub type StateVector64 = StateVector<f64>;
pub type EncodingSpec64 = EncodingSpec<f64>;
pub type PauliVector64 = PauliVector<f64>;
pub type GramMatrix64 = GramMatrix<f64>;
pub type KernelWeights64 = KernelWeights<f64>;
pub type LabeledDataset64 = LabeledDataset<f64>;
pub type SvmModel64 = SvmModel<f64>;
pub type Grid64 = Grid<f64>;
pub type AxisAccuracyReport64 = AxisAccuracyReport<f64>;

pub type StateVector32 = StateVector<f32>;
pub type EncodingSpec32 = EncodingSpec<f32>;
