//! spectralab: a desk-scale laboratory for the singular-value spectrum of
//! GAN generator Jacobians.
//!
//! The crate trains small fully connected GANs, measures the conditioning
//! of the generator's metric tensor `J_z^T J_z` along training, and can
//! intervene on it with the Jacobian Clamping penalty. Diagnostics cover
//! classifier scores, Frechet distances, missing-mode counts, and
//! average-Jacobian spectra; the harness turns these into reproducible,
//! seeded multi-run experiments with CSV logs and SVG charts.
//!
//! The numeric core is generic over the scalar ([`scalar::Scalar`], `f32`
//! or `f64`); the harness and CLI run in `f64`, and the `*64` aliases
//! below are the concrete types they use.

pub mod data;
pub mod diagnostics;
pub mod harness;
pub mod linalg;
pub mod models;
pub mod nn;
pub mod rng;
pub mod scalar;

pub use data::{Dataset, LatentBatch};
pub use linalg::{GaussianStats, Matrix, SpectrumReport};
pub use models::{ClampConfig, ClampNormMode, GanTrainState};
pub use nn::{Activation, AdamState, Mlp};
pub use scalar::Scalar;

/// Double-precision lane used by the binaries and the harness.
pub type Matrix64 = Matrix<f64>;
pub type EigenDecomposition64 = linalg::EigenDecomposition<f64>;
pub type SpectrumReport64 = SpectrumReport<f64>;
pub type GaussianStats64 = GaussianStats<f64>;
pub type Mlp64 = Mlp<f64>;
pub type AdamState64 = AdamState<f64>;
pub type Dataset64 = Dataset<f64>;
pub type LatentBatch64 = LatentBatch<f64>;
pub type ClampConfig64 = ClampConfig<f64>;
pub type GanTrainState64 = GanTrainState<f64>;
