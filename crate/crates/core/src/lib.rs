//! Audiovisual emotion recognition by feature-level and model-level fusion.
//!
//! The crate covers the whole pipeline downstream of raw signal capture:
//!
//! * [`lbptop`] computes LBP-TOP texture descriptors from grayscale clips;
//! * [`features`] holds PCA, ensemble score averaging, k-average temporal
//!   pooling and the two-stage joint-vector normalization;
//! * [`learn`] implements the island loss with its gradients, a softmax probe
//!   trained with it, and a one-vs-rest linear SVM;
//! * [`fusion`] builds joint vectors for feature-level fusion and runs
//!   Bayesian-network inference for model-level fusion;
//! * [`synth`], [`experiment`] and [`eval`] generate synthetic data and score
//!   the fusion strategies.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default); see [`exec::Execution`].

pub mod bundle;
pub mod data;
pub mod error;
pub mod eval;
pub mod exec;
pub mod experiment;
pub mod features;
pub mod fusion;
pub mod label;
pub mod lbptop;
pub mod learn;
pub mod manifest;
pub mod synth;
pub mod tensor;

pub use data::{FeatureVector, Matrix, ScoreMatrix, VideoVolume};
pub use error::{Error, Result};
pub use exec::Execution;
pub use label::{Channel, EmotionLabel, NUM_CLASSES};
