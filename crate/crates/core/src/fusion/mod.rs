//! Feature-level fusion (joint vector, normalization, linear SVM) and
//! model-level fusion (Bayesian network over per-channel decisions).

pub mod bn;
pub mod decisions;
pub mod feature;
pub mod joint;

pub use bn::{bn_fusion_predict, bn_infer, fit_measurement_cpt, BnFusionModel, CptKind, MeasurementModel, Prior};
pub use decisions::{read_decisions, write_decisions, Decision};
pub use feature::FeatureFusionModel;
pub use joint::{build_joint_vector, JointVectorLayout};
