//! Feature post-processing: PCA, score averaging, temporal pooling and the
//! two-stage normalization applied to joint vectors.

pub mod normalize;
pub mod pca;
pub mod pooling;

pub use normalize::NormalizationModel;
pub use pca::PcaModel;
pub use pooling::{average_scores, k_average_pool, PoolingParams};
