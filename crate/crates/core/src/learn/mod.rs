//! Island loss, a softmax probe trained with it, and the one-vs-rest linear SVM.

pub mod island;
pub mod probe;
pub mod svm;

pub use island::{island_loss, island_loss_grad, update_centers, Centers, IslandLossParams};
pub use probe::{cluster_ratio, softmax_probe_train, ProbeModel, ProbeOptions, ProbeRun};
pub use svm::{svm_predict, svm_train, LinearSvmModel, SvmOptions};
