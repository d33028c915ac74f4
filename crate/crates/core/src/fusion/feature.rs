//! Normalize-then-classify: two-stage normalization followed by a linear SVM.
//! Used on joint vectors for feature-level fusion and on single channels for
//! the per-channel classifiers.

use std::path::Path;

use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::features::NormalizationModel;
use crate::label::{EmotionLabel, NUM_CLASSES};
use crate::learn::svm::{svm_predict, svm_train_with, LinearSvmModel, SvmOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureFusionModel {
    pub normalization: NormalizationModel,
    pub svm: LinearSvmModel,
}

impl FeatureFusionModel {
    pub fn train(x: &Matrix, y: &[EmotionLabel], options: SvmOptions) -> Result<Self> {
        Self::train_with(x, y, options, Execution::default())
    }

    pub fn train_with(x: &Matrix, y: &[EmotionLabel], options: SvmOptions, exec: Execution) -> Result<Self> {
        let normalization = NormalizationModel::fit(x)?;
        let normalized = normalization.apply_rows(x)?;
        let svm = svm_train_with(&normalized, y, options, exec)?;
        Ok(FeatureFusionModel { normalization, svm })
    }

    pub fn predict(&self, x: &[f64]) -> Result<(EmotionLabel, [f64; NUM_CLASSES])> {
        svm_predict(&self.svm, &self.normalization.apply(x)?)
    }

    pub fn predict_rows(&self, x: &Matrix) -> Result<Vec<EmotionLabel>> {
        self.predict_rows_with(x, Execution::default())
    }

    pub fn predict_rows_with(&self, x: &Matrix, exec: Execution) -> Result<Vec<EmotionLabel>> {
        exec.map(x.rows(), |i| self.predict(x.row(i)).map(|p| p.0))
            .into_iter()
            .collect()
    }

    /// Writes `<path>` (the SVM sidecar) and `<stem>.norm.json` beside it.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.svm.save(path)?;
        self.normalization.save(norm_path(path))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let svm = LinearSvmModel::load(path)?;
        let normalization = NormalizationModel::load(norm_path(path))?;
        if normalization.dim() != svm.dim() {
            return Err(Error::ShapeMismatch("normalizer and SVM dims differ".into()));
        }
        Ok(FeatureFusionModel { normalization, svm })
    }
}

fn norm_path(path: &Path) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.norm.json"))
}
