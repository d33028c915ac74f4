//! Two-stage normalization of joint feature vectors.
//!
//! Stage 1 standardizes each dimension with training-set statistics
//! (population std, zero-std dimensions map to 0). Stage 2 standardizes each
//! resulting vector across its own entries.

use std::path::Path;

use crate::bundle::{BundleReader, BundleWriter};
use crate::data::Matrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationModel {
    pub per_dim_mean: Vec<f64>,
    pub per_dim_std: Vec<f64>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl NormalizationModel {
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.rows() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: x.rows() });
        }
        let (per_dim_mean, per_dim_std) = (0..x.cols())
            .map(|j| mean_std(&x.iter_rows().map(|r| r[j]).collect::<Vec<_>>()))
            .unzip();
        Ok(NormalizationModel {
            per_dim_mean,
            per_dim_std,
        })
    }

    pub fn dim(&self) -> usize {
        self.per_dim_mean.len()
    }

    /// Indices of dimensions that were constant on the training set.
    pub fn zero_std_dims(&self) -> Vec<usize> {
        self.per_dim_std
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "normalizer expects {} dims, got {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(())
    }

    pub fn stage1(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(x.iter()
            .zip(self.per_dim_mean.iter().zip(&self.per_dim_std))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect())
    }

    /// Both stages. A vector that is constant after stage 1 maps to zeros.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let s1 = self.stage1(x)?;
        let (mean, std) = mean_std(&s1);
        if std == 0.0 || !std.is_finite() {
            return Ok(vec![0.0; s1.len()]);
        }
        Ok(s1.iter().map(|v| (v - mean) / std).collect())
    }

    pub fn apply_rows(&self, x: &Matrix) -> Result<Matrix> {
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            out.row_mut(i).copy_from_slice(&self.apply(x.row(i))?);
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BundleWriter::new(path, "normalization", serde_json::json!({ "dim": self.dim() }));
        w.tensor("mean", &[self.dim()], &self.per_dim_mean)?;
        w.tensor("std", &[self.dim()], &self.per_dim_std)?;
        w.finish()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let r = BundleReader::open(path, "normalization")?;
        let per_dim_mean = r.tensor("mean")?.values;
        let per_dim_std = r.tensor("std")?.values;
        if per_dim_mean.len() != per_dim_std.len() {
            return Err(Error::ShapeMismatch("inconsistent normalization bundle".into()));
        }
        Ok(NormalizationModel {
            per_dim_mean,
            per_dim_std,
        })
    }
}
