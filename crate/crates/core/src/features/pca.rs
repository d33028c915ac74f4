//! Principal component analysis via eigendecomposition of the sample covariance.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::bundle::{BundleReader, BundleWriter};
use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// q×d, rows are unit principal directions.
    pub components: Matrix,
    /// Descending, non-negative.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.rows()
    }

    /// Fits `q` components to the rows of `x`.
    ///
    /// Components beyond the data's rank carry eigenvalue 0 and complete the
    /// orthonormal basis; they are not an error.
    pub fn fit(x: &Matrix, q: usize) -> Result<Self> {
        Self::fit_with(x, q, Execution::default())
    }

    pub fn fit_with(x: &Matrix, q: usize, exec: Execution) -> Result<Self> {
        let (n, d) = (x.rows(), x.cols());
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        if q == 0 || q > d.min(n - 1) {
            return Err(Error::InvalidParameter(format!(
                "component count {q} must lie in 1..={}",
                d.min(n - 1)
            )));
        }
        let mean: Vec<f64> = (0..d)
            .map(|j| x.iter_rows().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        // column-major centered data so covariance entries are contiguous dot products
        let centered_cols: Vec<Vec<f64>> = exec.map(d, |j| x.iter_rows().map(|r| r[j] - mean[j]).collect());
        let denom = (n - 1) as f64;
        let (eigenvalues, directions) = if n - 1 < d {
            match dual_directions(&centered_cols, n, q, denom, exec) {
                Some(found) => found,
                None => primal_directions(&centered_cols, q, denom, exec),
            }
        } else {
            primal_directions(&centered_cols, q, denom, exec)
        };
        let mut components = Matrix::zeros(q, d);
        for (row, v) in directions.iter().enumerate() {
            let pivot = (0..d).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
            let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
            for (i, value) in v.iter().enumerate() {
                components.set(row, i, sign * value);
            }
        }
        Ok(PcaModel {
            mean,
            components,
            eigenvalues,
        })
    }

    /// Projects `x` onto the principal directions: `components · (x − mean)`.
    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "PCA expects {} inputs, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        Ok(self
            .components
            .iter_rows()
            .map(|c| c.iter().zip(x.iter().zip(&self.mean)).map(|(w, (v, m))| w * (v - m)).sum())
            .collect())
    }

    pub fn transform_rows(&self, x: &Matrix) -> Result<Matrix> {
        let rows = x.iter_rows().map(|r| self.transform(r)).collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, self.output_dim()));
        }
        Matrix::from_rows(&rows)
    }

    /// Maps projected coordinates back to input space: `componentsᵀ · y + mean`.
    pub fn inverse_transform(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.output_dim() {
            return Err(Error::DimensionMismatch(format!(
                "PCA inverse expects {} coordinates, got {}",
                self.output_dim(),
                y.len()
            )));
        }
        let mut out = self.mean.clone();
        for (coef, row) in y.iter().zip(self.components.iter_rows()) {
            for (o, w) in out.iter_mut().zip(row) {
                *o += coef * w;
            }
        }
        Ok(out)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let meta = serde_json::json!({
            "input_dim": self.input_dim(),
            "components": self.output_dim(),
        });
        let mut w = BundleWriter::new(path, "pca", meta);
        w.tensor("mean", &[self.input_dim()], &self.mean)?;
        w.tensor(
            "components",
            &[self.output_dim(), self.input_dim()],
            self.components.as_slice(),
        )?;
        w.tensor("eigenvalues", &[self.output_dim()], &self.eigenvalues)?;
        w.finish()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let r = BundleReader::open(path, "pca")?;
        let mean = r.tensor("mean")?.values;
        let components = Matrix::try_from(r.tensor("components")?)?;
        let eigenvalues = r.tensor("eigenvalues")?.values;
        if components.cols() != mean.len() || components.rows() != eigenvalues.len() {
            return Err(Error::ShapeMismatch("inconsistent PCA bundle".into()));
        }
        Ok(PcaModel {
            mean,
            components,
            eigenvalues,
        })
    }
}

/// Indices of `values` sorted by descending value, ties by index.
fn descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Top `q` eigenpairs of the d×d covariance.
fn primal_directions(cols: &[Vec<f64>], q: usize, denom: f64, exec: Execution) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = cols.len();
    let cov_rows: Vec<Vec<f64>> = exec.map(d, |j| {
        let a = &cols[j];
        (0..d)
            .map(|k| a.iter().zip(&cols[k]).map(|(u, v)| u * v).sum::<f64>() / denom)
            .collect()
    });
    // symmetrize exactly
    let cov = DMatrix::from_fn(d, d, |i, j| if i <= j { cov_rows[i][j] } else { cov_rows[j][i] });
    let eig = SymmetricEigen::new(cov);
    let order = descending(eig.eigenvalues.as_slice());
    order
        .iter()
        .take(q)
        .map(|&idx| (eig.eigenvalues[idx].max(0.0), eig.eigenvectors.column(idx).iter().copied().collect()))
        .unzip()
}

/// Top `q` eigenpairs through the n×n Gram matrix, for data with fewer
/// samples than dimensions. Each direction is `Xcᵀu / √((n−1)λ)`. Returns
/// `None` when a requested eigenvalue is numerically zero, since its
/// direction cannot be recovered from the Gram matrix.
fn dual_directions(
    cols: &[Vec<f64>],
    n: usize,
    q: usize,
    denom: f64,
    exec: Execution,
) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let rows: Vec<Vec<f64>> = exec.map(n, |a| cols.iter().map(|c| c[a]).collect());
    let gram_rows: Vec<Vec<f64>> = exec.map(n, |a| {
        (0..n)
            .map(|b| rows[a].iter().zip(&rows[b]).map(|(u, v)| u * v).sum::<f64>() / denom)
            .collect()
    });
    let gram = DMatrix::from_fn(n, n, |i, j| if i <= j { gram_rows[i][j] } else { gram_rows[j][i] });
    let eig = SymmetricEigen::new(gram);
    let order = descending(eig.eigenvalues.as_slice());
    let top = eig.eigenvalues[order[0]];
    let mut values = Vec::with_capacity(q);
    let mut dirs = Vec::with_capacity(q);
    for &idx in order.iter().take(q) {
        let lambda = eig.eigenvalues[idx];
        if !(lambda > 1e-10 * top) {
            return None;
        }
        let u = eig.eigenvectors.column(idx);
        let scale = ((n - 1) as f64 * lambda).sqrt();
        let v: Vec<f64> = cols.iter().map(|c| c.iter().zip(u.iter()).map(|(a, b)| a * b).sum::<f64>() / scale).collect();
        values.push(lambda);
        dirs.push(v);
    }
    Some((values, dirs))
}
