//! Island loss: center loss plus a penalty on the pairwise cosine similarity
//! of class centers.
//!
//! ```text
//! L = ½ Σᵢ ‖xᵢ − c_{yᵢ}‖² + λ₁ Σⱼ Σ_{k≠j} (cos(c_k, c_j) + 1)
//! ```
//!
//! The double sum runs over ordered pairs, so every unordered pair counts twice.

use crate::data::Matrix;
use crate::error::{Error, Result};

/// Per-class centers, one row per class.
#[derive(Clone, Debug, PartialEq)]
pub struct Centers(pub Matrix);

impl Centers {
    pub fn new(m: Matrix) -> Result<Self> {
        if let Some(i) = m.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Centers(m))
    }

    pub fn classes(&self) -> usize {
        self.0.rows()
    }

    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        self.0.row(j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IslandLossParams {
    /// Weight of the pairwise cosine term.
    pub lambda1: f64,
    /// Weight of the island loss against the softmax loss.
    pub lambda: f64,
    /// Center learning rate, in (0, 1].
    pub alpha: f64,
}

impl Default for IslandLossParams {
    fn default() -> Self {
        IslandLossParams {
            lambda1: 10.0,
            lambda: 0.01,
            alpha: 0.5,
        }
    }
}

impl IslandLossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1 >= 0.0 && self.lambda >= 0.0) {
            return Err(Error::InvalidParameter("lambda and lambda1 must be >= 0".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter("alpha must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check(x: &Matrix, y: &[usize], centers: &Centers) -> Result<Vec<f64>> {
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch(x.rows(), y.len()));
    }
    if x.rows() > 0 && x.cols() != centers.dim() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} dims, centers {}",
            x.cols(),
            centers.dim()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= centers.classes()) {
        return Err(Error::InvalidParameter(format!(
            "label {bad} outside 0..{}",
            centers.classes()
        )));
    }
    (0..centers.classes())
        .map(|j| {
            let n = dot(centers.row(j), centers.row(j)).sqrt();
            if n > 0.0 {
                Ok(n)
            } else {
                Err(Error::ZeroNormCenter(j))
            }
        })
        .collect()
}

/// Gradient of `Σⱼ Σ_{k≠j} (cos(c_k, c_j) + 1)` with respect to every center.
fn pairwise_grad(centers: &Centers, norms: &[f64]) -> Matrix {
    let (n, d) = (centers.classes(), centers.dim());
    let mut g = Matrix::zeros(n, d);
    for j in 0..n {
        let cj = centers.row(j);
        for k in (0..n).filter(|&k| k != j) {
            let ck = centers.row(k);
            let cos = dot(ck, cj) / (norms[k] * norms[j]);
            // ∂cos(c_k, c_j)/∂c_j, counted for both orderings of the pair
            for (i, out) in g.row_mut(j).iter_mut().enumerate() {
                *out += 2.0 * (ck[i] / (norms[k] * norms[j]) - cos * cj[i] / (norms[j] * norms[j]));
            }
        }
    }
    g
}

pub fn island_loss(x: &Matrix, y: &[usize], centers: &Centers, lambda1: f64) -> Result<f64> {
    let norms = check(x, y, centers)?;
    let center_term: f64 = x
        .iter_rows()
        .zip(y)
        .map(|(xi, &yi)| xi.iter().zip(centers.row(yi)).map(|(a, c)| (a - c).powi(2)).sum::<f64>())
        .sum::<f64>()
        * 0.5;
    let n = centers.classes();
    let mut pair_term = 0.0;
    for j in 0..n {
        for k in (0..n).filter(|&k| k != j) {
            pair_term += dot(centers.row(k), centers.row(j)) / (norms[k] * norms[j]) + 1.0;
        }
    }
    Ok(center_term + lambda1 * pair_term)
}

/// Gradients of [`island_loss`] with respect to the samples and the centers.
pub fn island_loss_grad(x: &Matrix, y: &[usize], centers: &Centers, lambda1: f64) -> Result<(Matrix, Matrix)> {
    let norms = check(x, y, centers)?;
    let mut dx = Matrix::zeros(x.rows(), x.cols());
    let mut dc = pairwise_grad(centers, &norms);
    for j in 0..centers.classes() {
        for v in dc.row_mut(j) {
            *v *= lambda1;
        }
    }
    for (i, (xi, &yi)) in x.iter_rows().zip(y).enumerate() {
        let cy = centers.row(yi);
        for c in 0..x.cols() {
            let diff = xi[c] - cy[c];
            dx.set(i, c, diff);
            dc.set(yi, c, dc.get(yi, c) - diff);
        }
    }
    Ok((dx, dc))
}

/// One damped center step.
///
/// `c_j ← c_j − α·Σ_{i:yᵢ=j}(c_j − xᵢ)/(1 + n_j) − α·λ₁·∂(pairwise)/∂c_j`.
pub fn update_centers(centers: &Centers, x: &Matrix, y: &[usize], lambda1: f64, alpha: f64) -> Result<Centers> {
    let norms = check(x, y, centers)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1]".into()));
    }
    let (n, d) = (centers.classes(), centers.dim());
    let mut delta = Matrix::zeros(n, d);
    let mut counts = vec![0usize; n];
    for (xi, &yi) in x.iter_rows().zip(y) {
        counts[yi] += 1;
        let cy = centers.row(yi);
        for (c, out) in delta.row_mut(yi).iter_mut().enumerate() {
            *out += cy[c] - xi[c];
        }
    }
    let pair = if lambda1 != 0.0 {
        Some(pairwise_grad(centers, &norms))
    } else {
        None
    };
    let mut next = centers.0.clone();
    for j in 0..n {
        let damp = 1.0 + counts[j] as f64;
        for c in 0..d {
            let mut step = delta.get(j, c) / damp;
            if let Some(p) = &pair {
                step += lambda1 * p.get(j, c);
            }
            next.set(j, c, centers.0.get(j, c) - alpha * step);
        }
    }
    Centers::new(next)
}
