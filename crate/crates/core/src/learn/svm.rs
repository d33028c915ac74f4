//! One-vs-rest linear SVM trained with Pegasos-style stochastic subgradient
//! descent on the L2-regularized hinge loss.
//!
//! Each binary problem minimizes `λ/2·‖w‖² + 1/n·Σ max(0, 1 − yᵢ(w·xᵢ + b))`
//! with `λ = 1/(C·n)`. The bias is an extra weight on a constant feature.
//! Step `t` uses rate `1/(λt)` followed by projection onto the ball of
//! radius `1/√λ`. The returned weights average the iterates of the final epoch.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::{BundleReader, BundleWriter};
use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::label::{EmotionLabel, NUM_CLASSES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmOptions {
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmOptions {
    fn default() -> Self {
        SvmOptions {
            c: 1.0,
            epochs: 30,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSvmModel {
    /// 7×D
    pub weights: Matrix,
    pub bias: [f64; NUM_CLASSES],
    pub options: SvmOptions,
}

impl LinearSvmModel {
    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn scores(&self, x: &[f64]) -> Result<[f64; NUM_CLASSES]> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "SVM expects {} features, got {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(std::array::from_fn(|c| {
            self.weights.row(c).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[c]
        }))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let meta = serde_json::json!({
            "dim": self.dim(),
            "c": self.options.c,
            "epochs": self.options.epochs,
            "seed": self.options.seed,
        });
        let mut w = BundleWriter::new(path, "linear_svm", meta);
        w.tensor("weights", &[NUM_CLASSES, self.dim()], self.weights.as_slice())?;
        w.tensor("bias", &[NUM_CLASSES], &self.bias)?;
        w.finish()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let r = BundleReader::open(path, "linear_svm")?;
        let options: SvmOptions = r.meta()?;
        let weights = Matrix::try_from(r.tensor("weights")?)?;
        let bias = r.tensor("bias")?.values;
        if weights.rows() != NUM_CLASSES || bias.len() != NUM_CLASSES {
            return Err(Error::ShapeMismatch("SVM bundle must hold 7 classes".into()));
        }
        Ok(LinearSvmModel {
            weights,
            bias: bias.try_into().unwrap(),
            options,
        })
    }
}

/// Scores `Wx + b` and the argmax label, ties going to the lowest index.
pub fn svm_predict(model: &LinearSvmModel, x: &[f64]) -> Result<(EmotionLabel, [f64; NUM_CLASSES])> {
    let scores = model.scores(x)?;
    let best = (0..NUM_CLASSES).fold(0, |b, c| if scores[c] > scores[b] { c } else { b });
    Ok((EmotionLabel::new(best)?, scores))
}

pub fn svm_train(x: &Matrix, y: &[EmotionLabel], options: SvmOptions) -> Result<LinearSvmModel> {
    svm_train_with(x, y, options, Execution::default())
}

pub fn svm_train_with(
    x: &Matrix,
    y: &[EmotionLabel],
    options: SvmOptions,
    exec: Execution,
) -> Result<LinearSvmModel> {
    let n = x.rows();
    if n != y.len() {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if y.iter().all(|l| *l == y[0]) {
        return Err(Error::SingleClass);
    }
    if !(options.c > 0.0) || options.epochs == 0 {
        return Err(Error::InvalidParameter("SVM needs C > 0 and at least one epoch".into()));
    }
    let lambda = 1.0 / (options.c * n as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let orders: Vec<Vec<usize>> = (0..options.epochs)
        .map(|_| {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();
    let d = x.cols();
    let solved = exec.map(NUM_CLASSES, |class| {
        let target: Vec<f64> = y.iter().map(|l| if l.index() == class { 1.0 } else { -1.0 }).collect();
        pegasos_binary(x, &target, lambda, &orders)
    });
    let mut weights = Matrix::zeros(NUM_CLASSES, d);
    let mut bias = [0.0; NUM_CLASSES];
    for (c, w) in solved.into_iter().enumerate() {
        weights.row_mut(c).copy_from_slice(&w[..d]);
        bias[c] = w[d];
    }
    Ok(LinearSvmModel { weights, bias, options })
}

/// Returns `d + 1` weights, the last being the bias.
fn pegasos_binary(x: &Matrix, target: &[f64], lambda: f64, orders: &[Vec<usize>]) -> Vec<f64> {
    let d = x.cols();
    let radius = 1.0 / lambda.sqrt();
    let mut w = vec![0.0; d + 1];
    let mut avg = vec![0.0; d + 1];
    let mut t = 0usize;
    for (epoch, order) in orders.iter().enumerate() {
        let last = epoch + 1 == orders.len();
        for &i in order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let xi = x.row(i);
            let margin = target[i] * (xi.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[d]);
            let shrink = 1.0 - eta * lambda;
            for v in w.iter_mut() {
                *v *= shrink;
            }
            if margin < 1.0 {
                let g = eta * target[i];
                for (v, a) in w.iter_mut().zip(xi) {
                    *v += g * a;
                }
                w[d] += g;
            }
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > radius {
                let s = radius / norm;
                for v in w.iter_mut() {
                    *v *= s;
                }
            }
            if last {
                for (a, v) in avg.iter_mut().zip(&w) {
                    *a += v;
                }
            }
        }
    }
    let count = orders.last().map_or(1, |o| o.len()) as f64;
    avg.into_iter().map(|a| a / count).collect()
}
