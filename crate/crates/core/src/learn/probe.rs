//! A linear embedding plus softmax classifier trained with softmax loss and
//! island loss on the embedding, by full-batch gradient descent.
//!
//! The embedding starts at the identity so runs that differ only in the
//! island-loss weight start from the same point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::learn::island::{island_loss, update_centers, Centers, IslandLossParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            epochs: 300,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeModel {
    /// d×d embedding matrix.
    pub embedding: Matrix,
    pub embedding_bias: Vec<f64>,
    /// classes×d softmax weights.
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl ProbeModel {
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        affine(&self.embedding, &self.embedding_bias, x)
    }

    pub fn embed_rows(&self, x: &Matrix) -> Matrix {
        let rows: Vec<Vec<f64>> = x.iter_rows().map(|r| self.embed(r)).collect();
        Matrix::from_rows(&rows).unwrap_or_else(|_| Matrix::zeros(0, self.embedding.rows()))
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        argmax(&affine(&self.weights, &self.bias, &self.embed(x)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRun {
    pub model: ProbeModel,
    pub centers: Centers,
    /// Total loss evaluated at the start of every epoch.
    pub loss_trace: Vec<f64>,
}

fn affine(w: &Matrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    w.iter_rows()
        .zip(b)
        .map(|(row, bi)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + bi)
        .collect()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold(0, |best, (i, x)| if *x > v[best] { i } else { best })
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn class_means(f: &Matrix, y: &[usize], classes: usize) -> Matrix {
    let mut sums = Matrix::zeros(classes, f.cols());
    let mut counts = vec![0usize; classes];
    for (row, &yi) in f.iter_rows().zip(y) {
        counts[yi] += 1;
        for (s, v) in sums.row_mut(yi).iter_mut().zip(row) {
            *s += v;
        }
    }
    for (j, &c) in counts.iter().enumerate() {
        if c > 0 {
            for s in sums.row_mut(j) {
                *s /= c as f64;
            }
        }
    }
    sums
}

/// Mean distance of samples to their class mean divided by the mean
/// pairwise distance between class means. Smaller means tighter, better
/// separated clusters.
pub fn cluster_ratio(features: &Matrix, y: &[usize]) -> f64 {
    let classes = y.iter().max().map_or(0, |m| m + 1);
    let means = class_means(features, y, classes);
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    let intra = features
        .iter_rows()
        .zip(y)
        .map(|(r, &yi)| dist(r, means.row(yi)))
        .sum::<f64>()
        / y.len() as f64;
    let present: Vec<usize> = (0..classes).filter(|j| y.contains(j)).collect();
    let mut inter = 0.0;
    let mut pairs = 0usize;
    for (a, &j) in present.iter().enumerate() {
        for &k in &present[a + 1..] {
            inter += dist(means.row(j), means.row(k));
            pairs += 1;
        }
    }
    intra / (inter / pairs as f64)
}

/// Trains the probe on `L_softmax + λ·L_IL / n`, updating centers after each step.
pub fn softmax_probe_train(
    x: &Matrix,
    y: &[usize],
    params: &IslandLossParams,
    options: &ProbeOptions,
) -> Result<ProbeRun> {
    params.validate()?;
    let (n, d) = (x.rows(), x.cols());
    if n != y.len() {
        return Err(Error::LengthMismatch(n, y.len()));
    }
    let classes = y.iter().max().map_or(0, |m| m + 1);
    let present = (0..classes).filter(|j| y.contains(j)).count();
    if n < present || present < 2 {
        return Err(Error::DegenerateInput(format!(
            "{n} samples covering {present} classes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut embedding = Matrix::zeros(d, d);
    for i in 0..d {
        embedding.set(i, i, 1.0);
    }
    let mut model = ProbeModel {
        embedding,
        embedding_bias: vec![0.0; d],
        weights: Matrix::from_vec(classes, d, (0..classes * d).map(|_| rng.random_range(-0.01..0.01)).collect())?,
        bias: vec![0.0; classes],
    };
    let features = model.embed_rows(x);
    let mut centers = Centers::new(class_means(&features, y, classes))?;
    let mut loss_trace = Vec::with_capacity(options.epochs);
    let lr = options.learning_rate;
    let nf = n as f64;

    for _ in 0..options.epochs {
        let features = model.embed_rows(x);
        let il = island_loss(&features, y, &centers, params.lambda1)?;
        let mut ce = 0.0;
        let mut dw = Matrix::zeros(classes, d);
        let mut db = vec![0.0; classes];
        let mut da = Matrix::zeros(d, d);
        let mut dab = vec![0.0; d];
        for (i, (f, &yi)) in features.iter_rows().zip(y).enumerate() {
            let p = softmax(&affine(&model.weights, &model.bias, f));
            ce -= p[yi].max(1e-300).ln();
            let dlogit: Vec<f64> = p
                .iter()
                .enumerate()
                .map(|(c, pc)| (pc - f64::from(c == yi)) / nf)
                .collect();
            let cy = centers.row(yi);
            let mut df: Vec<f64> = (0..d).map(|k| params.lambda / nf * (f[k] - cy[k])).collect();
            for (c, g) in dlogit.iter().enumerate() {
                db[c] += g;
                let wrow = model.weights.row(c);
                for k in 0..d {
                    dw.set(c, k, dw.get(c, k) + g * f[k]);
                    df[k] += g * wrow[k];
                }
            }
            let xi = x.row(i);
            for (r, g) in df.iter().enumerate() {
                dab[r] += g;
                for (k, xv) in xi.iter().enumerate() {
                    da.set(r, k, da.get(r, k) + g * xv);
                }
            }
        }
        loss_trace.push(ce / nf + params.lambda * il / nf);
        step(&mut model.weights, &dw, lr);
        step_vec(&mut model.bias, &db, lr);
        step(&mut model.embedding, &da, lr);
        step_vec(&mut model.embedding_bias, &dab, lr);
        centers = update_centers(&centers, &features, y, params.lambda1, params.alpha)?;
    }
    Ok(ProbeRun {
        model,
        centers,
        loss_trace,
    })
}

fn step(w: &mut Matrix, g: &Matrix, lr: f64) {
    for r in 0..w.rows() {
        for (a, b) in w.row_mut(r).iter_mut().zip(g.row(r)) {
            *a -= lr * b;
        }
    }
}

fn step_vec(w: &mut [f64], g: &[f64], lr: f64) {
    for (a, b) in w.iter_mut().zip(g) {
        *a -= lr * b;
    }
}
