//! Core value types: matrices, video volumes, score matrices, feature vectors.

use std::path::Path;

use crate::error::{Error, Result};
use crate::label::{Channel, NUM_CLASSES};
use crate::tensor::{self, Tensor};

/// Dense row-major matrix, one sample per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. An empty list yields a 0×0 matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        tensor::write_tensor(path, &[self.rows, self.cols], &self.data)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::try_from(tensor::read_tensor(path)?)
    }
}

impl TryFrom<Tensor> for Matrix {
    type Error = Error;

    fn try_from(t: Tensor) -> Result<Self> {
        match t.dims.as_slice() {
            [r, c] => Matrix::from_vec(*r, *c, t.values),
            [n] => Matrix::from_vec(1, *n, t.values),
            other => Err(Error::ShapeMismatch(format!("expected a rank-2 tensor, got dims {other:?}"))),
        }
    }
}

/// A T×H×W grayscale clip, frame-major then row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VideoVolume {
    frames: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl VideoVolume {
    pub fn new(frames: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if frames == 0 || height == 0 || width == 0 {
            return Err(Error::InvalidVolume(format!(
                "empty volume {frames}x{height}x{width}"
            )));
        }
        if data.len() != frames * height * width {
            return Err(Error::InvalidVolume(format!(
                "{frames}x{height}x{width} volume needs {} values, got {}",
                frames * height * width,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite() || *v < 0.0 || *v > 255.0) {
            return Err(Error::InvalidVolume(format!(
                "value {} at {i} outside [0, 255]",
                data[i]
            )));
        }
        Ok(VideoVolume {
            frames,
            height,
            width,
            data,
        })
    }

    pub fn from_fn(frames: usize, height: usize, width: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(frames * height * width);
        for t in 0..frames {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(t, y, x));
                }
            }
        }
        Self::new(frames, height, width, data)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn at(&self, t: usize, y: usize, x: usize) -> f64 {
        self.data[(t * self.height + y) * self.width + x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::try_from(tensor::read_tensor(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        tensor::write_tensor(path, &[self.frames, self.height, self.width], &self.data)
    }
}

impl TryFrom<Tensor> for VideoVolume {
    type Error = Error;

    fn try_from(t: Tensor) -> Result<Self> {
        match t.dims.as_slice() {
            [f, h, w] => VideoVolume::new(*f, *h, *w, t.values),
            other => Err(Error::InvalidVolume(format!("expected rank-3 [T,H,W], got {other:?}"))),
        }
    }
}

/// Per-frame class scores, T rows of length 7.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix {
    rows: Vec<[f64; NUM_CLASSES]>,
}

impl ScoreMatrix {
    pub fn new(rows: Vec<[f64; NUM_CLASSES]>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(ScoreMatrix { rows })
    }

    /// Like [`ScoreMatrix::new`] but also requires every row to be a probability vector.
    pub fn probabilities(rows: Vec<[f64; NUM_CLASSES]>) -> Result<Self> {
        let m = Self::new(rows)?;
        if !m.is_stochastic(1e-9) {
            return Err(Error::InvalidParameter(
                "score rows must be non-negative and sum to 1".into(),
            ));
        }
        Ok(m)
    }

    pub fn frames(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[[f64; NUM_CLASSES]] {
        &self.rows
    }

    pub fn is_stochastic(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| {
            r.iter().all(|v| *v >= 0.0) && (r.iter().sum::<f64>() - 1.0).abs() <= tol
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::try_from(tensor::read_tensor(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let flat: Vec<f64> = self.rows.iter().flatten().copied().collect();
        tensor::write_tensor(path, &[self.rows.len(), NUM_CLASSES], &flat)
    }
}

impl TryFrom<Tensor> for ScoreMatrix {
    type Error = Error;

    fn try_from(t: Tensor) -> Result<Self> {
        match t.dims.as_slice() {
            [_, c] if *c == NUM_CLASSES => ScoreMatrix::new(
                t.values
                    .chunks_exact(NUM_CLASSES)
                    .map(|c| c.try_into().unwrap())
                    .collect(),
            ),
            other => Err(Error::ShapeMismatch(format!(
                "score matrix must be [T,{NUM_CLASSES}], got {other:?}"
            ))),
        }
    }
}

/// A channel-tagged feature vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub channel: Channel,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(channel: Channel, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(FeatureVector { channel, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_validation() {
        assert!(VideoVolume::new(0, 2, 2, vec![]).is_err());
        assert!(VideoVolume::new(1, 2, 2, vec![0.0; 3]).is_err());
        assert!(VideoVolume::new(1, 1, 1, vec![256.0]).is_err());
        let v = VideoVolume::from_fn(2, 3, 4, |t, y, x| (t * 12 + y * 4 + x) as f64).unwrap();
        assert_eq!(v.at(1, 2, 3), 23.0);
    }

    #[test]
    fn score_matrix_checks() {
        let uniform = [1.0 / 7.0; 7];
        assert!(ScoreMatrix::probabilities(vec![uniform; 3]).is_ok());
        assert!(ScoreMatrix::probabilities(vec![[0.5; 7]]).is_err());
        assert!(ScoreMatrix::new(vec![[f64::INFINITY; 7]]).is_err());
    }

    #[test]
    fn matrix_from_rows() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.get(1, 0), 3.0);
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(FeatureVector::new(Channel::Audio, vec![f64::NAN]).is_err());
    }
}
