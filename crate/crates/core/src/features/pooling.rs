//! Ensemble score averaging and k-average temporal pooling.

use crate::data::ScoreMatrix;
use crate::error::{Error, Result};
use crate::label::NUM_CLASSES;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolingParams {
    pub k: usize,
}

impl Default for PoolingParams {
    fn default() -> Self {
        PoolingParams { k: 7 }
    }
}

/// Elementwise mean of equally shaped score matrices.
pub fn average_scores(stack: &[ScoreMatrix]) -> Result<ScoreMatrix> {
    let first = stack.first().ok_or(Error::Empty("score matrix list"))?;
    let frames = first.frames();
    if let Some(bad) = stack.iter().find(|m| m.frames() != frames) {
        return Err(Error::ShapeMismatch(format!(
            "score matrices have {frames} and {} frames",
            bad.frames()
        )));
    }
    let n = stack.len() as f64;
    let rows = (0..frames)
        .map(|t| {
            let mut acc = [0.0; NUM_CLASSES];
            for m in stack {
                for (a, v) in acc.iter_mut().zip(&m.rows()[t]) {
                    *a += v;
                }
            }
            acc.map(|a| a / n)
        })
        .collect();
    ScoreMatrix::new(rows)
}

/// Frame indices, in order, that survive the length adjustment to a multiple of `k`.
///
/// Short clips repeat each frame in place: the first `k mod T` frames appear
/// `ceil(k/T)` times, the rest `floor(k/T)` times. Long clips drop
/// `r = T mod k` frames, `ceil(r/2)` from the head and `floor(r/2)` from the tail.
pub fn pooled_frame_indices(frames: usize, k: usize) -> Vec<usize> {
    if frames < k {
        let (base, extra) = (k / frames, k % frames);
        (0..frames)
            .flat_map(|i| std::iter::repeat_n(i, base + usize::from(i < extra)))
            .collect()
    } else {
        let r = frames % k;
        let head = r.div_ceil(2);
        (head..frames - r / 2).collect()
    }
}

/// Averages per-frame scores into `k` contiguous bins; output has length `7k`.
pub fn k_average_pool(scores: &ScoreMatrix, params: PoolingParams) -> Result<Vec<f64>> {
    if params.k == 0 {
        return Err(Error::InvalidParameter("pooling needs k >= 1".into()));
    }
    if scores.frames() == 0 {
        return Err(Error::Empty("score matrix"));
    }
    let idx = pooled_frame_indices(scores.frames(), params.k);
    let per_bin = idx.len() / params.k;
    let rows = scores.rows();
    let mut out = Vec::with_capacity(params.k * NUM_CLASSES);
    for bin in idx.chunks(per_bin) {
        let mut acc = [0.0; NUM_CLASSES];
        for &i in bin {
            for (a, v) in acc.iter_mut().zip(&rows[i]) {
                *a += v;
            }
        }
        out.extend(acc.iter().map(|a| a / per_bin as f64));
    }
    Ok(out)
}
