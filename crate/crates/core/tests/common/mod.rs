//! Reference implementations used as test oracles. They favor directness over
//! speed and share no code with the library beyond its plain data types.
#![allow(dead_code)]

use std::f64::consts::PI;

use avfusion::data::{Matrix, VideoVolume};
use avfusion::NUM_CLASSES;

// ---------------------------------------------------------------- LBP-TOP

fn uniform_bin(code: u32) -> usize {
    let bit = |c: u32, i: u32| (c >> (i % 8)) & 1;
    let is_uniform = |c: u32| (0..8).filter(|&i| bit(c, i) != bit(c, i + 1)).count() <= 2;
    if is_uniform(code) {
        (0..code).filter(|&c| is_uniform(c)).count()
    } else {
        58
    }
}

/// Start of block `j` when `len` items are split into `parts` pieces with
/// the larger pieces first.
fn block_of(i: usize, len: usize, parts: usize) -> usize {
    let start = |j: usize| j * (len / parts) + j.min(len % parts);
    (0..parts).rev().find(|&j| start(j) <= i).unwrap()
}

/// Per-pixel LBP-TOP: every center recomputes its circle with fresh trig and
/// keeps a plane code only when every sampled pixel lies inside the volume.
/// Returns raw counts laid out block, plane, bin.
pub fn lbp_top_naive(v: &VideoVolume, rx: usize, ry: usize, rt: usize, grid_rows: usize, grid_cols: usize) -> Vec<u64> {
    let (tn, hn, wn) = (v.frames() as i64, v.height() as i64, v.width() as i64);
    let mut hist = vec![0u64; grid_rows * grid_cols * 3 * 59];
    for t in 0..tn {
        for y in 0..hn {
            for x in 0..wn {
                let block = block_of(y as usize, hn as usize, grid_rows) * grid_cols
                    + block_of(x as usize, wn as usize, grid_cols);
                let center = v.at(t as usize, y as usize, x as usize);
                for plane in 0..3 {
                    // (horizontal radius, vertical radius), and a map from
                    // in-plane offsets to volume coordinates
                    let (rh, rv) = [(rx, ry), (rx, rt), (ry, rt)][plane];
                    let locate = |dh: i64, dv: i64| -> (i64, i64, i64) {
                        match plane {
                            0 => (t, y + dv, x + dh),
                            1 => (t + dv, y, x + dh),
                            _ => (t + dv, y + dh, x),
                        }
                    };
                    let pixel = |dh: i64, dv: i64| -> Option<f64> {
                        let (tt, yy, xx) = locate(dh, dv);
                        let inside = (0..tn).contains(&tt) && (0..hn).contains(&yy) && (0..wn).contains(&xx);
                        inside.then(|| v.at(tt as usize, yy as usize, xx as usize))
                    };
                    let mut code = 0u32;
                    let mut valid = true;
                    for k in 0..8 {
                        let angle = 2.0 * PI * k as f64 / 8.0;
                        let mut dh = rh as f64 * angle.cos();
                        let mut dv = -(rv as f64) * angle.sin();
                        if (dh - dh.round()).abs() < 1e-9 {
                            dh = dh.round();
                        }
                        if (dv - dv.round()).abs() < 1e-9 {
                            dv = dv.round();
                        }
                        let sample = if dh == dh.floor() && dv == dv.floor() {
                            pixel(dh as i64, dv as i64)
                        } else {
                            let (h0, v0) = (dh.floor(), dv.floor());
                            let (fh, fv) = (dh - h0, dv - v0);
                            let (h0, v0) = (h0 as i64, v0 as i64);
                            match (pixel(h0, v0), pixel(h0 + 1, v0), pixel(h0, v0 + 1), pixel(h0 + 1, v0 + 1)) {
                                (Some(a), Some(b), Some(c), Some(d)) => Some(
                                    (1.0 - fh) * (1.0 - fv) * a
                                        + fh * (1.0 - fv) * b
                                        + (1.0 - fh) * fv * c
                                        + fh * fv * d,
                                ),
                                _ => None,
                            }
                        };
                        match sample {
                            Some(s) if s >= center => code |= 1 << k,
                            Some(_) => {}
                            None => valid = false,
                        }
                    }
                    if valid {
                        hist[(block * 3 + plane) * 59 + uniform_bin(code)] += 1;
                    }
                }
            }
        }
    }
    hist
}

// ---------------------------------------------------------------- island loss

/// Island loss written out term by term.
pub fn island_loss_direct(x: &Matrix, y: &[usize], c: &Matrix, lambda1: f64) -> f64 {
    let mut center = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        for d in 0..x.cols() {
            let diff = x.get(i, d) - c.get(yi, d);
            center += diff * diff;
        }
    }
    let norm = |j: usize| (0..c.cols()).map(|d| c.get(j, d) * c.get(j, d)).sum::<f64>().sqrt();
    let mut pairs = 0.0;
    for j in 0..c.rows() {
        for k in 0..c.rows() {
            if j != k {
                let dot: f64 = (0..c.cols()).map(|d| c.get(j, d) * c.get(k, d)).sum();
                pairs += dot / (norm(j) * norm(k)) + 1.0;
            }
        }
    }
    center / 2.0 + lambda1 * pairs
}

/// Central finite differences of `f` at `m`, entry by entry.
pub fn finite_difference(m: &Matrix, h: f64, f: impl Fn(&Matrix) -> f64) -> Matrix {
    let mut g = Matrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let mut plus = m.clone();
            plus.set(r, c, m.get(r, c) + h);
            let mut minus = m.clone();
            minus.set(r, c, m.get(r, c) - h);
            g.set(r, c, (f(&plus) - f(&minus)) / (2.0 * h));
        }
    }
    g
}

/// Largest `|a − b| / max(1, |a|, |b|)` over matching entries.
pub fn max_rel_error(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(u, v)| (u - v).abs() / 1f64.max(u.abs()).max(v.abs()))
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- Bayesian network

/// The full joint table `P(E, M_1..M_m)` as a flat array indexed by
/// `e·7^m + Σ m_i·7^(m−1−i)`.
pub fn joint_table(prior: &[f64; NUM_CLASSES], cpts: &[[[f64; NUM_CLASSES]; NUM_CLASSES]]) -> Vec<f64> {
    let m = cpts.len();
    let cells = NUM_CLASSES.pow(m as u32);
    let mut table = vec![0.0; NUM_CLASSES * cells];
    for e in 0..NUM_CLASSES {
        for cell in 0..cells {
            let mut p = prior[e];
            let mut rest = cell;
            for i in (0..m).rev() {
                p *= cpts[i][e][rest % NUM_CLASSES];
                rest /= NUM_CLASSES;
            }
            table[e * cells + cell] = p;
        }
    }
    table
}

/// Posterior over `E` given every measurement, read off the joint table.
pub fn posterior_from_table(table: &[f64], m: usize, observed: &[usize]) -> [f64; NUM_CLASSES] {
    let cells = NUM_CLASSES.pow(m as u32);
    let cell = observed.iter().fold(0, |acc, &o| acc * NUM_CLASSES + o);
    let column: Vec<f64> = (0..NUM_CLASSES).map(|e| table[e * cells + cell]).collect();
    let evidence: f64 = column.iter().sum();
    std::array::from_fn(|e| column[e] / evidence)
}

// ---------------------------------------------------------------- pooling

/// Frames kept by the length adjustment for `T ≥ k`: drop `r = T mod k`
/// frames, the odd one from the head.
pub fn trimmed_frames(t: usize, k: usize) -> std::ops::Range<usize> {
    let r = t - (t / k) * k;
    let head = r / 2 + r % 2;
    let tail = r / 2;
    head..t - tail
}

/// k-average pooling written as explicit bin sums over the trimmed frames.
pub fn pool_oracle(scores: &[[f64; NUM_CLASSES]], k: usize) -> Vec<f64> {
    let frames: Vec<usize> = if scores.len() >= k {
        trimmed_frames(scores.len(), k).collect()
    } else {
        let t = scores.len();
        let mut out = Vec::new();
        for i in 0..t {
            let copies = k / t + if i < k % t { 1 } else { 0 };
            out.extend(std::iter::repeat_n(i, copies));
        }
        out
    };
    let per = frames.len() / k;
    let mut out = Vec::new();
    for b in 0..k {
        for c in 0..NUM_CLASSES {
            let s: f64 = frames[b * per..(b + 1) * per].iter().map(|&f| scores[f][c]).sum();
            out.push(s / per as f64);
        }
    }
    out
}

// ---------------------------------------------------------------- evaluation

/// Confusion counts tallied from scratch.
pub fn recount(pred: &[usize], truth: &[usize]) -> [[u64; NUM_CLASSES]; NUM_CLASSES] {
    let mut m = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    for e in 0..NUM_CLASSES {
        for p in 0..NUM_CLASSES {
            m[e][p] = pred.iter().zip(truth).filter(|(a, b)| **a == p && **b == e).count() as u64;
        }
    }
    m
}

// ---------------------------------------------------------------- random data

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let v = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::from_vec(rows, cols, v).unwrap()
}

pub fn random_volume(rng: &mut ChaCha8Rng, t: usize, h: usize, w: usize) -> VideoVolume {
    let data = (0..t * h * w).map(|_| rng.random_range(0..=255u8) as f64).collect();
    VideoVolume::new(t, h, w, data).unwrap()
}

/// A random row-stochastic 7×7 table with every entry positive.
pub fn random_cpt(rng: &mut ChaCha8Rng) -> [[f64; NUM_CLASSES]; NUM_CLASSES] {
    std::array::from_fn(|_| {
        let row: [f64; NUM_CLASSES] = std::array::from_fn(|_| rng.random_range(0.01..1.0));
        let s: f64 = row.iter().sum();
        row.map(|v| v / s)
    })
}
